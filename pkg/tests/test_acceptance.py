"""Exit criteria, each run at its stated scale and tolerance.

Every test records one pass/fail line (shown in the terminal summary) before
asserting, so a failing criterion still reports its measured values.
"""

import math
import time

import numpy as np
import pytest
from scipy import stats

from conftest import record_criterion
from stablegini import asymptotics, gini, montecarlo, stable
from stablegini.montecarlo import ExperimentConfig
from stablegini.stable import StableParams

pytestmark = pytest.mark.acceptance


@pytest.fixture(scope="module")
def table1():
    started = time.perf_counter()
    report = montecarlo.run(ExperimentConfig.default("table1", alpha_grid=[1.1], n_grid=[1000, 10_000], replications=10_000))
    return report, time.perf_counter() - started


def test_criterion_1_table1_desk_scale(table1):
    report, elapsed = table1
    rec = report.cell(n=1000)
    ok_np = abs(rec["mean_np"] - 0.711) <= 0.02
    ok_ml = abs(rec["mean_ml"] - 0.8333) <= 0.005
    ok_time = elapsed < 300
    passed = ok_np and ok_ml and rec["replications"] >= 10_000 and ok_time
    record_criterion(
        1,
        "table1 at desk scale (alpha=1.1, n=1e3, 1e4 reps)",
        passed,
        f"mean NP {rec['mean_np']:.4f} (target 0.711 +/- 0.02), mean ML {rec['mean_ml']:.4f} "
        f"(target 0.8333 +/- 0.005), both n-cells in {elapsed:.0f}s",
    )
    assert passed


def test_criterion_2_table1_trend(table1):
    report, _ = table1
    low, high = report.cell(n=1000), report.cell(n=10_000)
    bias_ok = low["bias_np"] < 0 and high["bias_np"] < 0 and abs(high["bias_np"]) < abs(low["bias_np"])
    ratio_ok = low["error_ratio"] > 1 and high["error_ratio"] > 1 and high["error_ratio"] >= low["error_ratio"]
    passed = bias_ok and ratio_ok
    record_criterion(
        2,
        "table1 trend over n in {1e3, 1e4}",
        passed,
        f"bias NP {low['bias_np']:.4f} -> {high['bias_np']:.4f}; "
        f"error ratio {low['error_ratio']:.3f} -> {high['error_ratio']:.3f}",
    )
    assert passed


def test_criterion_3_ml_variance():
    report = montecarlo.run(ExperimentConfig.default("table1", alpha_grid=[1.5], n_grid=[100], replications=10_000))
    var = report.records[0]["var_ml"]
    target = asymptotics.pareto_ml_variance(1.5, 100)
    passed = abs(var / target - 1) <= 0.10
    record_criterion(
        3,
        "ML Gini variance at alpha=1.5, n=100, 1e4 reps",
        passed,
        f"empirical {var:.6f} vs {target:.6f} ({100 * (var / target - 1):+.1f}%, limit +/-10%)",
    )
    assert passed


def test_criterion_4_nonparametric_stable_limit():
    report = montecarlo.run(ExperimentConfig.default("ks_theorem2"))
    cells = {(r["alpha"], r["n"]): r for r in report.records}
    parts, passed = [], True
    matched_ok = True
    for alpha in (1.3, 1.5, 1.7):
        near, far = cells[(alpha, 100)], cells[(alpha, 10_000)]
        ok = far["ks_gini_nominal"] < 0.1 and far["ks_gini_nominal"] < near["ks_gini_nominal"]
        passed &= ok
        matched_ok &= far["ks_gini_tail_matched"] < 0.1 and far["ks_gini_tail_matched"] < near["ks_gini_tail_matched"]
        parts.append(f"a={alpha}: KS {near['ks_gini_nominal']:.3f} -> {far['ks_gini_nominal']:.3f}")
    record_criterion(4, "KS of scaled G^NP to S(a,1,1/mu,0), n=1e4 vs 1e2, 2000 reps", passed, "; ".join(parts))
    matched = "; ".join(
        f"a={a}: {cells[(a, 100)]['ks_gini_tail_matched']:.3f} -> {cells[(a, 10_000)]['ks_gini_tail_matched']:.3f}"
        for a in (1.3, 1.5, 1.7)
    )
    print(f"info: same check with the tail-matched constant {'passes' if matched_ok else 'fails'}: {matched}")
    assert passed


def test_criterion_5_table2():
    report = montecarlo.run(ExperimentConfig.default("table2"))
    matches = sum(bool(r["matches_reference"]) for r in report.records)
    off = [r for r in report.records if not 0.5 <= r["r_at_reference"] <= 2]
    passed = matches >= 9 and not off
    detail = f"{matches}/12 cells match (need 9); r(c, n_ref) outside [0.5, 2] in {len(off)} cell(s)"
    if off:
        detail += ": " + ", ".join(f"(a={r['alpha']}, c={r['c']}) r={r['r_at_reference']:.3g}" for r in off)
    record_criterion(5, "table2 sample sizes", passed, detail)
    assert passed


def test_criterion_6_correction_experiment():
    report = montecarlo.run(ExperimentConfig.default("figure3"))
    losers = [r for r in report.records if r["n"] <= 1000 and not r["mad_corrected"] < r["mad_np"]]
    passed = not losers and all(r["replications"] == 1000 for r in report.records)
    checked = sum(r["n"] <= 1000 for r in report.records)
    detail = f"MAD(G^C) < MAD(G^NP) in {checked - len(losers)}/{checked} cells with n <= 1000"
    if losers:
        detail += "; fails at " + ", ".join(f"(a={r['alpha']}, n={r['n']})" for r in losers)
    record_criterion(6, "Mode correction beats G^NP (1000 reps)", passed, detail)
    assert passed


def test_criterion_7_stable_engine():
    x = np.linspace(-10, 10, 201)
    p2 = StableParams(2.0, 0.0, 1.3, 0.4)
    ref = stats.norm(0.4, math.sqrt(2) * 1.3)
    gauss = max(np.abs(stable.pdf(p2, x) - ref.pdf(x)).max(), np.abs(stable.cdf(p2, x) - ref.cdf(x)).max())

    loc_scale = 0.0
    for alpha, beta in [(1.2, 1.0), (1.5, -0.4), (1.8, 0.7)]:
        gamma, delta = 2.5, -1.7
        p = StableParams(alpha, beta, gamma, delta)
        base = StableParams(alpha, beta)
        z = (x - delta) / gamma
        loc_scale = max(
            loc_scale,
            np.abs(stable.pdf(p, x) - stable.pdf(base, z) / gamma).max(),
            np.abs(stable.cdf(p, x) - stable.cdf(base, z)).max(),
        )

    mode_gap = 0.0
    for alpha, beta in [(1.2, 1.0), (1.5, 1.0), (1.7, -0.5)]:
        m0 = stable.mode(StableParams(alpha, beta))
        for gamma, delta in [(0.05, 0.3), (4.0, -2.0)]:
            mode_gap = max(mode_gap, abs(stable.mode(StableParams(alpha, beta, gamma, delta)) - (delta + gamma * m0)))

    p = StableParams(1.5, 1.0, 1.0, 0.0)
    draws = stable.sample(p, np.random.default_rng(20261015), 100_000)
    ks = montecarlo.ks_distance(draws, lambda v: stable.cdf(p, v))

    passed = gauss <= 1e-6 and loc_scale <= 1e-12 and mode_gap <= 1e-6 and ks < 0.02
    record_criterion(
        7,
        "Stable engine unit suite",
        passed,
        f"Gaussian gap {gauss:.1e} (<=1e-6), location-scale gap {loc_scale:.1e} (<=1e-12), "
        f"mode scaling gap {mode_gap:.1e} (<=1e-6), sampler KS {ks:.4f} at 1e5 (<0.02)",
    )
    assert passed


def test_criterion_8_remainder_bound():
    rows, passed = [], True
    for a_idx, alpha in enumerate((1.2, 1.5, 1.8)):
        mu = asymptotics.pareto_mean(alpha)
        quantile = lambda u, a=alpha: (1.0 - u) ** (-1.0 / a)
        for n_idx, n in enumerate((10, 100, 1000)):
            rng = montecarlo.rep_generator(8, a_idx, n_idx)
            mean_abs = np.mean([abs(asymptotics.remainder_rn(rng.random(n), quantile)) for _ in range(2000)])
            bound = asymptotics.vc_bound(n, mu)
            passed &= mean_abs <= bound
            rows.append(f"a={alpha} n={n}: {mean_abs:.4f} <= {bound:.4f}")
    record_criterion(8, "mean |R_n| below the VC bound (2000 reps)", passed, "; ".join(rows))
    assert passed


def test_criterion_9_pairwise_equals_order_statistic_form():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(2, 51))
        x = montecarlo.pareto_quantile(1.0 - rng.random(n), float(rng.uniform(1.05, 3.0)))
        pairwise = np.abs(x[:, None] - x[None, :]).sum() / 2.0 / ((n - 1) * x.sum())
        fast = gini.gini_nonparametric(x).value
        worst = max(worst, abs(fast - pairwise) / pairwise)
    passed = worst <= 1e-12
    record_criterion(9, "pairwise Gini equals the order-statistic form (500 samples, n <= 50)", passed, f"max relative gap {worst:.1e}")
    assert passed
