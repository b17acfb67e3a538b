import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from stablegini import asymptotics, montecarlo
from stablegini.errors import DomainError, NumericalError

# mpmath, 40 digits: gamma(0.8) * |cos(0.6 pi)| / 0.2
C_ALPHA_1_2 = 1.7988338344869936124
# mpmath, 40 digits, over sorted default_rng(2024).random(10) with Q(u) = (1 - u)^(-2/3)
REMAINDER_SEED_2024 = 0.23678058403980450833


def pareto_cdf_inverse(alpha):
    return lambda u: (1.0 - u) ** (-1.0 / alpha)


class TestConstants:
    def test_c_alpha_at_three_halves(self):
        assert asymptotics.c_alpha(1.5) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-14)

    def test_c_alpha_oracle(self):
        assert asymptotics.c_alpha(1.2) == pytest.approx(C_ALPHA_1_2, rel=1e-14)

    @pytest.mark.parametrize("alpha", [1.0, 2.0, 0.5, 2.5])
    def test_c_alpha_domain(self, alpha):
        with pytest.raises(DomainError):
            asymptotics.c_alpha(alpha)

    def test_c_alpha_grows_towards_two(self):
        assert asymptotics.c_alpha(1.999) > 1e2

    @given(st.floats(min_value=1.01, max_value=1.99))
    def test_c_alpha_positive(self, alpha):
        assert 0 < asymptotics.c_alpha(alpha) < math.inf


class TestLimitLaws:
    def test_np_limit_scale(self):
        law = asymptotics.pareto_np_limit(1.5, 100)
        assert law.params.gamma == pytest.approx(0.03892, abs=5e-6)
        assert (law.params.beta, law.params.delta) == (1.0, 0.0)

    def test_np_limit_rate(self):
        ratio = asymptotics.pareto_np_limit(1.5, 100).params.gamma / asymptotics.pareto_np_limit(1.5, 10**5).params.gamma
        assert ratio == pytest.approx(10.0, rel=1e-12)

    def test_np_limit_vanishes(self):
        assert asymptotics.pareto_np_limit(1.3, 10**15).params.gamma < 1e-3

    @given(st.floats(min_value=1.05, max_value=1.95), st.integers(min_value=1, max_value=10**8))
    def test_np_scale_decreasing(self, alpha, n):
        a = asymptotics.pareto_np_limit(alpha, n).params.gamma
        b = asymptotics.pareto_np_limit(alpha, n + 1).params.gamma
        assert b < a

    def test_ml_variance(self):
        law = asymptotics.pareto_ml_limit(1.5, 100)
        assert law.kind == "gaussian" and law.mean == 0.0
        assert law.variance == pytest.approx(0.005625, rel=1e-14)
        assert asymptotics.pareto_ml_limit(1.2, 100).variance == pytest.approx(5.76 / 3.8416 / 100, rel=1e-14)

    def test_ml_variance_halves(self):
        assert asymptotics.pareto_ml_variance(1.7, 400) == pytest.approx(asymptotics.pareto_ml_variance(1.7, 200) / 2, rel=1e-15)

    @pytest.mark.parametrize("tail_matched", [False, True])
    @pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
    def test_finite_sample_law_matches_np_limit(self, alpha, tail_matched):
        mu = asymptotics.pareto_mean(alpha)
        L0 = asymptotics.pareto_l0(alpha, 1.0, tail_matched)
        for n in (10, 1234, 10**7):
            a = asymptotics.gini_finite_sample_law(alpha, mu, L0, n, 0.0).params
            b = asymptotics.pareto_np_limit(alpha, n, tail_matched=tail_matched).params
            for field in ("alpha", "beta", "gamma", "delta"):
                assert getattr(a, field) == pytest.approx(getattr(b, field), rel=1e-12, abs=1e-15)

    def test_finite_sample_law_example(self):
        law = asymptotics.gini_finite_sample_law(1.5, 3.0, asymptotics.pareto_l0(1.5), 100, 0.5)
        assert law.params.delta == 0.5
        assert law.params.gamma == pytest.approx(0.03892, abs=5e-6)
        doubled = asymptotics.gini_finite_sample_law(1.5, 3.0, 2 * asymptotics.pareto_l0(1.5), 100, 0.5)
        assert doubled.params.gamma == pytest.approx(2 * law.params.gamma, rel=1e-15)
        far = asymptotics.gini_finite_sample_law(1.5, 3.0, 1.0, 10**18, 0.5)
        assert far.params.gamma < 1e-6 and far.params.delta == 0.5

    def test_tail_matched_constants(self):
        ca = asymptotics.c_alpha(1.5)
        assert asymptotics.pareto_gmd_l0(1.5, 2.0, tail_matched=True) == pytest.approx(2.0 * ca ** (1 / 1.5))
        assert asymptotics.pareto_l0(1.5, 1.0, tail_matched=True) == pytest.approx(0.5 * ca ** (1 / 1.5))
        assert asymptotics.pareto_l0(1.5) == pytest.approx(ca ** (-1 / 1.5))

    @pytest.mark.parametrize(
        "args",
        [(1.5, 0.0, 1.0, 10, 0.1), (1.5, 3.0, -1.0, 10, 0.1), (2.0, 3.0, 1.0, 10, 0.1), (1.5, 3.0, 1.0, 0, 0.1), (1.5, 3.0, 1.0, 10, math.nan)],
    )
    def test_finite_sample_law_domain(self, args):
        with pytest.raises(DomainError):
            asymptotics.gini_finite_sample_law(*args)

    def test_gaussian_tail_keeps_precision(self):
        law = asymptotics.GaussianLimit(0.0, 1.0)
        assert law.exceedance(10.0) == pytest.approx(2 * stats.norm.sf(10.0), rel=1e-12)
        assert law.exceedance(10.0) > 0

    def test_negative_variance_rejected(self):
        with pytest.raises(DomainError):
            asymptotics.GaussianLimit(0.0, -1.0)


class TestGmdScaling:
    def test_examples(self):
        assert asymptotics.gmd_limit_scaling(1.5, 1.0, 1000) == pytest.approx(10.0, rel=1e-12)
        assert asymptotics.gmd_limit_scaling(1.1, 1.0, 10**6) == pytest.approx(10 ** (6 / 11), rel=1e-12)
        assert 10 ** (6 / 11) == pytest.approx(3.511, abs=5e-4)

    def test_clt_rate_near_two(self):
        n = 10**6
        exponent = math.log(asymptotics.gmd_limit_scaling(1.999999, 1.0, n)) / math.log(n)
        assert exponent == pytest.approx(0.5, abs=1e-6)


class TestErrorRatio:
    def test_vanishing_threshold(self):
        assert asymptotics.error_ratio_r(1e-9, 1000, 1.5) == pytest.approx(1.0, abs=1e-5)

    def test_wide_stable_law_exceeds_more(self):
        assert asymptotics.error_ratio_r(0.05, 2, 1.5) > 1

    def test_reference_point(self):
        assert 0.5 <= asymptotics.error_ratio_r(0.005, 27_000, 1.8) <= 2

    @pytest.mark.parametrize("alpha,c", [(1.8, 0.01), (1.5, 0.005), (1.2, 0.02)])
    def test_strictly_decreasing_in_n(self, alpha, c):
        grid = np.unique(np.logspace(1, 9, 40).astype(int))
        r = [asymptotics.error_ratio_r(c, int(n), alpha) for n in grid]
        assert np.all(np.diff(r) < 0)

    def test_underflow_reported(self):
        with pytest.raises(NumericalError):
            asymptotics.error_ratio_r(0.5, 10**6, 1.8)

    def test_spread_choice_validated(self):
        with pytest.raises(DomainError):
            asymptotics.error_ratio_r(0.01, 100, 1.5, ml_spread="iqr")


class TestNTilde:
    def test_alpha_1_8(self):
        nt = asymptotics.n_tilde(0.005, 1.8)
        assert 1e4 <= nt < 1e5
        assert abs(nt / 27e3 - 1) <= 0.5

    def test_alpha_1_2(self):
        nt = asymptotics.n_tilde(0.02, 1.2)
        assert 1e7 <= nt < 1e9
        assert abs(nt / 80e6 - 1) <= 0.5

    @pytest.mark.parametrize("alpha,c", [(1.8, 0.005), (1.5, 0.01), (1.2, 0.02), (1.5, 0.005)])
    def test_defining_bracket(self, alpha, c):
        nt = asymptotics.n_tilde(c, alpha)
        assert asymptotics.error_ratio_r(c, nt, alpha) <= 1 < asymptotics.error_ratio_r(c, nt - 1, alpha)

    @pytest.mark.parametrize("c", [0.005, 0.01])
    def test_grows_as_alpha_falls(self, c):
        sizes = [asymptotics.n_tilde(c, a) for a in (1.8, 1.5, 1.2)]
        assert sizes[0] < sizes[1] < sizes[2]

    def test_bracket_exhaustion(self):
        with pytest.raises(NumericalError):
            asymptotics.n_tilde(0.02, 1.8)

    def test_variance_reading_is_smaller(self):
        assert asymptotics.n_tilde(0.005, 1.8, ml_spread="variance") < asymptotics.n_tilde(0.005, 1.8)


class TestRemainder:
    def test_grid_gives_zero(self):
        n = 25
        u = np.arange(1, n + 1) / n
        assert asymptotics.remainder_rn(u, pareto_cdf_inverse(1.5)) == 0.0

    def test_regression_constant(self):
        u = np.random.default_rng(2024).random(10)
        assert asymptotics.remainder_rn(u, pareto_cdf_inverse(1.5)) == pytest.approx(REMAINDER_SEED_2024, rel=1e-13)

    def test_order_invariant(self, rng):
        u = rng.random(50)
        q = pareto_cdf_inverse(1.3)
        assert asymptotics.remainder_rn(u, q) == asymptotics.remainder_rn(u[::-1], q)

    @pytest.mark.parametrize("bad", [[0.0, 0.5], [0.5, 1.5], [-0.1, 0.3], []])
    def test_out_of_range(self, bad):
        with pytest.raises(DomainError):
            asymptotics.remainder_rn(bad, pareto_cdf_inverse(1.5))

    def test_mean_below_vc_bound(self):
        rng = np.random.default_rng(8)
        q = pareto_cdf_inverse(1.5)
        mean_abs = np.mean([abs(asymptotics.remainder_rn(rng.random(1000), q)) for _ in range(2000)])
        assert mean_abs <= asymptotics.vc_bound(1000, 3.0)

    def test_shrinks_with_n(self):
        rng = np.random.default_rng(9)
        q = pareto_cdf_inverse(1.5)
        small = np.mean([abs(asymptotics.remainder_rn(rng.random(10), q)) for _ in range(2000)])
        large = np.mean([abs(asymptotics.remainder_rn(rng.random(1000), q)) for _ in range(2000)])
        assert large < small


class TestVcBound:
    def test_examples(self):
        assert asymptotics.vc_bound(1, 1.0) == pytest.approx(math.sqrt(2 * math.log(2)), rel=1e-15)
        assert asymptotics.vc_bound(1, 1.0) == pytest.approx(1.1774, abs=5e-5)
        assert asymptotics.vc_bound(3, 2.0) == pytest.approx(2 * math.sqrt(math.log(8) / 3), rel=1e-15)
        assert asymptotics.vc_bound(3, 2.0) == pytest.approx(1.6651, abs=5e-5)

    @given(st.integers(min_value=1, max_value=10**9), st.floats(min_value=1e-3, max_value=1e3))
    def test_linear_in_mu(self, n, mu):
        assert asymptotics.vc_bound(n, 2 * mu) == pytest.approx(2 * asymptotics.vc_bound(n, mu), rel=1e-14)

    @given(st.integers(min_value=2, max_value=10**9))
    def test_decreasing(self, n):
        assert asymptotics.vc_bound(n + 1, 1.0) < asymptotics.vc_bound(n, 1.0)


def _ks_records(tail_matched):
    cfg = montecarlo.ExperimentConfig.default("ks_theorem2")
    cfg.tail_matched = tail_matched
    return montecarlo.run(cfg).records


@pytest.fixture(scope="module")
def ks_records():
    return {(r["alpha"], r["n"]): r for r in _ks_records(False)}


class TestStableLimitSimulation:
    """Standardized deviations of the sample Gini and of the half Gini mean
    difference against their stable limits, 2000 replications per cell."""

    @pytest.mark.parametrize("alpha", [1.3, 1.5, 1.7])
    def test_gini_tail_matched(self, ks_records, alpha):
        near, far = ks_records[(alpha, 100)], ks_records[(alpha, 10_000)]
        assert far["ks_gini_tail_matched"] < 0.1
        assert far["ks_gini_tail_matched"] < near["ks_gini_tail_matched"]

    @pytest.mark.parametrize("alpha", [1.3, 1.5, 1.7])
    def test_gmd_tail_matched(self, ks_records, alpha):
        near, far = ks_records[(alpha, 100)], ks_records[(alpha, 10_000)]
        assert far["ks_gmd_tail_matched"] < 0.1
        assert far["ks_gmd_tail_matched"] < near["ks_gmd_tail_matched"]

    @pytest.mark.parametrize("alpha", [1.3, 1.5, 1.7])
    def test_gmd_nominal_constant(self, ks_records, alpha):
        near, far = ks_records[(alpha, 100)], ks_records[(alpha, 10_000)]
        assert far["ks_gmd_nominal"] < 0.1
        assert far["ks_gmd_nominal"] < near["ks_gmd_nominal"]


class TestMlLimitSimulation:
    @pytest.fixture(scope="class")
    def g_ml(self):
        alpha, n, reps = 1.5, 100, 10_000
        rng = np.random.default_rng(4242)
        x = montecarlo.pareto_quantile(1.0 - rng.random((reps, n)), alpha)
        alpha_hat = n / np.log(x).sum(axis=1)
        return 1.0 / (2.0 * alpha_hat - 1.0)

    def test_variance(self, g_ml):
        assert abs(np.var(g_ml, ddof=1) / 0.005625 - 1) <= 0.10

    def test_skewness(self, g_ml):
        assert abs(stats.skew(g_ml)) <= 0.15
