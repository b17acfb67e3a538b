"""Time the compiled and pure-Python kernel backends side by side.

    python benchmarks/bench_kernels.py [--points 400] [--repeat 3]

Reports microseconds per evaluation for pdf, cdf and mode on a grid that
covers the body (quadrature) and the tails (asymptotic series), plus the
largest disagreement between the backends.
"""

import argparse
import time

import numpy as np

from stablegini import stable
from stablegini._backend import load

CASES = [(1.2, 1.0), (1.5, 1.0), (1.8, 0.5)]


def _best_of(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=400)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    try:
        load("cython")
        backends = ["cython", "python"]
    except ImportError:
        print("compiled extension not built; timing the Python backend only")
        backends = ["python"]

    x = np.linspace(-8.0, 30.0, args.points)
    header = f"{'alpha':>5} {'beta':>5} {'op':>5} " + " ".join(f"{b + ' us':>11}" for b in backends)
    if len(backends) == 2:
        header += f" {'speedup':>8} {'max diff':>10}"
    print(header)
    for alpha, beta in CASES:
        params = stable.StableParams(alpha, beta)
        for op in ("pdf", "cdf"):
            fn = getattr(stable, op)
            times, values = [], []
            for b in backends:
                t, v = _best_of(lambda: fn(params, x, backend=b), args.repeat)
                times.append(t / x.size * 1e6)
                values.append(v)
            line = f"{alpha:5.2f} {beta:5.2f} {op:>5} " + " ".join(f"{t:11.2f}" for t in times)
            if len(backends) == 2:
                line += f" {times[1] / times[0]:8.1f} {np.max(np.abs(values[0] - values[1])):10.2e}"
            print(line)
        times, modes = [], []
        for b in backends:
            def run(b=b):
                stable._std_mode.cache_clear()
                return stable.mode(params, backend=b)
            t, m = _best_of(run, args.repeat)
            times.append(t * 1e6)
            modes.append(m)
        line = f"{alpha:5.2f} {beta:5.2f} {'mode':>5} " + " ".join(f"{t:11.0f}" for t in times)
        if len(backends) == 2:
            line += f" {times[1] / times[0]:8.1f} {abs(modes[0] - modes[1]):10.2e}"
        print(line)


if __name__ == "__main__":
    main()
