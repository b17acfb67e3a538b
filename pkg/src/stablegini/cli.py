"""Command-line interface: ``stablegini {estimate,stable,experiment}``.

Exit codes
    0  success
    2  usage error (bad flags)
    3  input file missing or unreadable
    4  input data did not parse into a valid sample
    5  parameter outside its domain
    6  data inconsistent with the model (a value below the known minimum c)
    7  numerical failure (quadrature, optimizer or root search)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import asymptotics, gini, montecarlo, stable
from ._backend import BACKEND
from ._version import __version__
from .errors import DataError, DomainError, InputFileError, StableGiniError

SEED_ENV = "STABLE_GINI_SEED"
DEFAULT_SEED = montecarlo.DEFAULT_SEED
SIG_DIGITS = 12

EXPERIMENT_NAMES = {
    "table1": "table1",
    "table2": "table2",
    "figure1": "figure1",
    "figure2": "figure2",
    "figure3": "figure3",
    "ks": "ks_theorem2",
}

SUMMARY_COLUMNS = {
    "table1": ["alpha", "n", "mean_np", "bias_np", "mean_ml", "bias_ml", "error_ratio", "replications"],
    "table2": ["alpha", "c", "n_tilde", "reference_n", "ratio_to_reference", "r_at_reference"],
    "figure1": ["alpha", "n", "mean_np", "bias_np", "sd_np", "skewness"],
    "figure2": ["alpha", "n", "estimator", "scale", "mode", "total_mass", "mean"],
    "figure3": ["alpha", "n", "correction", "mad_np", "mad_corrected", "clamped"],
    "ks_theorem2": ["alpha", "n", "ks_gini", "ks_gmd", "ks_gini_tail_matched", "ks_gmd_tail_matched"],
}


# ---------------------------------------------------------------------------
# input


def read_values(path, column=None) -> np.ndarray:
    """Read one column of numbers from a CSV file.

    A first row whose selected cell is not numeric is treated as a header.
    ``column`` is a 1-based index or a header name; default is the first.
    """
    try:
        with open(path, newline="", encoding="utf-8-sig") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputFileError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not UTF-8 text") from exc

    rows = [(i, row) for i, row in enumerate(csv.reader(io.StringIO(text)), start=1) if any(c.strip() for c in row)]
    if not rows:
        raise DataError(f"{path} contains no data")

    header = None
    first_line, first = rows[0]
    if column is not None and not str(column).isdigit():
        header = [c.strip() for c in first]
        if column not in header:
            raise DataError(f"column {column!r} not found in header {header}")
        idx = header.index(column)
    else:
        idx = int(column) - 1 if column is not None else 0
        if idx < 0:
            raise DataError("--column is 1-based")
        if idx < len(first) and not _is_number(first[idx]):
            header = first
    body = rows[1:] if header is not None else rows

    values = []
    for line, row in body:
        if idx >= len(row):
            raise DataError(f"line {line}: no column {idx + 1}")
        cell = row[idx].strip()
        try:
            values.append(float(cell))
        except ValueError:
            raise DataError(f"line {line}: {cell!r} is not a number") from None
    if not values:
        raise DataError(f"{path} has a header but no data rows")
    arr = np.array(values)
    if not np.all(np.isfinite(arr)):
        raise DataError("input contains non-finite values")
    return arr


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


# ---------------------------------------------------------------------------
# output


def _round(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def _flatten(rec, prefix=""):
    out = {}
    for k, v in rec.items():
        if isinstance(v, dict):
            out.update(_flatten(v, f"{prefix}{k}_"))
        else:
            out[f"{prefix}{k}"] = v
    return out


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    if isinstance(v, list):
        return ";".join(_csv_cell(x) for x in v)
    return str(v)


def to_csv(records) -> str:
    flat = [_flatten(r) for r in records]
    fields = []
    for r in flat:
        fields.extend(k for k in r if k not in fields)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for r in flat:
        writer.writerow([_csv_cell(_round(r.get(k))) for k in fields])
    return buf.getvalue()


def to_json(document) -> str:
    return json.dumps(_round(document), indent=2) + "\n"


def _emit(text, output):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            Path(output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise InputFileError(f"cannot write {output}: {exc.strerror or exc}") from exc


def _report(meta, results, fmt, output):
    if fmt == "csv":
        _emit(to_csv(results), output)
    else:
        _emit(to_json({"meta": meta, "results": results}), output)


def _meta(command, args, seed=None):
    config = {k: v for k, v in vars(args).items() if k not in ("func",)}
    meta = {"tool": "stablegini", "version": __version__, "command": command, "backend": BACKEND, "config": config}
    if seed is not None:
        meta["seed"] = seed
    return meta


def summary_table(records, columns) -> str:
    cols = [c for c in columns if any(c in r for r in records)]
    cells = [[_csv_cell(_round(r.get(c))) if not isinstance(r.get(c), float)
              else f"{r[c]:.6g}" for c in cols] for r in records]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# seed


def resolve_seed(flag):
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV, "").strip()
    if env:
        try:
            seed = int(env)
        except ValueError:
            raise DomainError(f"{SEED_ENV}={env!r} is not an integer") from None
        if seed < 0:
            raise DomainError(f"{SEED_ENV} must be non-negative")
        return seed
    return DEFAULT_SEED


# ---------------------------------------------------------------------------
# commands


def cmd_estimate(args):
    sample = gini.Sample(read_values(args.input, args.column))
    methods = ["nonparametric", "mle", "corrected"] if args.method == "all" else [_METHOD_ALIASES[args.method]]

    c, c_source = args.c, "flag"
    if c is None:
        c, c_source = float(sample.sorted[0]), "sample_minimum"

    results = []
    np_est = gini.gini_nonparametric(sample)
    alpha = args.alpha
    alpha_source = "flag" if alpha is not None else None
    needs_alpha = any(m != "nonparametric" for m in methods)
    if alpha is None and needs_alpha:
        alpha, alpha_source = gini.pareto_mle_alpha(sample, c), "mle"

    for method in methods:
        try:
            rec = _estimate_one(method, sample, np_est, args, alpha, alpha_source, c)
        except DomainError as exc:
            # with --method all, one inapplicable estimator should not hide the others
            if args.method != "all":
                raise
            rec = {"method": method, "value": None, "n": sample.n, "error": str(exc)}
        if method != "nonparametric":
            rec["c"] = c
            rec["c_source"] = c_source
        results.append(rec)

    meta = _meta("estimate", args)
    meta["n"] = sample.n
    _report(meta, results, args.format, args.output)
    return 0


def _estimate_one(method, sample, np_est, args, alpha, alpha_source, c):
    if method == "nonparametric":
        rec = np_est.to_dict()
        if alpha is not None and 1 < alpha < 2:
            mu, L0 = _mu_l0(args, alpha, c)
            rec["limit_law"] = asymptotics.gini_finite_sample_law(alpha, mu, L0, sample.n, 0.0).to_dict()
        return rec
    if method == "mle":
        return gini.gini_mle(sample, c).to_dict()
    if not 1 < alpha < 2:
        raise DomainError(f"the correction needs a tail index in (1, 2), got alpha={alpha:.6g}")
    mu, L0 = _mu_l0(args, alpha, c)
    rec = gini.gini_corrected(sample, alpha, mu, L0).to_dict()
    rec["alpha_source"] = alpha_source
    rec["mu_source"] = "flag" if args.mu is not None else "pareto"
    rec["L0_source"] = "flag" if args.l0 is not None else "pareto"
    return rec


_METHOD_ALIASES = {"np": "nonparametric", "ml": "mle", "mle": "mle", "corrected": "corrected",
                   "nonparametric": "nonparametric"}


def _mu_l0(args, alpha, c):
    mu = args.mu if args.mu is not None else asymptotics.pareto_mean(alpha, c)
    L0 = args.l0 if args.l0 is not None else asymptotics.pareto_l0(alpha, c, args.tail_matched)
    return mu, L0


def cmd_stable(args):
    params = stable.StableParams(args.alpha, args.beta, args.gamma, args.delta)
    seed = None
    if args.action in ("pdf", "cdf"):
        if not args.x:
            raise DomainError(f"stable {args.action} needs at least one --x")
        fn = stable.pdf if args.action == "pdf" else stable.cdf
        values = np.atleast_1d(fn(params, np.asarray(args.x, dtype=float)))
        results = [{"x": float(x), args.action: float(v)} for x, v in zip(args.x, values)]
    elif args.action == "mode":
        results = [{"mode": stable.mode(params)}]
    else:
        if args.n is None:
            raise DomainError("stable sample needs --n")
        seed = resolve_seed(args.seed)
        draws = stable.sample(params, np.random.default_rng(seed), args.n)
        results = [{"value": float(v)} for v in draws]
    meta = _meta("stable", args, seed)
    meta["params"] = params.to_dict()
    _report(meta, results, args.format, args.output)
    return 0


def cmd_experiment(args):
    name = EXPERIMENT_NAMES[args.name]
    seed = resolve_seed(args.seed)
    overrides = dict(
        alpha_grid=args.alpha,
        n_grid=args.n,
        replications=args.reps,
        master_seed=seed,
        workers=args.workers,
        tail_matched=args.tail_matched,
        ml_spread=args.ml_spread,
        c_grid=args.c,
    )
    cfg = montecarlo.ExperimentConfig.default(name, **overrides)
    report = montecarlo.run(cfg)
    meta = _meta("experiment", args, seed)
    meta.update(report.meta)
    meta["config"] = cfg.to_dict()

    summary = summary_table(report.records, SUMMARY_COLUMNS[name])
    if args.output:
        base = Path(args.output)
        if base.suffix in (".json", ".csv"):
            base = base.with_suffix("")
        doc = {"meta": meta, "results": report.records}
        if report.series:
            doc["series"] = report.series
        _emit(to_json(doc), f"{base}.json")
        _emit(to_csv(report.records), f"{base}.csv")
        if report.series:
            _emit(to_csv(report.series), f"{base}_series.csv")
        sys.stdout.write(summary)
    else:
        sys.stderr.write(summary)
        if args.format == "csv":
            _emit(to_csv(report.records), None)
        else:
            doc = {"meta": meta, "results": report.records}
            if report.series:
                doc["series"] = report.series
            _emit(to_json(doc), None)
    return 0


# ---------------------------------------------------------------------------
# parser


def _positive_int(text):
    try:
        value = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value != float(text) or value < 1:
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive integer")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer seed") from None
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def _output_flags(p):
    p.add_argument("--output", "-o", help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stablegini",
        description="Gini index estimation under fat tails.",
        epilog=f"Seed default: ${SEED_ENV} if set, else {DEFAULT_SEED}.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate the Gini index of a data file")
    p.add_argument("--input", "-i", required=True, help="CSV file, one observation per row")
    p.add_argument("--column", help="1-based column index or header name")
    p.add_argument("--method", choices=("np", "ml", "corrected", "all"), default="all")
    p.add_argument("--c", type=float, help="known minimum (default: sample minimum)")
    p.add_argument("--alpha", type=float, help="tail index (default: ML estimate)")
    p.add_argument("--mu", type=float, help="mean of the data law (default: Pareto mean)")
    p.add_argument("--l0", type=float, help="slowly-varying constant L0 (default: Pareto value)")
    p.add_argument("--tail-matched", action="store_true",
                   help="use the tail-matched Pareto norming constant for L0")
    _output_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("stable", help="evaluate or sample an alpha-stable law (S1)")
    p.add_argument("action", choices=("pdf", "cdf", "mode", "sample"))
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--x", type=float, nargs="+", help="evaluation point(s)")
    p.add_argument("--n", type=_positive_int, help="number of draws")
    p.add_argument("--seed", type=_seed)
    _output_flags(p)
    p.set_defaults(func=cmd_stable)

    p = sub.add_parser("experiment", help="run a simulation or analytic experiment")
    p.add_argument("name", choices=tuple(EXPERIMENT_NAMES))
    p.add_argument("--alpha", type=float, nargs="+", help="tail-index grid")
    p.add_argument("--n", type=_positive_int, nargs="+", help="sample-size grid")
    p.add_argument("--c", type=float, nargs="+", help="threshold grid (table2)")
    p.add_argument("--reps", type=_positive_int, help="replications per cell")
    p.add_argument("--seed", type=_seed)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--tail-matched", action="store_true",
                   help="use the tail-matched Pareto norming constant")
    p.add_argument("--ml-spread", choices=asymptotics.ML_SPREAD_CHOICES, default="sd",
                   help="table2: read the ML expression as a standard deviation or a variance")
    p.add_argument("--output", "-o", help="base path; writes BASE.json and BASE.csv")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="stdout format when --output is absent")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StableGiniError as exc:
        sys.stderr.write(f"stablegini: error: {exc}\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
