"""Command-line front end.

Exit codes: 0 on success, 2 on validation errors (bad parameters,
malformed configs, out-of-domain queries), 3 on numerical-consistency
errors (a computed object violating a mathematical invariant).
All CSV output is comma-separated with '.' decimal points and LF line
endings; JSON output is UTF-8.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import apply_overrides, config_from_dict, config_from_json
from .errors import (JobError, NumericalConsistencyError, ParameterError,
                     ValidationError)
from .experiments import run_experiment, write_report
from .paths import brownian_ensemble, g_inf, g_sup
from .percolation import (first_passage_path_form, first_passage_theorem_form,
                          last_passage_path_form, last_passage_theorem_form,
                          sample_weight_matrix)
from .rmt import sample_extremes
from .stats import ks_one_sample, ks_two_sample, standard_normal_cdf
from .tracy_widom import build_tw_table, default_table, f_gue, write_tw_table_csv
from .weights import RngStream, from_config

_PASSAGE = {
    "path-last": last_passage_path_form,
    "path-first": first_passage_path_form,
    "theorem-last": last_passage_theorem_form,
    "theorem-first": first_passage_theorem_form,
}


def _parse_dist(text: str) -> dict:
    """Distribution descriptor: JSON object or a bare type name."""
    if text.strip().startswith("{"):
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(
                f"distribution is not valid JSON: {exc}") from exc
        return record
    return {"type": text.strip()}


def _open_out(path: Optional[str]):
    if path is None:
        return sys.stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def _emit_csv(path: Optional[str], header: str, rows) -> None:
    fh, close = _open_out(path)
    try:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(x) if isinstance(x, float) else str(x)
                              for x in row) + "\n")
    finally:
        if close:
            fh.close()


def _read_values_csv(path: str) -> np.ndarray:
    """First column of a CSV file, skipping one header line if the
    first field is not numeric."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    values = []
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        field = line.split(",")[0].strip()
        try:
            values.append(float(field))
        except ValueError:
            if i == 0:
                continue
            raise ValidationError(
                f"{path}:{i + 1}: non-numeric value {field!r}") from None
    if not values:
        raise ValidationError(f"{path} contains no numeric values")
    return np.array(values, dtype=np.float64)


def _cmd_sample_lpp(args) -> int:
    dist = from_config(_parse_dist(args.dist))
    passage = _PASSAGE[args.kind]
    rows = []
    for i in range(args.samples):
        w = sample_weight_matrix(dist, args.n_cols, args.n_rows,
                                 RngStream(args.seed, i))
        rows.append((i, float(passage(w).value)))
    _emit_csv(args.out, "index,value", rows)
    return 0


def _cmd_sample_gue(args) -> int:
    ext = sample_extremes(args.k, args.samples, RngStream(args.seed, 0))
    if args.scaled:
        scale = args.k ** (1.0 / 6.0)
        shift = 2.0 * np.sqrt(args.k)
        rows = [(i, float(ext[i, 0]), float(ext[i, 1]),
                 float((ext[i, 1] - shift) * scale))
                for i in range(args.samples)]
        _emit_csv(args.out, "index,lambda_min,lambda_max,scaled", rows)
    else:
        rows = [(i, float(ext[i, 0]), float(ext[i, 1]))
                for i in range(args.samples)]
        _emit_csv(args.out, "index,lambda_min,lambda_max", rows)
    return 0


def _cmd_gamma(args) -> int:
    rows = []
    for i in range(args.samples):
        ens = brownian_ensemble(RngStream(args.seed, i), args.k, args.grid)
        rows.append((i, g_sup(ens), g_inf(ens)))
    _emit_csv(args.out, "index,g_sup,g_inf", rows)
    return 0


def _cmd_tw_table(args) -> int:
    if args.x_start is None and args.x_end is None:
        table = default_table()
    else:
        table = build_tw_table(
            x_start=9.0 if args.x_start is None else args.x_start,
            x_end=-10.0 if args.x_end is None else args.x_end)
    fh, close = _open_out(args.out)
    try:
        write_tw_table_csv(table, fh)
    finally:
        if close:
            fh.close()
    return 0


def _cmd_ks(args) -> int:
    a = _read_values_csv(args.input)
    if args.mode == "one":
        cdf = {"tracy-widom": lambda s: f_gue(s, default_table()),
               "normal": standard_normal_cdf}[args.cdf]
        result = ks_one_sample(a, cdf, args.alpha)
    else:
        if args.input_b is None:
            raise ValidationError("two-sample mode requires --input-b")
        b = _read_values_csv(args.input_b)
        result = ks_two_sample(a, b, args.alpha)
    print(json.dumps(result.as_record(), sort_keys=True, indent=2))
    return 0


def _cmd_experiment(args) -> int:
    if args.config is not None:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(
                f"cannot read config {args.config}: {exc}") from exc
        config = config_from_json(text)
    else:
        if args.kind is None or args.seed is None:
            raise ValidationError(
                "without --config, both --kind and --seed are required")
        config = config_from_dict({"kind": args.kind, "seed": args.seed})
    overrides = dict(
        kind=args.kind, seed=args.seed, samples=args.samples,
        workers=args.workers, n_cols=args.n_cols, alpha=args.alpha,
        variant=args.variant or None, path_grid=args.path_grid,
        output_path=args.out,
    )
    if args.dist is not None:
        overrides["distribution"] = _parse_dist(args.dist)
    if args.k_schedule is not None:
        overrides["k_schedule"] = [int(x) for x in args.k_schedule.split(",")]
    if args.quick:
        overrides["quick"] = True
    config = apply_overrides(config, **overrides)
    report = run_experiment(config)
    if config.output_path is not None:
        write_report(report, config.output_path)
        print(config.output_path)
    else:
        print(report.to_json())
    return 3 if report.invalid else 0


def _cmd_time_constant(args) -> int:
    record = {
        "kind": "time_constant",
        "seed": args.seed,
        "distribution": _parse_dist(args.dist),
        "variant": args.variant,
        "samples": args.replicates,
        "output_path": args.out,
    }
    if args.variant == "square":
        record["k_schedule"] = [int(x) for x in args.schedule.split(",")]
    else:
        record["n_cols"] = args.n_cols
        record["k_schedule"] = [args.k]
    config = config_from_dict(record)
    report = run_experiment(config)
    if config.output_path is not None:
        write_report(report, config.output_path)
        print(config.output_path)
    else:
        print(report.to_json())
    return 3 if report.invalid else 0


def _cmd_skorohod(args) -> int:
    record = {
        "kind": "skorohod_check",
        "seed": args.seed,
        "distribution": _parse_dist(args.target),
        "samples": args.samples,
        "dt": args.dt,
        "workers": args.workers,
        "output_path": args.out,
    }
    config = config_from_dict(record)
    report = run_experiment(config)
    if config.output_path is not None:
        write_report(report, config.output_path)
        print(config.output_path)
    else:
        print(report.to_json())
    return 3 if report.invalid else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lppsim",
        description="Passage-time simulation and edge-law numerics.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-lpp", help="sample passage times to CSV")
    p.add_argument("--dist", default="gaussian",
                   help="distribution name or JSON record")
    p.add_argument("--n-cols", type=int, required=True)
    p.add_argument("--n-rows", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--kind", choices=sorted(_PASSAGE), default="path-last")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sample_lpp)

    p = sub.add_parser("sample-gue", help="sample extreme eigenvalues to CSV")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--scaled", action="store_true",
                   help="add the edge-scaled column")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sample_gue)

    p = sub.add_parser("gamma", help="sup/inf path functionals of Brownian "
                                     "ensembles to CSV")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gamma)

    p = sub.add_parser("tw-table", help="emit the edge-law table as CSV")
    p.add_argument("--x-start", type=float, default=None)
    p.add_argument("--x-end", type=float, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_tw_table)

    p = sub.add_parser("ks", help="Kolmogorov-Smirnov test on CSV samples")
    p.add_argument("--mode", choices=("one", "two"), required=True)
    p.add_argument("--input", required=True, help="CSV of sample values")
    p.add_argument("--input-b", help="second CSV (two-sample mode)")
    p.add_argument("--cdf", choices=("tracy-widom", "normal"),
                   default="tracy-widom")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=_cmd_ks)

    p = sub.add_parser("experiment", help="run a configured experiment")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--kind")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--n-cols", type=int)
    p.add_argument("--k-schedule", help="comma-separated k values")
    p.add_argument("--dist", help="distribution name or JSON record")
    p.add_argument("--variant")
    p.add_argument("--path-grid", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--quick", action="store_true",
                   help="1/10 samples, flagged non-acceptance")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("time-constant", help="square or thin-rectangle "
                                             "constant estimation")
    p.add_argument("--dist", default="exponential",
                   help="distribution name or JSON record")
    p.add_argument("--variant", choices=("square", "thin"), default="square")
    p.add_argument("--schedule", default="500,1000,2000",
                   help="square variant: comma-separated n values")
    p.add_argument("--n-cols", type=int, default=100000,
                   help="thin variant: N")
    p.add_argument("--k", type=int, default=10, help="thin variant: k")
    p.add_argument("--replicates", type=int, default=50)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_time_constant)

    p = sub.add_parser("skorohod", help="embedding moment check")
    p.add_argument("--target", default="rademacher",
                   help="mean-zero atomic distribution name or JSON record")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_skorohod)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalConsistencyError as exc:
        print(f"numerical-consistency error: {exc}", file=sys.stderr)
        return 3
    except JobError as exc:
        cause_numerical = isinstance(exc.cause, NumericalConsistencyError)
        print(f"error: {exc}", file=sys.stderr)
        return 3 if cause_numerical else 2


if __name__ == "__main__":
    sys.exit(main())
