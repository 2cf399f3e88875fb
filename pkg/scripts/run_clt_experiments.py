"""Run the full experiment battery and persist JSON reports.

Presets mirror the acceptance-scale configurations: the sup-functional
vs GUE-edge comparison at three path grids, the scaled-edge table
check, the five passage-time CLT runs, the time-constant series, and
the embedding moment check.  Reports and their CSV side files land in
--output-dir; --quick cuts sample counts to a tenth and flags every
report non-acceptance.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from lppsim.config import config_from_dict
from lppsim.errors import ValidationError
from lppsim.experiments import run_experiment, write_report

PRESETS = [
    ("gamma_m256", {"kind": "gamma_transform", "k_schedule": [2, 5, 10],
                    "samples": 10_000, "path_grid": 256}),
    ("gamma_m512", {"kind": "gamma_transform", "k_schedule": [2, 5, 10],
                    "samples": 10_000, "path_grid": 512}),
    ("gamma_m1024", {"kind": "gamma_transform", "k_schedule": [2, 5, 10],
                     "samples": 10_000, "path_grid": 1024}),
    ("gue_edge", {"kind": "gue_edge", "k_schedule": [10, 50, 200],
                  "samples": 10_000}),
    ("clt_exp_last", {"kind": "clt_corollary", "n_cols": 5000,
                      "k_schedule": [6], "samples": 4000, "variant": "last",
                      "distribution": {"type": "exponential", "rate": 1.0}}),
    ("clt_exp_first", {"kind": "clt_corollary", "n_cols": 5000,
                       "k_schedule": [6], "samples": 4000,
                       "variant": "first",
                       "distribution": {"type": "exponential",
                                        "rate": 1.0}}),
    ("clt_rademacher", {"kind": "clt_corollary", "n_cols": 5000,
                        "k_schedule": [6], "samples": 4000,
                        "variant": "last",
                        "distribution": {"type": "rademacher"}}),
    ("clt_geometric", {"kind": "clt_corollary", "n_cols": 5000,
                       "k_schedule": [6], "samples": 4000,
                       "variant": "last",
                       "distribution": {"type": "geometric", "q": 0.5}}),
    ("clt_theorem_form", {"kind": "clt_theorem_form", "n_cols": 20_000,
                          "k_schedule": [10], "samples": 4000}),
    ("tc_exp_square", {"kind": "time_constant", "variant": "square",
                       "distribution": {"type": "exponential", "rate": 1.0},
                       "k_schedule": [500, 1000, 2000, 4000],
                       "samples": 50}),
    ("tc_geo_square", {"kind": "time_constant", "variant": "square",
                       "distribution": {"type": "geometric", "q": 0.25},
                       "k_schedule": [500, 1000, 2000, 4000],
                       "samples": 50}),
    ("tc_thin", {"kind": "time_constant", "variant": "thin",
                 "n_cols": 100_000, "k_schedule": [10], "samples": 100}),
    ("tw_table", {"kind": "tw_table"}),
    ("skorohod", {"kind": "skorohod_check", "samples": 100_000,
                  "distribution": {"type": "rademacher"}}),
]


def _headline(results: dict) -> str:
    if "per_k" in results:
        return " ".join(
            f"k={e['k']}:KS={e['ks']['statistic']:.4f}"
            for e in results["per_k"])
    if results.get("variant") == "square":
        return (f"extrapolated={results['extrapolated']:.4f} "
                f"predicted={results['predicted']}")
    if results.get("variant") == "thin":
        return (f"statistic={results['points'][0]['mean_ratio']:.4f} "
                f"predicted={results['predicted']}")
    if "tau_summary" in results:
        return (f"E_tau={results['tau_summary']['mean']:.5f} "
                f"E_tau_sq={results['tau_sq_summary']['mean']:.4f}")
    if "mean" in results:
        return f"mean={results['mean']:.6f} variance={results['variance']:.6f}"
    return ""


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output-dir", default="results")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--quick", action="store_true")
    parser.add_argument("--only", default="",
                        help="run only presets whose name contains this")
    args = parser.parse_args()

    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, record in PRESETS:
        if args.only and args.only not in name:
            continue
        path = out_dir / f"{name}.json"
        config = config_from_dict(dict(
            record, seed=args.seed, workers=args.workers, quick=args.quick,
            output_path=str(path)))
        t0 = time.time()
        try:
            report = run_experiment(config)
        except ValidationError as exc:
            # --quick can push replicate counts under the library floor
            print(f"{name:18s} skipped   {exc}")
            continue
        write_report(report, str(path))
        status = "INVALID" if report.invalid else "ok"
        print(f"{name:18s} {status:8s} {time.time() - t0:7.1f}s  "
              f"{_headline(report.results)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
