#!/usr/bin/env python3
"""Rebuild the tabulated edge-law CDF and refresh the golden CSV fixture.

The table build is fully deterministic, so the fixture is byte-compared
in the test suite; run this only when the table parameters change on
purpose, and commit the regenerated file together with that change.
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from lppsim.tracy_widom import build_tw_table, table_mean_variance, write_tw_table_csv

DEFAULT_OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data" / "tw_table_golden.csv"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", type=pathlib.Path, default=DEFAULT_OUT)
    parser.add_argument("--x-start", type=float, default=9.0)
    parser.add_argument("--x-end", type=float, default=-10.0)
    args = parser.parse_args()

    table = build_tw_table(x_start=args.x_start, x_end=args.x_end)
    args.output.parent.mkdir(parents=True, exist_ok=True)
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        write_tw_table_csv(table, fh)
    mean, var = table_mean_variance(table)
    print(f"wrote {args.output} ({table.grid.size} rows)")
    print(f"distribution mean {mean:.12f} variance {var:.12f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
