#!/usr/bin/env python3
"""Emit ground-state profile and relaxation-trace plot data as CSV files.

Covers the geometries used throughout the tests: the interval of length 2,
the single-loop flower (stem 0.8, loop 1.5) and the two-loop flower
(stem 0.51, loops 1.6 and 1.0).  For each one the exact profile CSV
(edge_id, x, u) and a JSON summary are written; the single-loop flower also
gets an energy-descent trace (t, H, sup_norm) from a constant initial state.
No plotting here; point any plotting tool at the CSVs.

Usage: python3 scripts/profile_figure_data.py [--outdir figure_data]
"""

import argparse
import pathlib

from fkpp_graphs.cli import main

CASES = [
    ("interval", ["stem=2.0"]),
    ("single_loop", ["stem=0.8", "loops=1.5"]),
    ("two_loop", ["stem=0.51", "loops=1.6,1.0"]),
]


def fkpp(argv):
    rc = main(argv)
    if rc:
        raise SystemExit(rc)


def run():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="figure_data", type=pathlib.Path)
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    for name, flower in CASES:
        summary = args.outdir / f"groundstate_{name}.json"
        profile = args.outdir / f"groundstate_{name}_profile.csv"
        fkpp(["groundstate", "--flower", *flower,
              "--out", str(summary), "--profile", str(profile)])
        print(f"wrote {summary} and {profile}")

    trace = args.outdir / "relaxation_single_loop_trace.csv"
    fkpp(["evolve", "--flower", "stem=0.8", "loops=1.5",
          "--mesh", "0.005", "--initial", "const:0.5",
          "--trace", str(trace), "--out", str(args.outdir / "relaxation_single_loop.json")])
    print(f"wrote {trace}")


if __name__ == "__main__":
    run()
