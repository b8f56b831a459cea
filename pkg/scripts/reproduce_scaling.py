#!/usr/bin/env python3
"""Reproduce the scaling experiment: median rounds vs n across degree exponents.

Runs the sweep grid, writes the CSV, and prints the fitted exponent per xi
next to the predicted 1 - xi (first regime).  Pair with queryplots-exponent
to render the chart from the CSV.

Usage:
    python scripts/reproduce_scaling.py [--out sweep.csv] [--trials 25] [--jobs 4]
"""

import argparse
import math
import statistics
import sys
from collections import defaultdict

from querygames.cli import main as cli_main


def fitted_slopes(csv_path):
    rounds = defaultdict(list)
    with open(csv_path, encoding="utf-8") as f:
        for line in f.read().splitlines()[2:]:
            xi, n, d, i, trial, seed, budget, r, success = line.split(",")
            rounds[(float(xi), int(n))].append(int(r))
    slopes = {}
    for xi in sorted({k[0] for k in rounds}):
        ns = sorted({k[1] for k in rounds if k[0] == xi})
        pts = [(math.log(n), math.log(statistics.median(rounds[(xi, n)]))) for n in ns]
        xb = sum(x for x, _ in pts) / len(pts)
        yb = sum(y for _, y in pts) / len(pts)
        slopes[xi] = sum((x - xb) * (y - yb) for x, y in pts) / sum(
            (x - xb) ** 2 for x, _ in pts
        )
    return slopes


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--xi", default="0.55,0.6,0.7")
    ap.add_argument("--n", default="1000,2000,4000")
    ap.add_argument("--trials", type=int, default=25)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--jobs", type=int, default=4)
    ap.add_argument("--out", default="sweep.csv")
    args = ap.parse_args()
    rc = cli_main(
        [
            "sweep", "--xi", args.xi, "--n", args.n,
            "--trials", str(args.trials), "--seed", str(args.seed),
            "--jobs", str(args.jobs), "--out", args.out,
        ]
    )
    if rc != 0:
        return rc
    print(f"wrote {args.out}")
    for xi, slope in fitted_slopes(args.out).items():
        print(f"xi={xi}: fitted exponent {slope:.3f}  (predicted {1 - xi:.3f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
