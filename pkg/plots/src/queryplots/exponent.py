"""Empirical scaling-exponent chart from sweep CSV output.

For each xi the median round count per n gives an empirical exponent
log(median) / log(n); the theoretical overlay is the piecewise-linear
1 - i*xi with i the effective exponent recomputed from each row's (n, d).
"""

import argparse
import math
import statistics
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .rows import RowError, effective_exponent, read_sweep_rows


def theoretical_exponent(xi, i):
    return 1 - i * xi


def empirical_points(rows):
    """[(xi, n, log(median rounds)/log n, i)] with one point per (xi, n) cell."""
    cells = defaultdict(list)
    for r in rows:
        cells[(r.xi, r.n, r.i)].append(r.rounds)
    pts = []
    for (xi, n, i), vals in sorted(cells.items()):
        med = statistics.median(vals)
        pts.append((xi, n, math.log(med) / math.log(n), i))
    return pts


def plot_exponent(csv_text, out_path):
    rows = read_sweep_rows(csv_text)
    xis = sorted({r.xi for r in rows})
    if len(xis) < 2:
        raise RowError("need at least 2 distinct xi values to plot an exponent trend")
    for r in rows:
        derived = effective_exponent(r.n, r.d)
        if derived != r.i:
            raise RowError(f"row with n={r.n}, d={r.d} claims i={r.i}, derived {derived}")

    pts = empirical_points(rows)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    sizes = sorted({n for _, n, _, _ in pts})
    markers = "os^Dv<>"
    for mi, n in enumerate(sizes):
        xs = [xi for xi, nn, _, _ in pts if nn == n]
        ys = [y for _, nn, y, _ in pts if nn == n]
        ax.scatter(xs, ys, label=f"n = {n}", marker=markers[mi % len(markers)], alpha=0.85)

    for i in sorted({i for _, _, _, i in pts}):
        lo = max(min(xis) - 0.02, 1 / (i + 1))
        hi = min(max(xis) + 0.02, 1 / i if i > 0 else 1.0)
        grid = [lo + (hi - lo) * t / 50 for t in range(51)]
        ax.plot(
            grid,
            [theoretical_exponent(x, i) for x in grid],
            "k--",
            linewidth=1.2,
            label=f"1 - {i}x",
        )

    ax.set_xlabel("degree exponent xi (d = n^xi)")
    ax.set_ylabel("empirical exponent log(median rounds) / log n")
    ax.set_title("Rounds-to-locate scaling vs degree exponent")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return pts


def main(argv=None):
    ap = argparse.ArgumentParser(prog="queryplots-exponent")
    ap.add_argument("--in", dest="inp", required=True, help="sweep CSV path")
    ap.add_argument("--out", required=True, help="output image path")
    args = ap.parse_args(argv)
    try:
        with open(args.inp, encoding="utf-8") as f:
            plot_exponent(f.read(), args.out)
    except (RowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
