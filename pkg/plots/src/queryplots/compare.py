"""Strategy-performance boxplots from simulate CSV output."""

import argparse
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .rows import RowError, read_simulate_rows


def rounds_by_strategy(rows):
    grouped = defaultdict(list)
    for r in rows:
        grouped[r.strategy].append(r.rounds)
    return dict(sorted(grouped.items()))


def plot_strategy_comparison(csv_texts, out_path):
    """csv_texts: one or more simulate CSV contents (e.g. one per strategy)."""
    grouped = defaultdict(list)
    for text in csv_texts:
        for name, vals in rounds_by_strategy(read_simulate_rows(text)).items():
            grouped[name].extend(vals)
    names = sorted(grouped)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.boxplot([grouped[name] for name in names], tick_labels=names)
    ax.set_ylabel("rounds used")
    ax.set_title("Rounds to locate the target, per strategy")
    ax.grid(alpha=0.3, axis="y")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return {name: grouped[name] for name in names}


def main(argv=None):
    ap = argparse.ArgumentParser(prog="queryplots-compare")
    ap.add_argument(
        "--in", dest="inp", required=True, nargs="+", help="simulate CSV path(s)"
    )
    ap.add_argument("--out", required=True, help="output image path")
    args = ap.parse_args(argv)
    try:
        texts = []
        for path in args.inp:
            with open(path, encoding="utf-8") as f:
                texts.append(f.read())
        plot_strategy_comparison(texts, args.out)
    except (RowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
