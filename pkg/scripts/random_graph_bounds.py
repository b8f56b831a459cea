#!/usr/bin/env python3
"""Validate the random-graph round bounds on a diameter-2 ensemble.

Samples G(n, d/n) until the diameter is 2, then runs the randomized phase
strategies against the halving adversary and samples the played-set
far-pair certificate.

Usage:
    python scripts/random_graph_bounds.py [--n 2000] [--d 204] [--trials 100]
"""

import argparse
import math
import sys

from querygames.engine import QueryKind
from querygames.expansion import lower_bound_certificate
from querygames.graphs import GnpParams, diameter, is_connected, sample_gnp
from querygames.seeds import subseed
from querygames.strategies import (
    HalvingAdversary,
    PhaseConfig,
    PhaseEdge,
    PhasePair,
    run_trials,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--d", type=float, default=204.0)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--b", type=float, default=4.0)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    g = None
    for attempt in range(100):
        cand = sample_gnp(
            GnpParams(n=args.n, p=args.d / args.n, seed=subseed(args.seed, "g", attempt))
        )
        if is_connected(cand) and diameter(cand) == 2:
            g = cand
            break
    if g is None:
        print("no diameter-2 sample found", file=sys.stderr)
        return 1

    cfg = PhaseConfig.derive(args.n, args.d, b=args.b)
    print(f"n={args.n} d={args.d}: {cfg.phases} phases x {cfg.rounds_per_phase} rounds "
          f"= budget {cfg.budget}")
    for name, kind, cls in (
        ("phase-pair", QueryKind.PAIR, PhasePair),
        ("phase-edge", QueryKind.EDGE, PhaseEdge),
    ):
        out = run_trials(
            g, kind, lambda s, c=cls: c(g, cfg, s), lambda s: HalvingAdversary(g),
            trials=args.trials, root_seed=subseed(args.seed, name),
        )
        wins = sum(o.success for o in out)
        med = sorted(o.rounds for o in out)[len(out) // 2]
        print(f"{name}: {wins}/{args.trials} located within budget, median rounds {med}")

    k = int((args.n / (4 * args.d)) * math.log(args.d))
    cert = lower_bound_certificate(g, i=1, k=k, trials=args.trials, seed=args.seed)
    print(
        f"far-pair certificate: {cert.far_pair_hits}/{cert.trials} sampled 2k-subsets "
        f"(k={k}) leave two far vertices, so those plays cannot end within {k} rounds"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
