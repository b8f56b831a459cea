"""Empirical checks of the random-graph neighbourhood structure.

These measure, at finite n, the growth of iterated neighbourhoods, the
existence of vertex pairs far from a played set, the X/Y/Z/R split of the
vertex set around a pair, and the "niceness" condition that drives the
randomized phase strategies.  The asymptotic gauge functions are replaced by
finite-n surrogates (omega = d/log n, omega_hat = min(sqrt(omega), n/d^i));
they feed tolerances only, never correctness.
"""

import math
import random
from dataclasses import dataclass

import numpy as np

from .errors import GraphError
from .graphs import ball, check_connected, diameter
from .seeds import subseed


def effective_i(n, d):
    """Largest integer i >= 1 with d^i < n (finite-n stand-in for d^i = o(n))."""
    if d <= 1:
        raise GraphError(f"effective exponent needs d > 1, got d={d}")
    if d >= n:
        raise GraphError(f"effective exponent needs d < n, got d={d}, n={n}")
    i = 1
    while d ** (i + 1) < n:
        i += 1
    return i


def omega_surrogates(n, d, i):
    """(omega, omega_hat) = (d / log n, min(sqrt(omega), n / d^i))."""
    omega = d / math.log(n)
    omega_hat = min(math.sqrt(omega), n / d**i)
    return omega, omega_hat


@dataclass(frozen=True)
class RegimeParams:
    """Scale parameters of one random-graph regime."""

    n: int
    p: float
    d: float
    i: int
    omega: float
    omega_hat: float

    @classmethod
    def derive(cls, n, p):
        d = p * n
        i = effective_i(n, d)
        omega, omega_hat = omega_surrogates(n, d, i)
        return cls(n=n, p=p, d=d, i=i, omega=omega, omega_hat=omega_hat)


@dataclass(frozen=True)
class SphereGrowthReport:
    z: int
    i: int
    sphere_size: int
    ball_size: int
    reference: float
    sphere_ratio: float
    ball_ratio: float


def sphere_growth(g, zset, i, d):
    """Sizes of the i-sphere and i-ball around `zset`, against the d^i |Z| law."""
    zs = frozenset(zset)
    b_i = ball(g, zs, i)
    b_prev = ball(g, zs, i - 1) if i >= 1 else frozenset()
    sphere_size = len(b_i) - len(b_prev)
    ref = (d**i) * len(zs)
    return SphereGrowthReport(
        z=len(zs),
        i=i,
        sphere_size=sphere_size,
        ball_size=len(b_i),
        reference=ref,
        sphere_ratio=sphere_size / ref if ref > 0 else float("nan"),
        ball_ratio=len(b_i) / ref if ref > 0 else float("nan"),
    )


def far_pair_exists(g, zset, i):
    """True iff at least two vertices lie at distance >= i+1 from `zset`."""
    return len(ball(g, zset, i)) <= g.n - 2


@dataclass(frozen=True)
class LowerBoundCertificate:
    i: int
    k: int
    trials: int
    far_pair_hits: int
    certified: bool
    seed: int


def _sample_far_pairs(g, i, k, trials, seed):
    hits = 0
    verts = range(g.n)
    for t in range(trials):
        rng = random.Random(subseed(seed, "lower-bound", k, t))
        zset = rng.sample(verts, 2 * k)
        if far_pair_exists(g, zset, i):
            hits += 1
    return hits


def lower_bound_certificate(g, i, k=None, trials=100, seed=0):
    """Sampled certificate that k rounds cannot end the pair game.

    Any k rounds name at most 2k vertices; if two vertices sit at distance
    i+1 from all of them and the diameter is i+1, both stay compatible with
    every reply, so the game value exceeds k.  With `k` given, samples
    `trials` many 2k-subsets and reports how many leave such a far pair
    (certified only if all do).  With k=None, searches for the largest k whose
    sampled subsets all leave a far pair.
    """
    check_connected(g)
    diam = diameter(g)
    if diam != i + 1:
        raise GraphError(f"certificate needs diameter == i+1 = {i + 1}, measured {diam}")
    if k is not None:
        if k == 0:
            return LowerBoundCertificate(i, 0, trials, trials, True, seed)
        hits = _sample_far_pairs(g, i, k, trials, seed)
        return LowerBoundCertificate(i, k, trials, hits, hits == trials, seed)

    def all_pass(kk):
        return _sample_far_pairs(g, i, kk, trials, seed) == trials

    # doubling then bisection on the sampled predicate
    lo = 0
    hi = 1
    cap = g.n // 2
    while hi <= cap and all_pass(hi):
        lo = hi
        hi *= 2
    hi = min(hi, cap + 1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if all_pass(mid):
            lo = mid
        else:
            hi = mid
    hits = _sample_far_pairs(g, i, lo, trials, seed) if lo > 0 else trials
    return LowerBoundCertificate(i, lo, trials, hits, True, seed)


@dataclass(frozen=True)
class PairPartition:
    """Split of V around a pair (x, y) at radius i."""

    X: frozenset
    Y: frozenset
    Z: frozenset
    R: frozenset


@dataclass(frozen=True)
class PairPartitionReport:
    partition: PairPartition
    x_ratio: float
    y_ratio: float
    z_fraction: float
    r_ratio: float
    mean_neighbors_in_r: float
    mean_neighbors_in_x: float
    mean_neighbors_in_y: float


def pair_partition(g, x, y, i, d=None, cross_degrees=False, sample=64, seed=0):
    """Compute X / Y / Z / R for the pair (x, y) at radius i, with size ratios.

    X is the i-sphere of x outside the i-ball of y (Y symmetric), Z is
    everything outside both balls, R the remainder.  Ratios compare |X|, |Y|,
    |R| to d^i and |Z| to n.  With cross_degrees=True, also samples vertices
    of X+Y+Z and averages their neighbour counts inside R, X, and Y.
    """
    if x == y:
        raise GraphError("pair_partition needs two distinct vertices")
    check_connected(g)
    rx = g.oracle.row(x)
    ry = g.oracle.row(y)
    in_x = (rx == i) & (ry > i)
    in_y = (ry == i) & (rx > i)
    in_z = (rx > i) & (ry > i)
    in_r = ~(in_x | in_y | in_z)
    part = PairPartition(
        X=frozenset(np.flatnonzero(in_x).tolist()),
        Y=frozenset(np.flatnonzero(in_y).tolist()),
        Z=frozenset(np.flatnonzero(in_z).tolist()),
        R=frozenset(np.flatnonzero(in_r).tolist()),
    )
    if d is None:
        d = 2 * g.m / g.n
    ref = d**i
    mean_r = mean_x = mean_y = float("nan")
    if cross_degrees:
        pool = sorted(part.X | part.Y | part.Z)
        rng = random.Random(subseed(seed, "cross", x, y))
        picks = pool if len(pool) <= sample else rng.sample(pool, sample)
        if picks:
            r_counts, x_counts, y_counts = [], [], []
            for v in picks:
                nbrs = g.adj[v]
                r_counts.append(sum(1 for w in nbrs if w in part.R))
                x_counts.append(sum(1 for w in nbrs if w in part.X))
                y_counts.append(sum(1 for w in nbrs if w in part.Y))
            mean_r = sum(r_counts) / len(picks)
            mean_x = sum(x_counts) / len(picks)
            mean_y = sum(y_counts) / len(picks)
    return PairPartitionReport(
        partition=part,
        x_ratio=len(part.X) / ref,
        y_ratio=len(part.Y) / ref,
        z_fraction=len(part.Z) / g.n,
        r_ratio=len(part.R) / ref,
        mean_neighbors_in_r=mean_r,
        mean_neighbors_in_x=mean_x,
        mean_neighbors_in_y=mean_y,
    )


@dataclass(frozen=True)
class NicenessReport:
    pairs_checked: int
    pairs_ok: int
    fraction_ok: float
    tolerance: float
    min_fraction: float
    nice: bool
    seed: int


def niceness_check(g, i, d, pairs=100, tolerance=0.2, min_fraction=0.95, seed=0, expected_ratio=1.0):
    """Sampled check of the two sphere conditions behind the phase strategies.

    A pair (x, y) passes when |N_i(x) \\ N_<=i(y)| is within (1 +- tolerance)
    of expected_ratio * d^i in both orientations and |N_<=i(x) & N_<=i(y)| <=
    tolerance * d^i.  The asymptotic statement has expected_ratio -> 1; at
    non-vanishing density the first-order level for i=1 is 1-p (the other
    ball excludes a p-fraction of the sphere), which callers pass explicitly.
    """
    check_connected(g)
    ref = d**i
    level = expected_ratio * ref
    rng = random.Random(subseed(seed, "nice", i))
    ok = 0
    for _ in range(pairs):
        x = rng.randrange(g.n)
        y = rng.randrange(g.n - 1)
        if y >= x:
            y += 1
        rx = g.oracle.row(x)
        ry = g.oracle.row(y)
        x_side = int(((rx == i) & (ry > i)).sum())
        y_side = int(((ry == i) & (rx > i)).sum())
        overlap = int(((rx <= i) & (ry <= i)).sum())
        if (
            abs(x_side - level) <= tolerance * ref
            and abs(y_side - level) <= tolerance * ref
            and overlap <= tolerance * ref
        ):
            ok += 1
    frac = ok / pairs if pairs else 0.0
    return NicenessReport(
        pairs_checked=pairs,
        pairs_ok=ok,
        fraction_ok=frac,
        tolerance=tolerance,
        min_fraction=min_fraction,
        nice=frac >= min_fraction,
        seed=seed,
    )


EXPANSION_SCHEMA = "expansion-v1"


def report_csv_header():
    return f"# schema: {EXPANSION_SCHEMA}\ncheck,params,observed,reference,ratio,passed\n"


def report_csv_row(check, params, observed, reference, ratio, passed):
    return f"{check},{params},{observed:.6g},{reference:.6g},{ratio:.6g},{int(passed)}\n"
