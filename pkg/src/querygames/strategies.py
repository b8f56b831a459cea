"""Algorithm and adversary strategies, plus worst-case certification.

Every strategy is a per-playout state machine with hashable states (see
engine.py for the protocol).  Randomized strategies derive each draw from a
named sub-seed of their root seed, which fixes the whole random tape up
front: the same seed always yields the same transcript, and the certifier
can treat the strategy as deterministic.
"""

import math
import random
from dataclasses import dataclass

import numpy as np

from .engine import CandidateSet, Query, QueryKind, Side, partition, play, validate_query
from .errors import (
    BudgetExceededError,
    GraphError,
    QueryError,
    ResourceLimitError,
    StrategyError,
)
from .expansion import effective_i
from .graphs import ceil_log2, check_connected
from .seeds import subseed


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class PhaseConfig:
    """Budget arithmetic of the randomized phase strategies.

    A run consists of `phases` independent phases; each phase consumes a
    sequence of `seq_len` random vertices and lasts seq_len - 1 rounds (the
    first round of a phase uses two sequence slots).  Natural logs throughout;
    integer quantities round up, which preserves the upper-bound direction.
    """

    b: float
    d: float
    i: int
    phases: int
    seq_len: int

    def __post_init__(self):
        if self.b <= 1:
            raise ValueError(f"b must be > 1, got {self.b}")
        if self.phases < 1 or self.seq_len < 2:
            raise ValueError("phases must be >= 1 and seq_len >= 2")

    @property
    def a(self):
        return 2.0 / (self.b - 1.0)

    @property
    def rounds_per_phase(self):
        return self.seq_len - 1

    @property
    def budget(self):
        return self.phases * self.rounds_per_phase

    @classmethod
    def derive(cls, n, d, b=4.0, i=None):
        if b <= 1:
            raise ValueError(f"b must be > 1, got {b}")
        if i is None:
            i = effective_i(n, d)
        a = 2.0 / (b - 1.0)
        phases = max(1, math.ceil(a * math.log(n)))
        seq_len = math.ceil(b * n / d**i) + 1
        return cls(b=b, d=d, i=i, phases=phases, seq_len=seq_len)


@dataclass(frozen=True)
class StrategyOutcome:
    rounds: int
    success: bool
    sizes: tuple
    seed: int


# ---------------------------------------------------------------------------
# algorithm strategies


class _Stateless:
    def start(self, cands0):
        return None

    def advance(self, state, cands, query, side, new_cands):
        return None


def _two_smallest(cands):
    it = iter(cands)  # CandidateSet iterates in sorted order
    return next(it), next(it)


def _first_edge_toward(g, x, y):
    """First edge (x, z) of a shortest x-y path; z is the smallest such neighbor."""
    dy = g.oracle.row(y)
    target = dy[x] - 1
    for w in g.adj[x]:
        if dy[w] == target:
            return w
    raise GraphError(f"no shortest-path step from {x} toward {y}")


class SpElimination(_Stateless):
    """Eliminate at least one candidate per round.

    Picks the two smallest candidates x, y and queries the first edge of a
    shortest x-y path; either reply rules out x or y, so at most |S| - 1
    rounds are ever needed.
    """

    kind = QueryKind.EDGE

    def __init__(self, g):
        check_connected(g)
        self.g = g
        self.default_budget = g.n - 1

    def next_query(self, state, cands):
        x, y = _two_smallest(cands)
        z = _first_edge_toward(self.g, x, y)
        return Query(x, z, QueryKind.EDGE)


class PathBisect(_Stateless):
    """Binary search with edge queries; only valid on path graphs."""

    kind = QueryKind.EDGE

    def __init__(self, g):
        check_connected(g)
        degs = [g.degree(u) for u in range(g.n)]
        is_path = (
            g.n >= 2
            and g.m == g.n - 1
            and max(degs) <= 2
            and sum(1 for d in degs if d == 1) == 2
        )
        if not is_path:
            raise GraphError("path bisection needs a path graph")
        start = min(u for u in range(g.n) if degs[u] == 1)
        order = [start]
        prev = -1
        while len(order) < g.n:
            u = order[-1]
            nxt = [w for w in g.adj[u] if w != prev]
            prev = u
            order.append(nxt[0])
        self.order = order
        self.pos = {v: idx for idx, v in enumerate(order)}
        self.g = g
        self.default_budget = ceil_log2(g.n)

    def next_query(self, state, cands):
        ps = [self.pos[c] for c in cands]
        lo, hi = min(ps), max(ps)
        mid = (lo + hi) // 2
        return Query(self.order[mid], self.order[mid + 1], QueryKind.EDGE)


class GkDescent:
    """Locate a target on the separation graph in at most 2k pair queries.

    Phase one walks down the underlying tree: each round queries the two
    children of the current node and descends to the replied child, cutting
    away the sibling subtree.  After k rounds the candidates lie on one
    root-to-leaf chain, and phase two eliminates them one per round.
    """

    kind = QueryKind.PAIR

    def __init__(self, g):
        check_connected(g)
        k = (g.n + 1).bit_length() - 2
        if 2 ** (k + 1) - 1 != g.n or k < 1:
            raise GraphError(f"vertex count {g.n} does not match a separation graph")
        by_coord = {}
        for vid in range(g.n):
            lab = g.labels.get(vid)
            if lab is None:
                raise GraphError(f"vertex {vid} is missing its level:index label")
            level_s, _, idx_s = lab.partition(":")
            by_coord[(int(level_s), int(idx_s))] = vid
        if len(by_coord) != g.n:
            raise GraphError("level:index labels are not unique")
        self.g = g
        self.k = k
        self.coord = {v: c for c, v in by_coord.items()}
        self.children = {
            by_coord[(j, i)]: (by_coord[(j + 1, 2 * i)], by_coord[(j + 1, 2 * i + 1)])
            for j in range(k)
            for i in range(2**j)
        }
        self.root = by_coord[(0, 0)]
        self.default_budget = 2 * k

    def start(self, cands0):
        return ("descend", self.root)

    def next_query(self, state, cands):
        if state[0] == "descend":
            c1, c2 = self.children[state[1]]
            return Query(c1, c2, QueryKind.PAIR)
        x, y = _two_smallest(cands)
        z = _first_edge_toward(self.g, x, y)
        return Query(x, z, QueryKind.PAIR)

    def advance(self, state, cands, query, side, new_cands):
        if state[0] != "descend":
            return state
        child = query.endpoint(side)
        if self.coord[child][0] == self.k:
            return ("sweep",)
        return ("descend", child)


def _draw(seed, *label):
    return random.Random(subseed(seed, *label))


def _uniform_other(rng, n, avoid):
    """Uniform vertex from V minus {avoid}."""
    raw = rng.randrange(n - 1)
    return raw + 1 if raw >= avoid else raw


class PhasePair:
    """Randomized phase strategy with pair queries.

    Each phase draws a fresh uniform vertex sequence; round one of a phase
    queries the first two entries, and every later round pairs the previous
    reply with the next entry.  State is (phase, next slot, carried vertex).
    """

    kind = QueryKind.PAIR

    def __init__(self, g, cfg, seed):
        check_connected(g)
        self.g = g
        self.cfg = cfg
        self.seed = seed
        self.default_budget = cfg.budget

    def start(self, cands0):
        return (0, 0, -1)

    def _fresh(self, phase, slot, avoid):
        rng = _draw(self.seed, "phase", phase, slot)
        if avoid < 0:
            return rng.randrange(self.g.n)
        return _uniform_other(rng, self.g.n, avoid)

    def next_query(self, state, cands):
        phase, slot, prev = state
        if slot == 0:
            u = self._fresh(phase, 0, -1)
            v = self._fresh(phase, 1, u)
        else:
            u = prev
            v = self._fresh(phase, slot, u)
        return Query(u, v, QueryKind.PAIR)

    def advance(self, state, cands, query, side, new_cands):
        phase, slot, _ = state
        nxt = 2 if slot == 0 else slot + 1
        if nxt >= self.cfg.seq_len:
            return (phase + 1, 0, -1)
        return (phase, nxt, query.endpoint(side))


class PhaseEdge:
    """Phase strategy restricted to edge queries.

    Round one of a phase queries a uniform random vertex together with a
    uniform random neighbour of it; later rounds pair the previous reply with
    a uniform random neighbour of that reply.
    """

    kind = QueryKind.EDGE

    def __init__(self, g, cfg, seed):
        check_connected(g)
        if g.n < 2:
            raise GraphError("phase strategy needs n >= 2")
        self.g = g
        self.cfg = cfg
        self.seed = seed
        self.default_budget = cfg.budget

    def start(self, cands0):
        return (0, 0, -1)

    def next_query(self, state, cands):
        phase, slot, prev = state
        if slot == 0:
            rng = _draw(self.seed, "phase", phase, 0)
            u = rng.randrange(self.g.n)
        else:
            rng = _draw(self.seed, "phase", phase, slot)
            u = prev
        nbrs = self.g.adj[u]
        v = nbrs[rng.randrange(len(nbrs))]
        return Query(u, v, QueryKind.EDGE)

    def advance(self, state, cands, query, side, new_cands):
        phase, slot, _ = state
        nxt = 2 if slot == 0 else slot + 1
        if nxt >= self.cfg.seq_len:
            return (phase + 1, 0, -1)
        return (phase, nxt, query.endpoint(side))


class DenseEdge:
    """Fully random edge queries for constant edge probability p.

    Each round independently picks a uniform vertex and a uniform neighbour
    of it; the natural budget is ceil(3 / (p^2 (1-p)^2) * log n) rounds.
    """

    kind = QueryKind.EDGE

    def __init__(self, g, p, seed):
        check_connected(g)
        if not 0.0 < p < 1.0:
            raise ValueError(f"density must be strictly inside (0, 1), got {p}")
        if g.n < 2:
            raise GraphError("dense strategy needs n >= 2")
        self.g = g
        self.p = p
        self.seed = seed
        self.default_budget = math.ceil(3.0 / (p**2 * (1 - p) ** 2) * math.log(g.n))

    def start(self, cands0):
        return 0

    def next_query(self, state, cands):
        rng = _draw(self.seed, "dense", state)
        u = rng.randrange(self.g.n)
        nbrs = self.g.adj[u]
        v = nbrs[rng.randrange(len(nbrs))]
        return Query(u, v, QueryKind.EDGE)

    def advance(self, state, cands, query, side, new_cands):
        return state + 1


class RandomQueries:
    """Uniform random queries each round (baseline for strategy suites)."""

    def __init__(self, g, kind, seed):
        check_connected(g)
        self.g = g
        self.kind = kind
        self.seed = seed
        self.default_budget = None

    def start(self, cands0):
        return 0

    def next_query(self, state, cands):
        rng = _draw(self.seed, "rand", state)
        u = rng.randrange(self.g.n)
        if self.kind is QueryKind.EDGE:
            nbrs = self.g.adj[u]
            v = nbrs[rng.randrange(len(nbrs))]
            return Query(u, v, QueryKind.EDGE)
        v = _uniform_other(rng, self.g.n, u)
        return Query(u, v, QueryKind.PAIR)

    def advance(self, state, cands, query, side, new_cands):
        return state + 1


class GreedySplit(_Stateless):
    """Myopic heuristic: query whose worse reply keeps the fewest candidates.

    Evaluates every admissible query against the current candidate set using
    a full distance matrix, so it is capped to moderately sized graphs.  Ties
    break to the lexicographically smallest pair.
    """

    def __init__(self, g, kind, max_vertices=2048):
        check_connected(g)
        if g.n > max_vertices:
            raise ResourceLimitError(
                f"greedy-split needs a full distance matrix; n={g.n} is over the "
                f"cap of {max_vertices}"
            )
        self.g = g
        self.kind = kind
        self.default_budget = None
        self._dist = np.vstack([g.oracle.row(s) for s in range(g.n)]).astype(np.int16)
        if kind is QueryKind.EDGE:
            es = list(g.edges())
            self._eu = np.array([e[0] for e in es], dtype=np.int64)
            self._ev = np.array([e[1] for e in es], dtype=np.int64)

    def next_query(self, state, cands):
        idx = cands.array
        c = len(idx)
        dc = self._dist[:, idx]
        if self.kind is QueryKind.EDGE:
            du = dc[self._eu]
            dv = dc[self._ev]
            keep_u = (du <= dv).sum(axis=1)
            keep_v = (dv <= du).sum(axis=1)
            worse = np.maximum(keep_u, keep_v)
            worse[(keep_u == c) | (keep_v == c)] = c + 1
            best = int(np.argmin(worse))
            if worse[best] > c:
                raise StrategyError("greedy-split found no progress edge query")
            return Query(int(self._eu[best]), int(self._ev[best]), QueryKind.EDGE)
        n = self.g.n
        if n <= 256:
            le = (dc[:, None, :] <= dc[None, :, :]).sum(axis=2)
            lt = (dc[:, None, :] < dc[None, :, :]).sum(axis=2)
        else:
            # count comparisons via one matmul per distance value; distances
            # are tiny integers so this stays a handful of BLAS calls
            le = np.zeros((n, n), dtype=np.float32)
            lt = np.zeros((n, n), dtype=np.float32)
            for t in range(int(dc.max()) + 1):
                p_t = (dc == t).astype(np.float32)
                ge_t = (dc >= t).astype(np.float32)
                gt_t = (dc > t).astype(np.float32)
                le += p_t @ ge_t.T
                lt += p_t @ gt_t.T
        keep_u = le
        keep_v = c - lt
        worse = np.maximum(keep_u, keep_v)
        worse[(keep_u >= c) | (keep_v >= c)] = c + 1
        iu = np.triu_indices(n, k=1)
        flat = worse[iu]
        pos = int(np.argmin(flat))
        if flat[pos] > c:
            raise StrategyError("greedy-split found no progress pair query")
        return Query(int(iu[0][pos]), int(iu[1][pos]), QueryKind.PAIR)


class FinishGreedy:
    """Wrapper: run the inner strategy for its own budget, then fall back to
    one-per-round elimination until located."""

    def __init__(self, inner, g):
        self.inner = inner
        self.g = g
        self.kind = inner.kind
        base = inner.default_budget or 0
        self.switch_after = base
        self.default_budget = base + g.n - 1

    def start(self, cands0):
        return (0, self.inner.start(cands0))

    def next_query(self, state, cands):
        rounds, inner_state = state
        if rounds < self.switch_after:
            return self.inner.next_query(inner_state, cands)
        x, y = _two_smallest(cands)
        z = _first_edge_toward(self.g, x, y)
        return Query(x, z, QueryKind.EDGE)

    def advance(self, state, cands, query, side, new_cands):
        rounds, inner_state = state
        if rounds < self.switch_after:
            inner_state = self.inner.advance(inner_state, cands, query, side, new_cands)
        return (rounds + 1, inner_state)


# ---------------------------------------------------------------------------
# adversaries


class HalvingAdversary(_Stateless):
    """Keep the larger surviving side, ties to the u side.

    Both sides contain the equidistant part, so the kept side has at least
    half of the previous candidates and any algorithm needs ceil(log2 n)
    rounds.
    """

    def __init__(self, g=None):
        self.g = g

    def choose(self, state, cands, query, part):
        return Side.U if part.size_after(Side.U) >= part.size_after(Side.V) else Side.V


class FixedTargetAdversary(_Stateless):
    """Answer consistently with a target chosen in advance.

    On equidistant queries either reply is truthful; this implementation keeps
    the larger surviving side (ties to u).
    """

    def __init__(self, g, target):
        self.g = g
        self.target = target

    def start(self, cands0):
        if self.target not in cands0:
            raise QueryError(
                f"planted target {self.target} is outside the initial candidate set"
            )
        return None

    def choose(self, state, cands, query, part):
        du = self.g.oracle.row(query.u)[self.target]
        dv = self.g.oracle.row(query.v)[self.target]
        if du < dv:
            return Side.U
        if dv < du:
            return Side.V
        return Side.U if part.size_after(Side.U) >= part.size_after(Side.V) else Side.V


class ExhaustiveAdversary(_Stateless):
    """Play the minimax-optimal reply using the exact solver as an oracle."""

    def __init__(self, g, kind, limits=None):
        from .solver import MinimaxSolver

        self.solver = MinimaxSolver(g, kind, limits=limits)

    def choose(self, state, cands, query, part):
        keep_u = cands.members & part.side_sets(Side.U)
        keep_v = cands.members & part.side_sets(Side.V)
        if not keep_u:
            return Side.V
        if not keep_v:
            return Side.U
        mu = 0
        for v in keep_u:
            mu |= 1 << v
        mv = 0
        for v in keep_v:
            mv |= 1 << v
        vu = self.solver._value(mu)
        vv = self.solver._value(mv)
        if vu != vv:
            return Side.U if vu > vv else Side.V
        return Side.U if len(keep_u) >= len(keep_v) else Side.V


# ---------------------------------------------------------------------------
# certification and trial harness


def certify_upper(g, kind, algorithm, budget, v0=None, max_states=2_000_000):
    """Worst-case rounds of a deterministic strategy against every reply.

    Depth-first search over both replies at every round, memoized on
    (strategy state, candidate set).  Raises BudgetExceededError when some
    reply path is still unresolved after `budget` rounds.  Randomized
    strategies are certified per fixed seed, whose tape makes them
    deterministic.
    """
    check_connected(g)
    if v0 is None:
        cands0 = CandidateSet.full(g.n)
    elif isinstance(v0, CandidateSet):
        cands0 = v0
    else:
        cands0 = CandidateSet(v0)
    memo = {}

    def rec(state, cands, depth):
        if len(cands) == 1:
            return 0
        if depth >= budget:
            raise BudgetExceededError(
                f"strategy exceeds budget of {budget} rounds "
                f"(candidate set of size {len(cands)} remains)"
            )
        key = (state, cands.key)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if len(memo) >= max_states:
            raise ResourceLimitError(f"certification state space exceeded {max_states}")
        q = algorithm.next_query(state, cands)
        try:
            validate_query(g, kind, q)
            part = partition(g, cands, q)
        except QueryError as exc:
            raise StrategyError(
                f"algorithm {type(algorithm).__name__} emitted an invalid query: {exc}"
            ) from exc
        worst = 0
        for side in (Side.U, Side.V):
            survivors = cands.members & part.side_sets(side)
            if not survivors:
                continue
            nc = CandidateSet(survivors)
            st2 = algorithm.advance(state, cands, q, side, nc)
            worst = max(worst, 1 + rec(st2, nc, depth + 1))
        memo[key] = worst
        return worst

    return rec(algorithm.start(cands0), cands0, 0)


def run_trials(g, kind, make_algorithm, make_adversary, trials, root_seed, budget=None, v0=None):
    """Play `trials` seeded games; returns one StrategyOutcome per trial.

    Each trial t gets its own sub-seed; factories receive that seed so
    algorithm and adversary randomness are reproducible per trial.
    """
    outcomes = []
    for t in range(trials):
        seed_t = subseed(root_seed, "trial", t)
        alg = make_algorithm(seed_t)
        adv = make_adversary(seed_t)
        cap = budget
        if cap is None:
            cap = alg.default_budget
        if cap is None:
            cap = (len(v0) if v0 is not None else g.n) - 1
        tr = play(g, kind, alg, adv, cap, v0=v0, seed_note=str(seed_t))
        outcomes.append(
            StrategyOutcome(
                rounds=tr.num_rounds, success=tr.terminal, sizes=tr.sizes(), seed=seed_t
            )
        )
    return outcomes


# ---------------------------------------------------------------------------
# CLI registries

ALGORITHM_NAMES = (
    "sp-elim",
    "path-bisect",
    "gk-descent",
    "phase-pair",
    "phase-edge",
    "dense-edge",
    "greedy-split",
    "random",
)

ADVERSARY_NAMES = ("adv-halving", "adv-target", "adv-exhaustive")


def _phase_config(g, kind, options):
    d = options.get("d")
    if d is None:
        p = options.get("p")
        d = p * g.n if p is not None else 2 * g.m / g.n
    return PhaseConfig.derive(g.n, d, b=options.get("b", 4.0), i=options.get("i"))


def make_algorithm(name, g, kind, seed, options=None):
    options = options or {}
    if name == "sp-elim":
        return SpElimination(g)
    if name == "path-bisect":
        return PathBisect(g)
    if name == "gk-descent":
        if kind is not QueryKind.PAIR:
            raise ValueError("gk-descent plays pair queries; use --kind pair")
        return GkDescent(g)
    if name == "phase-pair":
        if kind is not QueryKind.PAIR:
            raise ValueError("phase-pair plays pair queries; use --kind pair")
        return PhasePair(g, _phase_config(g, kind, options), seed)
    if name == "phase-edge":
        return PhaseEdge(g, _phase_config(g, kind, options), seed)
    if name == "dense-edge":
        p = options.get("p")
        if p is None:
            p = 2 * g.m / (g.n * (g.n - 1))
        return DenseEdge(g, p, seed)
    if name == "greedy-split":
        return GreedySplit(g, kind)
    if name == "random":
        return RandomQueries(g, kind, seed)
    raise ValueError(f"unknown strategy {name!r}; choose from {ALGORITHM_NAMES}")


def make_adversary(name, g, kind, seed, options=None):
    options = options or {}
    if name == "adv-halving":
        return HalvingAdversary(g)
    if name == "adv-target":
        target = options.get("target")
        if target is None:
            target = random.Random(subseed(seed, "target")).randrange(g.n)
        return FixedTargetAdversary(g, target)
    if name == "adv-exhaustive":
        return ExhaustiveAdversary(g, kind, limits=options.get("limits"))
    raise ValueError(f"unknown adversary {name!r}; choose from {ADVERSARY_NAMES}")
