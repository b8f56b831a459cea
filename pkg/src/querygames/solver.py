"""Exact minimax computation of the two query-game parameters.

The value of a candidate set S is 0 when |S| <= 1, else

    value(S) = 1 + min over queries (u, v) of max(value(S & C(u,v)),
                                                  value(S & C(v,u)))

with C(u, v) the closed closer-set of u against v.  Candidate sets are bit
masks; values are memoized per mask.  Queries range over all of V, not just S
(optionally restricted by an experimental flag).  Queries whose worse branch
equals S make no progress and are skipped: an adversary always picks the full
side, so such a query only wastes a round and cannot lower the value.

Pruning: value(S) is bounded below by ceil(log2 |S|) (any reply keeps at least
half of S) and above by |S| - 1 (querying the first edge of a shortest path
between two candidates always eliminates one of them).  The search keeps a
running incumbent initialized to the upper bound, skips a query as soon as its
first-evaluated branch already matches the incumbent, and stops once the lower
bound is attained.
"""

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .engine import QueryKind
from .errors import ResourceLimitError, UnsearchableSetError
from .graphs import ceil_log2, check_connected


@dataclass(frozen=True)
class SolverLimits:
    max_vertices: int = 18
    max_memo_entries: int = 2_000_000
    time_budget_s: Optional[float] = None

    def __post_init__(self):
        if self.max_vertices < 1 or self.max_memo_entries < 1:
            raise ValueError("solver limits must be positive")
        if self.time_budget_s is not None and self.time_budget_s <= 0:
            raise ValueError("time budget must be positive")


@dataclass
class GameValue:
    value: int
    first_query: Optional[tuple] = None
    memo_entries: int = 0
    retained: Optional[dict] = field(default=None, repr=False)


def _mask_of(vertices):
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class MinimaxSolver:
    """One solving session: precomputed query masks plus a growing memo table.

    The memo maps candidate-set masks to exact values, so a session can be
    reused for many starting sets on the same graph and query kind.
    """

    def __init__(self, g, kind, limits=None, retain=False, restrict_to_candidates=False):
        limits = limits or SolverLimits()
        if g.n > limits.max_vertices:
            raise ResourceLimitError(
                f"graph has {g.n} vertices, over the solver cap of "
                f"{limits.max_vertices}"
            )
        check_connected(g)
        self.g = g
        self.kind = kind
        self.limits = limits
        self.retain = retain
        self.restrict = restrict_to_candidates
        self.memo = {}
        self.best_query = {} if retain else None
        self._deadline = None
        self._calls = 0

        if kind is QueryKind.EDGE:
            pairs = list(g.edges())
        else:
            pairs = [(u, v) for u in range(g.n) for v in range(u + 1, g.n)]
        rows = [g.oracle.row(s) for s in range(g.n)]
        self.queries = []
        for u, v in pairs:  # lexicographic, so first-best tie-break is smallest (u, v)
            du, dv = rows[u], rows[v]
            cu = _mask_of(np.flatnonzero(du <= dv).tolist())
            cv = _mask_of(np.flatnonzero(dv <= du).tolist())
            self.queries.append((u, v, cu, cv))

    def value_for(self, v0=None):
        mask = _mask_of(v0) if v0 is not None else (1 << self.g.n) - 1
        if mask == 0:
            raise ValueError("initial candidate set must be non-empty")
        if self.limits.time_budget_s is not None:
            self._deadline = time.monotonic() + self.limits.time_budget_s
        return self._value(mask)

    def _value(self, mask):
        size = mask.bit_count()
        if size <= 1:
            return 0
        cached = self.memo.get(mask)
        if cached is not None:
            return cached
        self._calls += 1
        if self._calls % 1024 == 0 and self._deadline is not None:
            if time.monotonic() > self._deadline:
                raise ResourceLimitError("solver time budget exceeded")
        if len(self.memo) >= self.limits.max_memo_entries:
            raise ResourceLimitError(
                f"memo table exceeded {self.limits.max_memo_entries} entries"
            )

        lower = ceil_log2(size)
        best = size - 1  # shortest-path elimination guarantees this
        best_q = None
        seen_splits = set()
        any_progress = False
        for u, v, cu, cv in self.queries:
            if self.restrict and not ((mask >> u) & 1 and (mask >> v) & 1):
                continue
            a = mask & cu
            b = mask & cv
            if a == mask or b == mask:
                continue  # no-progress query: worse branch would equal S
            split = (a, b) if a <= b else (b, a)
            if split in seen_splits:
                continue  # same partition of S as an earlier query
            seen_splits.add(split)
            any_progress = True
            if a.bit_count() < b.bit_count():
                a, b = b, a  # evaluate the larger branch first
            va = self._value(a)
            if 1 + va >= best:
                continue  # cannot beat the incumbent regardless of the other branch
            vb = self._value(b)
            cand = 1 + max(va, vb)
            if cand < best:
                best = cand
                best_q = (u, v)
                if best == lower:
                    break
        if not any_progress:
            raise UnsearchableSetError(
                f"no query makes progress on candidate set of size {size}"
            )
        if best_q is None:
            # the incumbent |S|-1 was never beaten; realize it explicitly so
            # retained strategies stay well-defined
            best_q = self._fallback_query(mask)
        self.memo[mask] = best
        if self.retain:
            self.best_query[mask] = best_q
        return best

    def _fallback_query(self, mask):
        """Lexicographically smallest progress query (value |S|-1 case)."""
        for u, v, cu, cv in self.queries:
            if self.restrict and not ((mask >> u) & 1 and (mask >> v) & 1):
                continue
            a = mask & cu
            b = mask & cv
            if a != mask and b != mask:
                return (u, v)
        raise UnsearchableSetError("no progress query available")

    def branch_masks(self, mask, u, v):
        """Masks surviving reply u / reply v for query (u, v) from `mask`."""
        for qu, qv, cu, cv in self.queries:
            if (qu, qv) == (u, v) or (qu, qv) == (v, u):
                if (qu, qv) == (v, u):
                    cu, cv = cv, cu
                return mask & cu, mask & cv
        raise KeyError(f"({u}, {v}) is not an admissible query")


def game_value(g, kind, limits=None, v0=None, retain=False, restrict_to_candidates=False):
    """Exact worst-case number of queries to locate any target.

    Satisfies ceil(log2 |S|) <= value <= |S| - 1 for |S| >= 2, value 0 for a
    singleton start.
    """
    solver = MinimaxSolver(
        g, kind, limits=limits, retain=retain, restrict_to_candidates=restrict_to_candidates
    )
    value = solver.value_for(v0)
    mask = _mask_of(v0) if v0 is not None else (1 << g.n) - 1
    first = solver.best_query.get(mask) if retain else None
    return GameValue(
        value=value,
        first_query=first,
        memo_entries=len(solver.memo),
        retained=solver.best_query if retain else None,
    )


def decide(g, kind, threshold, limits=None, v0=None):
    """True iff the game value is at most `threshold`."""
    size = len(set(v0)) if v0 is not None else g.n
    if threshold >= size - 1:
        return True  # one vertex can always be eliminated per round
    if threshold < ceil_log2(size):
        return False  # halving adversary forces at least ceil(log2 n) rounds
    return game_value(g, kind, limits=limits, v0=v0).value <= threshold


@dataclass
class StrategyNode:
    """Decision tree node: a query plus subtrees per reply, or a located vertex."""

    vertex: Optional[int] = None
    query: Optional[tuple] = None
    on_u: Optional["StrategyNode"] = None
    on_v: Optional["StrategyNode"] = None

    @property
    def is_leaf(self):
        return self.vertex is not None

    def depth(self):
        if self.is_leaf:
            return 0
        return 1 + max(self.on_u.depth(), self.on_v.depth())

    def render(self, indent=0):
        pad = "  " * indent
        if self.is_leaf:
            return f"{pad}target {self.vertex}\n"
        u, v = self.query
        out = f"{pad}query ({u}, {v})\n"
        out += f"{pad} if {u}:\n" + self.on_u.render(indent + 1)
        out += f"{pad} if {v}:\n" + self.on_v.render(indent + 1)
        return out


def build_strategy_tree(g, kind, result, v0=None, limits=None):
    """Expand a retained GameValue into an explicit decision tree."""
    if result.retained is None:
        raise ValueError("game_value was run without retention; rerun with retain=True")
    solver = MinimaxSolver(g, kind, limits=limits, retain=True)
    solver.best_query = dict(result.retained)

    def expand(mask):
        if mask.bit_count() == 1:
            return StrategyNode(vertex=mask.bit_length() - 1)
        q = solver.best_query.get(mask)
        if q is None:
            solver._value(mask)  # fill in sets unreachable from the original root
            q = solver.best_query[mask]
        a, b = solver.branch_masks(mask, *q)
        return StrategyNode(query=q, on_u=expand(a), on_v=expand(b))

    mask = _mask_of(v0) if v0 is not None else (1 << g.n) - 1
    return expand(mask)


def extract_strategy(g, kind, limits=None, v0=None):
    """Solve with retention and return the optimal decision tree.

    Tree depth equals the game value; every leaf is a single located vertex.
    Ties among optimal first queries break to the lexicographically smallest
    pair, so extraction is reproducible.
    """
    result = game_value(g, kind, limits=limits, v0=v0, retain=True)
    return build_strategy_tree(g, kind, result, v0=v0, limits=limits)
