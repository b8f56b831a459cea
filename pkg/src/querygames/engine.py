"""Query-game semantics: closer-sets, three-way partitions, reply application,
and playout between pluggable strategies.

A round works on the current candidate set S (the vertices still compatible
with every reply so far).  A query names two distinct vertices u, v and splits
S three ways: strictly closer to u, strictly closer to v, and equidistant.
The reply keeps one strict side together with the equidistant part; the game
ends when a single candidate remains.

Strategies are duck-typed state machines so that the same object drives both
ordinary playouts and the exhaustive reply-tree certifier:

    algorithm.kind                          -> QueryKind it emits
    algorithm.start(cands0) -> state        (state must be hashable)
    algorithm.next_query(state, cands) -> Query
    algorithm.advance(state, cands, query, side, new_cands) -> state

    adversary.start(cands0) -> state
    adversary.choose(state, cands, query, partition) -> Side
    adversary.advance(state, cands, query, side, new_cands) -> state
"""

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import QueryError, StrategyError
from .graphs import check_connected


class QueryKind(enum.Enum):
    PAIR = "pair"
    EDGE = "edge"


class Side(enum.Enum):
    """Reply encoding: which *endpoint slot* of the query survives.

    Sides rather than vertex ids, so a strategy that permutes its endpoints
    cannot produce an ambiguous reply.
    """

    U = "u"
    V = "v"


@dataclass(frozen=True)
class Query:
    u: int
    v: int
    kind: QueryKind

    def endpoint(self, side):
        return self.u if side is Side.U else self.v


class CandidateSet:
    """Non-empty vertex set with a canonical bit encoding usable as a memo key."""

    __slots__ = ("members", "_key", "_arr")

    def __init__(self, members):
        ms = frozenset(members)
        if not ms:
            raise QueryError("candidate set must be non-empty")
        self.members = ms
        self._key = None
        self._arr = None

    @classmethod
    def full(cls, n):
        return cls(range(n))

    @property
    def key(self):
        """Injective encoding: bit i set iff vertex i is a member."""
        if self._key is None:
            k = 0
            for v in self.members:
                k |= 1 << v
            self._key = k
        return self._key

    @property
    def array(self):
        if self._arr is None:
            arr = np.fromiter(sorted(self.members), dtype=np.int64, count=len(self.members))
            arr.setflags(write=False)
            self._arr = arr
        return self._arr

    def __len__(self):
        return len(self.members)

    def __contains__(self, v):
        return v in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __eq__(self, other):
        return isinstance(other, CandidateSet) and self.members == other.members

    def __hash__(self):
        return hash(self.members)

    def __repr__(self):
        return f"CandidateSet({sorted(self.members)})"


@dataclass(frozen=True)
class Partition:
    """Three-way split of a candidate set by one query."""

    closer_u: frozenset
    closer_v: frozenset
    equal: frozenset

    def side_sets(self, side):
        """Surviving members if the reply is `side`."""
        strict = self.closer_u if side is Side.U else self.closer_v
        return strict | self.equal

    def size_after(self, side):
        strict = self.closer_u if side is Side.U else self.closer_v
        return len(strict) + len(self.equal)


def validate_query(g, kind, q):
    if q.u == q.v:
        raise QueryError(f"query must name two distinct vertices, got ({q.u}, {q.v})")
    if not (0 <= q.u < g.n and 0 <= q.v < g.n):
        raise QueryError(f"query ({q.u}, {q.v}) out of range for n={g.n}")
    if kind is QueryKind.EDGE:
        if q.kind is not QueryKind.EDGE:
            raise QueryError("edge game requires edge queries")
        if not g.has_edge(q.u, q.v):
            raise QueryError(f"({q.u}, {q.v}) is not an edge")
    elif q.kind is QueryKind.EDGE and not g.has_edge(q.u, q.v):
        raise QueryError(f"query claims to be an edge but ({q.u}, {q.v}) is not")


def closer_set(g, u, v):
    """All x with d(u, x) <= d(v, x): closer to u, ties included."""
    if u == v:
        raise QueryError(f"closer_set needs two distinct vertices, got {u} twice")
    check_connected(g)
    du = g.oracle.row(u)
    dv = g.oracle.row(v)
    return frozenset(np.flatnonzero(du <= dv).tolist())


def partition(g, s, q):
    """Split candidate set `s` by query `q` into (closer_u, closer_v, equal)."""
    validate_query(g, q.kind, q)
    check_connected(g)
    du = g.oracle.row(q.u)
    dv = g.oracle.row(q.v)
    idx = s.array
    if len(idx) and (idx[0] < 0 or idx[-1] >= g.n):
        raise QueryError("candidate set out of range for this graph")
    a = du[idx]
    b = dv[idx]
    lt = a < b
    gt = a > b
    return Partition(
        closer_u=frozenset(idx[lt].tolist()),
        closer_v=frozenset(idx[gt].tolist()),
        equal=frozenset(idx[~lt & ~gt].tolist()),
    )


def apply_reply(s, part, side):
    """Candidates surviving the reply: the strict side plus the equidistant part.

    May equal `s` (a no-progress query); never grows; an empty survivor set is
    rejected because an empty candidate set is incompatible with any target.
    """
    if not isinstance(side, Side):
        raise QueryError(f"reply must be a Side, got {side!r}")
    kept = part.side_sets(side)
    survivors = s.members & kept
    if not survivors:
        raise QueryError("reply would leave no candidates")
    return CandidateSet(survivors)


@dataclass(frozen=True)
class Round:
    index: int
    u: int
    v: int
    side: Side
    candidates_after: int


@dataclass(frozen=True)
class Transcript:
    """Full record of one playout."""

    rounds: tuple
    terminal: bool
    final: CandidateSet
    seed: Optional[str] = None

    @property
    def num_rounds(self):
        return len(self.rounds)

    def sizes(self):
        return tuple(r.candidates_after for r in self.rounds)


TRANSCRIPT_SCHEMA = "transcript-v1"


def write_transcript_csv(t, f):
    f.write(f"# schema: {TRANSCRIPT_SCHEMA}\n")
    f.write("round,u,v,reply_side,candidates_after\n")
    for r in t.rounds:
        f.write(f"{r.index},{r.u},{r.v},{r.side.value},{r.candidates_after}\n")


def play(g, kind, algorithm, adversary, budget, v0=None, observer=None, seed_note=None):
    """Alternate algorithm queries and adversary replies until one candidate
    remains or the budget is spent.

    v0 restricts the initial candidate set (default: all vertices).  observer,
    if given, is called as observer(round_index, cands, query, side, new_cands)
    after each round; it is for measurement only and must not mutate anything.
    """
    check_connected(g)
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    if v0 is None:
        cands = CandidateSet.full(g.n)
    elif isinstance(v0, CandidateSet):
        cands = v0
    else:
        cands = CandidateSet(v0)
    if max(cands.members) >= g.n or min(cands.members) < 0:
        raise QueryError("initial candidate set out of range")

    alg_state = algorithm.start(cands)
    adv_state = adversary.start(cands)
    rounds = []
    while len(cands) > 1 and len(rounds) < budget:
        q = algorithm.next_query(alg_state, cands)
        try:
            validate_query(g, kind, q)
            part = partition(g, cands, q)
        except QueryError as exc:
            raise StrategyError(
                f"algorithm {type(algorithm).__name__} emitted an invalid query: {exc}"
            ) from exc
        side = adversary.choose(adv_state, cands, q, part)
        try:
            new_cands = apply_reply(cands, part, side)
        except QueryError as exc:
            raise StrategyError(
                f"adversary {type(adversary).__name__} chose an impossible reply: {exc}"
            ) from exc
        index = len(rounds) + 1
        if observer is not None:
            observer(index, cands, q, side, new_cands)
        alg_state = algorithm.advance(alg_state, cands, q, side, new_cands)
        adv_state = adversary.advance(adv_state, cands, q, side, new_cands)
        rounds.append(Round(index, q.u, q.v, side, len(new_cands)))
        cands = new_cands
    return Transcript(tuple(rounds), terminal=len(cands) == 1, final=cands, seed=seed_note)
