"""Pair-query and edge-query vertex-search games on graphs."""

from .engine import (
    CandidateSet,
    Partition,
    Query,
    QueryKind,
    Side,
    Transcript,
    apply_reply,
    closer_set,
    partition,
    play,
)
from .graphs import (
    DistanceOracle,
    GnpParams,
    Graph,
    build_graph,
    diameter,
    distances_from,
    make_complete,
    make_path,
    make_separation_graph,
    make_star,
    sample_gnp,
    separation_leaves,
)
from .solver import GameValue, SolverLimits, decide, extract_strategy, game_value

__all__ = [
    "CandidateSet",
    "DistanceOracle",
    "GameValue",
    "GnpParams",
    "Graph",
    "Partition",
    "Query",
    "QueryKind",
    "Side",
    "SolverLimits",
    "Transcript",
    "apply_reply",
    "build_graph",
    "closer_set",
    "decide",
    "diameter",
    "distances_from",
    "extract_strategy",
    "game_value",
    "make_complete",
    "make_path",
    "make_separation_graph",
    "make_star",
    "partition",
    "play",
    "sample_gnp",
    "separation_leaves",
]
