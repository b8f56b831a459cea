"""Undirected simple graphs, BFS distances, and the graph constructors.

Vertices are 0..n-1.  Adjacency is stored as per-vertex sorted tuples and is
immutable after construction.  Shortest-path distances are computed lazily one
source at a time and cached, so large experiment graphs only ever pay for the
vertices that actually get queried.
"""

from bisect import bisect_left
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_array
from scipy.sparse.csgraph import dijkstra

from .errors import DisconnectedGraphError, GraphError


class Graph:
    """Simple undirected graph with optional plain-text vertex labels."""

    __slots__ = ("n", "adj", "labels", "_csr", "_oracle")

    def __init__(self, n, adj, labels=None):
        self.n = n
        self.adj = adj
        self.labels = dict(labels) if labels else {}
        self._csr = None
        self._oracle = None

    @property
    def m(self):
        return sum(len(a) for a in self.adj) // 2

    def neighbors(self, u):
        return self.adj[u]

    def degree(self, u):
        return len(self.adj[u])

    def has_edge(self, u, v):
        row = self.adj[u]
        i = bisect_left(row, v)
        return i < len(row) and row[i] == v

    def edges(self):
        """Yield edges as (u, v) with u < v, in lexicographic order."""
        for u in range(self.n):
            for v in self.adj[u]:
                if v > u:
                    yield (u, v)

    def label_of(self, u):
        return self.labels.get(u, "")

    def vertex_by_label(self, text):
        for u, lab in self.labels.items():
            if lab == text:
                return u
        raise GraphError(f"no vertex labeled {text!r}")

    @property
    def csr(self):
        if self._csr is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            for u in range(self.n):
                indptr[u + 1] = indptr[u] + len(self.adj[u])
            indices = np.fromiter(
                (v for row in self.adj for v in row), dtype=np.int64, count=indptr[-1]
            )
            data = np.ones(len(indices), dtype=np.uint8)
            self._csr = csr_array((data, indices, indptr), shape=(self.n, self.n))
        return self._csr

    @property
    def oracle(self):
        if self._oracle is None:
            self._oracle = DistanceOracle(self)
        return self._oracle

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(n, edges, labels=None):
    """Build a Graph from an edge list, deduplicating and symmetrizing.

    Raises GraphError for self-loops or out-of-range endpoints.  Disconnected
    output is allowed here; connectivity is checked where it matters.
    """
    if n < 1:
        raise GraphError(f"vertex count must be >= 1, got {n}")
    seen = set()
    for u, v in edges:
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
        seen.add((u, v) if u < v else (v, u))
    adj = [[] for _ in range(n)]
    for u, v in sorted(seen):
        adj[u].append(v)
        adj[v].append(u)
    return Graph(n, tuple(tuple(sorted(a)) for a in adj), labels)


class DistanceOracle:
    """Lazily cached BFS distance rows for a connected graph.

    Rows are np.int32 arrays, read-only.  The first computed row doubles as a
    connectivity check; an unreachable vertex raises DisconnectedGraphError
    naming the offending pair.
    """

    __slots__ = ("g", "_rows")

    def __init__(self, g):
        self.g = g
        self._rows = {}

    def row(self, source):
        row = self._rows.get(source)
        if row is None:
            if not (0 <= source < self.g.n):
                raise GraphError(f"source {source} out of range")
            dist = dijkstra(self.g.csr, unweighted=True, indices=source)
            if np.isinf(dist).any():
                missing = int(np.flatnonzero(np.isinf(dist))[0])
                raise DisconnectedGraphError(
                    f"graph is disconnected: vertices {source} and {missing} "
                    f"are mutually unreachable"
                )
            row = dist.astype(np.int32)
            row.setflags(write=False)
            self._rows[source] = row
        return row


def distances_from(g, source):
    """BFS distance row from `source` (cached on the graph's oracle)."""
    return g.oracle.row(source)


def is_connected(g):
    if g.n == 1:
        return True
    try:
        g.oracle.row(0)
    except DisconnectedGraphError:
        return False
    return True


def check_connected(g):
    if g.n > 1:
        g.oracle.row(0)


def diameter(g):
    """Max over all pairs of d(u, v); errors on disconnected input."""
    return max(int(g.oracle.row(s).max()) for s in range(g.n))


@dataclass(frozen=True)
class GnpParams:
    """Parameters of the binomial random graph sampler."""

    n: int
    p: float
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise GraphError(f"edge probability must be in [0, 1], got {self.p}")
        if self.n < 1:
            raise GraphError(f"vertex count must be >= 1, got {self.n}")

    @property
    def d(self):
        """Expected-degree parameter d = p*n."""
        return self.p * self.n


def sample_gnp(params):
    """Sample G(n, p): each of the C(n, 2) pairs appears independently.

    Deterministic for a fixed seed (PCG64, row-major pair order).  Output may
    be disconnected; callers that need connectivity resample.
    """
    n, p = params.n, params.p
    rng = np.random.default_rng(params.seed)
    adj = [[] for _ in range(n)]
    for u in range(n - 1):
        draws = rng.random(n - 1 - u)
        for v in (np.flatnonzero(draws < p) + u + 1).tolist():
            adj[u].append(v)
            adj[v].append(u)
    return Graph(n, tuple(tuple(sorted(a)) for a in adj))


def make_path(n):
    """Path 0-1-...-(n-1)."""
    if n < 2:
        raise GraphError(f"path needs n >= 2, got {n}")
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def make_star(n):
    """Star with center 0 and n-1 leaves."""
    if n < 2:
        raise GraphError(f"star needs n >= 2, got {n}")
    return build_graph(n, [(0, i) for i in range(1, n)])


def make_complete(n):
    if n < 2:
        raise GraphError(f"complete graph needs n >= 2, got {n}")
    return build_graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def make_separation_graph(k):
    """Leaf-clique-plus-ancestors graph on the vertex set of a full binary tree.

    The tree has height k; vertex (level j, index i) gets id 2^j - 1 + i and
    label "j:i".  Leaves (level k) form a clique, and every non-leaf is
    adjacent to exactly the leaves of its own subtree.  Tree edges themselves
    are not included.  Pair queries locate a target in O(k) rounds here while
    edge queries need about half the leaf count, which is why this family
    separates the two game parameters.
    """
    if k < 1:
        raise GraphError(f"height must be >= 1, got {k}")
    n = 2 ** (k + 1) - 1
    first_leaf = 2**k - 1
    edges = []
    leaves = list(range(first_leaf, n))
    for a in range(len(leaves)):
        for b in range(a + 1, len(leaves)):
            edges.append((leaves[a], leaves[b]))
    labels = {}
    for j in range(k + 1):
        for i in range(2**j):
            vid = 2**j - 1 + i
            labels[vid] = f"{j}:{i}"
            if j < k:
                width = 2 ** (k - j)
                for leaf_idx in range(i * width, (i + 1) * width):
                    edges.append((vid, first_leaf + leaf_idx))
    return build_graph(n, edges, labels)


def separation_leaves(k):
    """Vertex ids of the leaf clique of make_separation_graph(k)."""
    return tuple(range(2**k - 1, 2 ** (k + 1) - 1))


def _layered_bfs(g, sources, radius):
    """Per-layer multi-source BFS out to `radius`; returns list of frozensets."""
    seen = set(sources)
    layers = [frozenset(seen)]
    frontier = list(seen)
    for _ in range(radius):
        nxt = []
        for u in frontier:
            for w in g.adj[u]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        layers.append(frozenset(nxt))
        frontier = nxt
        if not nxt:
            break
    return layers


def _check_sphere_args(g, zset, radius):
    zs = sorted(set(zset))
    if not zs:
        raise GraphError("vertex set must be non-empty")
    if zs[0] < 0 or zs[-1] >= g.n:
        raise GraphError("vertex set out of range")
    if radius < 0:
        raise GraphError(f"radius must be >= 0, got {radius}")
    check_connected(g)
    return zs


def sphere(g, zset, radius):
    """Vertices at distance exactly `radius` from the set `zset`."""
    zs = _check_sphere_args(g, zset, radius)
    layers = _layered_bfs(g, zs, radius)
    return layers[radius] if radius < len(layers) else frozenset()


def ball(g, zset, radius):
    """Vertices at distance at most `radius` from the set `zset`."""
    zs = _check_sphere_args(g, zset, radius)
    out = set()
    for layer in _layered_bfs(g, zs, radius):
        out |= layer
    return frozenset(out)


def bfs_distances_reference(adj, source):
    """Plain deque BFS, kept as a slow reference path (used by sanity checks)."""
    dist = [-1] * len(adj)
    dist[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def write_edgelist(g, f):
    """Write the edge-list text format: `n m`, then `u v` lines, then labels.

    Output is byte-stable: edges in lexicographic order, labels sorted by
    vertex id, LF line endings.
    """
    f.write(f"{g.n} {g.m}\n")
    for u, v in g.edges():
        f.write(f"{u} {v}\n")
    for u in sorted(g.labels):
        f.write(f"# label {u} {g.labels[u]}\n")


def read_edgelist(f):
    lines = f.read().splitlines()
    if not lines:
        raise GraphError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphError(f"expected header 'n m', got {lines[0]!r}")
    n, m = int(head[0]), int(head[1])
    edges = []
    labels = {}
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        if line.startswith("#"):
            parts = line.split(maxsplit=3)
            if len(parts) >= 3 and parts[1] == "label":
                labels[int(parts[2])] = parts[3] if len(parts) == 4 else ""
                continue
            raise GraphError(f"line {i}: unrecognized comment {line!r}")
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {i}: expected 'u v', got {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if len(edges) != m:
        raise GraphError(f"header says {m} edges, found {len(edges)}")
    return build_graph(n, edges, labels)


def graph_to_text(g):
    import io

    buf = io.StringIO()
    write_edgelist(g, buf)
    return buf.getvalue()


def graph_from_text(text):
    import io

    return read_edgelist(io.StringIO(text))


def ceil_log2(x):
    """Smallest t with 2^t >= x, for integer x >= 1 (exact, no float round-off)."""
    if x < 1:
        raise ValueError(f"ceil_log2 needs x >= 1, got {x}")
    return (int(x) - 1).bit_length()
