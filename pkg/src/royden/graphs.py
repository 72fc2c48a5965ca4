"""Finite simple graphs with dense integer ids, vertex sets, and file formats.

The graph is the universe for every computation in this package: undirected,
connected, no self-loops, bounded degree. Adjacency is stored CSR-style in
numpy arrays so solvers can vectorize over edges.
"""

from __future__ import annotations

import json
import warnings
from collections import deque
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DisconnectedGraphError,
    DuplicateEdgeError,
    DuplicateEdgeWarning,
    GraphError,
    SelfLoopError,
    VertexIdError,
)


class Graph:
    """Immutable undirected simple graph on vertices 0..n-1.

    Use :func:`build_graph` or the file readers to construct one; the
    constructor trusts its input.
    """

    __slots__ = ("n", "k", "_indptr", "_indices", "_edges", "__weakref__")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray, edges: np.ndarray):
        self.n = int(n)
        self._indptr = indptr
        self._indices = indices
        self._edges = edges  # (m, 2) with edges[i, 0] < edges[i, 1], lexicographically sorted
        self.k = int(np.diff(indptr).max()) if n > 0 else 0

    @property
    def num_vertices(self) -> int:
        return self.n

    @property
    def num_edges(self) -> int:
        return self._edges.shape[0]

    @property
    def edges(self) -> np.ndarray:
        """(m, 2) array of undirected edges, each with low id first."""
        return self._edges

    def neighbors(self, x: int) -> np.ndarray:
        """Sorted neighbor ids of vertex ``x``."""
        if not 0 <= x < self.n:
            raise GraphError(f"vertex {x} outside 0..{self.n - 1}")
        return self._indices[self._indptr[x]:self._indptr[x + 1]]

    def degree(self, x: int) -> int:
        return len(self.neighbors(x))

    def has_edge(self, x: int, y: int) -> bool:
        nbrs = self.neighbors(x)
        i = np.searchsorted(nbrs, y)
        return i < len(nbrs) and nbrs[i] == y

    def vertices(self) -> range:
        return range(self.n)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self._edges.shape == other._edges.shape
            and bool(np.all(self._edges == other._edges))
        )

    def __hash__(self):
        return hash((self.n, self._edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges}, k={self.k})"


class VertexSet:
    """Sorted, immutable set of vertex ids tied to a parent graph."""

    __slots__ = ("graph", "ids", "_set")

    def __init__(self, graph: Graph, ids: Iterable[int]):
        ids = tuple(sorted({int(v) for v in ids}))
        for v in ids:
            if not 0 <= v < graph.n:
                raise GraphError(f"vertex {v} not in parent graph with n={graph.n}")
        self.graph = graph
        self.ids = ids
        self._set = frozenset(ids)

    def __contains__(self, v) -> bool:
        return v in self._set

    def __iter__(self):
        return iter(self.ids)

    def __len__(self) -> int:
        return len(self.ids)

    def __eq__(self, other) -> bool:
        return isinstance(other, VertexSet) and self.graph is other.graph and self.ids == other.ids

    def __hash__(self):
        return hash((id(self.graph), self.ids))

    def __repr__(self) -> str:
        show = ",".join(map(str, self.ids[:8])) + (",..." if len(self.ids) > 8 else "")
        return f"VertexSet({{{show}}}, size={len(self.ids)})"

    def union(self, other: "VertexSet") -> "VertexSet":
        self._check_same_graph(other)
        return VertexSet(self.graph, self._set | other._set)

    def difference(self, other: "VertexSet") -> "VertexSet":
        self._check_same_graph(other)
        return VertexSet(self.graph, self._set - other._set)

    def intersection(self, other: "VertexSet") -> "VertexSet":
        self._check_same_graph(other)
        return VertexSet(self.graph, self._set & other._set)

    def isdisjoint(self, other: "VertexSet") -> bool:
        return self._set.isdisjoint(other._set)

    def issubset(self, other: "VertexSet") -> bool:
        return self._set <= other._set

    def complement(self) -> "VertexSet":
        return VertexSet(self.graph, set(range(self.graph.n)) - self._set)

    def as_mask(self) -> np.ndarray:
        mask = np.zeros(self.graph.n, dtype=bool)
        mask[list(self.ids)] = True
        return mask

    def _check_same_graph(self, other: "VertexSet") -> None:
        if self.graph is not other.graph:
            raise GraphError("vertex sets belong to different graphs")


def build_graph(edges: Sequence[tuple[int, int]], strict: bool = False) -> Graph:
    """Build a connected simple graph from an unordered edge list.

    Vertex ids must form the dense range 0..n-1. Duplicate edges are collapsed
    with a warning, or rejected when ``strict`` is set.
    """
    if not edges:
        raise GraphError("edge list is empty")
    seen: set[tuple[int, int]] = set()
    dups = 0
    for a, b in edges:
        a, b = int(a), int(b)
        if a == b:
            raise SelfLoopError(f"self-loop at vertex {a}")
        if a < 0 or b < 0:
            raise VertexIdError(f"negative vertex id in edge ({a}, {b})")
        key = (a, b) if a < b else (b, a)
        if key in seen:
            dups += 1
            if strict:
                raise DuplicateEdgeError(f"duplicate edge {key}")
        seen.add(key)
    if dups:
        warnings.warn(f"collapsed {dups} duplicate edge(s)", DuplicateEdgeWarning, stacklevel=2)

    edge_arr = np.array(sorted(seen), dtype=np.int64)
    n = int(edge_arr.max()) + 1
    present = np.zeros(n, dtype=bool)
    present[edge_arr.ravel()] = True
    if not present.all():
        missing = int(np.flatnonzero(~present)[0])
        raise VertexIdError(f"vertex ids not dense: id {missing} unused but {n - 1} present")
    return _graph_from_edge_array(n, edge_arr)


def _graph_from_edge_array(n: int, edge_arr: np.ndarray, check_connected: bool = True) -> Graph:
    deg = np.zeros(n, dtype=np.int64)
    np.add.at(deg, edge_arr[:, 0], 1)
    np.add.at(deg, edge_arr[:, 1], 1)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    indices = np.empty(indptr[-1], dtype=np.int64)
    cursor = indptr[:-1].copy()
    for a, b in edge_arr:
        indices[cursor[a]] = b
        cursor[a] += 1
        indices[cursor[b]] = a
        cursor[b] += 1
    for v in range(n):
        indices[indptr[v]:indptr[v + 1]] = np.sort(indices[indptr[v]:indptr[v + 1]])
    g = Graph(n, indptr, indices, edge_arr)
    if check_connected and not is_connected(g):
        raise DisconnectedGraphError(f"graph with {n} vertices is not connected")
    return g


def is_connected(g: Graph, within: Iterable[int] | None = None) -> bool:
    """Connectivity of the whole graph, or of the subgraph induced by ``within``."""
    if within is None:
        allowed = None
        start: int | None = 0 if g.n else None
        total = g.n
    else:
        ids = set(int(v) for v in within)
        if not ids:
            return True
        allowed = ids
        start = min(ids)
        total = len(ids)
    if start is None:
        return True
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in g.neighbors(x):
            y = int(y)
            if y in seen or (allowed is not None and y not in allowed):
                continue
            seen.add(y)
            queue.append(y)
    return len(seen) == total


def components(g: Graph, within: Iterable[int]) -> list[list[int]]:
    """Connected components of the subgraph induced by ``within`` (sorted ids)."""
    remaining = set(int(v) for v in within)
    comps: list[list[int]] = []
    while remaining:
        start = min(remaining)
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in g.neighbors(x):
                y = int(y)
                if y in remaining and y not in seen:
                    seen.add(y)
                    queue.append(y)
        remaining -= seen
        comps.append(sorted(seen))
    return comps


def outer_boundary(S: VertexSet, g: Graph) -> VertexSet:
    """Vertices outside ``S`` with at least one neighbor in ``S``."""
    if len(S) == 0:
        raise GraphError("outer boundary of the empty set is undefined")
    if S.graph is not g:
        raise GraphError("vertex set belongs to a different graph")
    mask = S.as_mask()
    e = g.edges
    u_in, v_in = mask[e[:, 0]], mask[e[:, 1]]
    out_ids = np.concatenate([e[~u_in & v_in, 0], e[u_in & ~v_in, 1]])
    return VertexSet(g, np.unique(out_ids))


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Shortest-path distances from ``source``; unreachable vertices get -1."""
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in g.neighbors(x):
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(int(y))
    return dist


# ---------------------------------------------------------------------------
# File formats. Both emitters are canonical: sorted ids, fixed layout, so a
# parse/emit round trip of canonical bytes is byte-stable.
# ---------------------------------------------------------------------------

def graph_to_json(g: Graph) -> str:
    payload = {
        "edges": [[int(a), int(b)] for a, b in g.edges],
        "vertices": list(range(g.n)),
    }
    return json.dumps(payload, sort_keys=True, separators=(", ", ": ")) + "\n"


def graph_from_json(text: str) -> Graph:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid graph JSON: {exc}") from exc
    if not isinstance(payload, dict) or "edges" not in payload or "vertices" not in payload:
        raise GraphError("graph JSON must be an object with 'vertices' and 'edges'")
    vertices = [int(v) for v in payload["vertices"]]
    edges = [(int(a), int(b)) for a, b in payload["edges"]]
    g = build_graph(edges)
    if sorted(vertices) != list(range(g.n)):
        raise VertexIdError("'vertices' must list exactly the dense ids used by 'edges'")
    return g


def graph_to_edge_list(g: Graph) -> str:
    return "".join(f"{a} {b}\n" for a, b in g.edges)


def graph_from_edge_list(text: str) -> Graph:
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'a b', got {raw!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise GraphError(f"line {lineno}: non-integer vertex id in {raw!r}") from exc
    return build_graph(edges)


def load_graph(path: str) -> Graph:
    """Read a graph file, dispatching on a leading '{' (JSON) vs edge list."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return graph_from_json(text)
    return graph_from_edge_list(text)
