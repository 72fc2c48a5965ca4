"""Simple-path enumeration between vertex sets (the oracle side of extremal length)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import GraphError, TooManyPathsError
from .graphs import Graph, VertexSet


@dataclass(frozen=True)
class SimplePath:
    """A self-avoiding path given by its vertex sequence."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError(f"repeated vertex in path {self.vertices}")

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Undirected edges along the path, each as (low, high)."""
        return tuple(
            (a, b) if a < b else (b, a)
            for a, b in zip(self.vertices, self.vertices[1:])
        )

    def __len__(self) -> int:
        return len(self.vertices)

    def weight_length(self, weight_of) -> float:
        return sum(weight_of(e) for e in self.edges)


def _enumerate(
    g: Graph,
    sources: Iterable[int],
    sinks: set[int],
    allowed_interior: set[int],
    cap: int,
) -> list[SimplePath]:
    """DFS over sorted neighbor lists; emits paths in lexicographic order."""
    out: list[SimplePath] = []
    for a in sorted(set(int(v) for v in sources)):
        stack: list[int] = [a]
        on_path = {a}

        def dfs(x: int) -> None:
            for y in g.neighbors(x):
                y = int(y)
                if y in on_path:
                    continue
                if y in sinks:
                    if len(out) >= cap:
                        raise TooManyPathsError(f"more than {cap} simple paths")
                    out.append(SimplePath(tuple(stack) + (y,)))
                elif y in allowed_interior:
                    stack.append(y)
                    on_path.add(y)
                    dfs(y)
                    stack.pop()
                    on_path.remove(y)

        dfs(a)
    return out


def enumerate_simple_paths(A: VertexSet, B: VertexSet, g: Graph, cap: int = 100_000) -> list[SimplePath]:
    """All simple paths starting in A, ending in B, with no other vertex in A u B.

    Deterministic lexicographic order on vertex sequences. Raises
    TooManyPathsError as soon as the count would exceed ``cap``.
    """
    if len(A) == 0 or len(B) == 0:
        raise GraphError("path endpoints must be nonempty sets")
    if not A.isdisjoint(B):
        raise GraphError("path endpoint sets must be disjoint")
    forbidden = set(A.ids) | set(B.ids)
    allowed = set(range(g.n)) - forbidden
    return _enumerate(g, A.ids, set(B.ids), allowed, cap)


def count_simple_paths(A: VertexSet, B: VertexSet, g: Graph) -> int:
    """Independent recount used by tests: reverse-order DFS, counting only."""
    forbidden = set(A.ids) | set(B.ids)
    allowed = set(range(g.n)) - forbidden
    sinks = set(B.ids)
    total = 0
    for a in sorted(A.ids, reverse=True):
        stack = [a]
        on_path = {a}

        def dfs(x: int) -> int:
            found = 0
            for y in reversed(g.neighbors(x)):
                y = int(y)
                if y in on_path:
                    continue
                if y in sinks:
                    found += 1
                elif y in allowed:
                    stack.append(y)
                    on_path.add(y)
                    found += dfs(y)
                    stack.pop()
                    on_path.remove(y)
            return found

        total += dfs(a)
    return total
