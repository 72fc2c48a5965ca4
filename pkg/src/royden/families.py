"""Infinite graph families (Z, Z2, Z3, d-regular trees) truncated to metric balls.

A family produces, for any radius n, the finite graph induced by
B_n(o) u dB_n(o), where B_n(o) is the open metric ball (distance < n) around
the base vertex and dB_n(o) its outer boundary (distance exactly n). Vertex
ids are assigned shell by shell in a fixed coordinate order, so the same
vertex keeps the same id at every radius.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NonIncreasingRadiiError, UnsupportedFamilyError
from .graphs import Graph, VertexSet, _graph_from_edge_array, is_connected


class GraphFamily:
    """Base class; subclasses enumerate shells and adjacency in coordinates."""

    tag: str = ""
    degree: int = 0

    def shell(self, s: int) -> list:
        """Coordinates at distance exactly ``s`` from the base vertex, sorted."""
        raise NotImplementedError

    def coordinate_neighbors(self, coord) -> list:
        raise NotImplementedError

    def coordinate_distance(self, coord) -> int:
        raise NotImplementedError

    def ball(self, n: int) -> "FamilyBall":
        """Finite graph on B_n(o) u dB_n(o) with interior/boundary vertex sets."""
        if n < 1:
            raise ValueError(f"radius must be >= 1, got {n}")
        coords: list = []
        dist: list[int] = []
        for s in range(n + 1):
            layer = self.shell(s)
            coords.extend(layer)
            dist.extend([s] * len(layer))
        index = {c: i for i, c in enumerate(coords)}
        edges = []
        for i, c in enumerate(coords):
            for nc in self.coordinate_neighbors(c):
                j = index.get(nc)
                if j is not None and j < i:
                    edges.append((j, i))
        edge_arr = np.array(edges, dtype=np.int64)
        edge_arr = edge_arr[np.lexsort((edge_arr[:, 1], edge_arr[:, 0]))]
        graph = _graph_from_edge_array(len(coords), edge_arr, check_connected=False)
        assert graph.k == self.degree, f"degree bound {graph.k} != {self.degree} for {self.tag}"
        dist_arr = np.array(dist, dtype=np.int64)
        interior = VertexSet(graph, np.flatnonzero(dist_arr < n))
        boundary = VertexSet(graph, np.flatnonzero(dist_arr == n))
        return FamilyBall(
            family=self,
            radius=n,
            graph=graph,
            interior=interior,
            boundary=boundary,
            coords=tuple(coords),
            dist=dist_arr,
        )

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.tag!r})"


@dataclass(frozen=True)
class FamilyBall:
    """A family truncated at radius n, with id<->coordinate bookkeeping."""

    family: GraphFamily
    radius: int
    graph: Graph
    interior: VertexSet
    boundary: VertexSet
    coords: tuple
    dist: np.ndarray
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._index.update({c: i for i, c in enumerate(self.coords)})

    def id_of(self, coord) -> int:
        """Vertex id of a coordinate; stable across radii."""
        try:
            return self._index[coord]
        except KeyError:
            raise KeyError(f"coordinate {coord!r} outside ball of radius {self.radius}") from None

    def ids_within(self, r: int) -> VertexSet:
        """Ids at distance < r (the open ball B_r as a subset of this ball)."""
        if r > self.radius + 1:
            raise ValueError(f"radius {r} exceeds ball radius {self.radius}")
        return VertexSet(self.graph, np.flatnonzero(self.dist < r))

    @property
    def origin(self) -> int:
        return 0


class LineFamily(GraphFamily):
    """The integer line Z."""

    tag = "z"
    degree = 2

    def shell(self, s: int) -> list:
        return [0] if s == 0 else [-s, s]

    def coordinate_neighbors(self, coord) -> list:
        return [coord - 1, coord + 1]

    def coordinate_distance(self, coord) -> int:
        return abs(coord)


class PlaneFamily(GraphFamily):
    """The square lattice Z^2 with the l1 (shortest-path) metric."""

    tag = "z2"
    degree = 4

    def shell(self, s: int) -> list:
        if s == 0:
            return [(0, 0)]
        out = []
        for x in range(-s, s + 1):
            r = s - abs(x)
            if r == 0:
                out.append((x, 0))
            else:
                out.append((x, -r))
                out.append((x, r))
        return sorted(out)

    def coordinate_neighbors(self, coord) -> list:
        x, y = coord
        return [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)]

    def coordinate_distance(self, coord) -> int:
        return abs(coord[0]) + abs(coord[1])


class SpaceFamily(GraphFamily):
    """The cubic lattice Z^3."""

    tag = "z3"
    degree = 6

    def shell(self, s: int) -> list:
        if s == 0:
            return [(0, 0, 0)]
        out = []
        for x in range(-s, s + 1):
            rx = s - abs(x)
            for y in range(-rx, rx + 1):
                r = rx - abs(y)
                if r == 0:
                    out.append((x, y, 0))
                else:
                    out.append((x, y, -r))
                    out.append((x, y, r))
        return sorted(out)

    def coordinate_neighbors(self, coord) -> list:
        x, y, z = coord
        return [
            (x - 1, y, z), (x + 1, y, z),
            (x, y - 1, z), (x, y + 1, z),
            (x, y, z - 1), (x, y, z + 1),
        ]

    def coordinate_distance(self, coord) -> int:
        return abs(coord[0]) + abs(coord[1]) + abs(coord[2])


class TreeFamily(GraphFamily):
    """The d-regular infinite tree T_d, vertices addressed by root paths.

    The root is the empty tuple; its children are (0,), ..., (d-1,); every
    non-root vertex has d-1 children indexed 0..d-2.
    """

    def __init__(self, d: int):
        if d < 3:
            raise UnsupportedFamilyError(f"tree degree must be >= 3, got {d}")
        self.d = d
        self.tag = f"tree:{d}"
        self.degree = d

    def shell(self, s: int) -> list:
        if s == 0:
            return [()]
        layer = [(c,) for c in range(self.d)]
        for _ in range(s - 1):
            layer = [c + (i,) for c in layer for i in range(self.d - 1)]
        return layer

    def coordinate_neighbors(self, coord) -> list:
        if coord == ():
            return [(c,) for c in range(self.d)]
        kids = self.d - 1
        return [coord[:-1]] + [coord + (i,) for i in range(kids)]

    def coordinate_distance(self, coord) -> int:
        return len(coord)


_FAMILIES = {"z": LineFamily, "z2": PlaneFamily, "z3": SpaceFamily}


def parse_family(tag: str) -> GraphFamily:
    """Family from its CLI tag: z, z2, z3, or tree:<d>."""
    tag = tag.strip().lower()
    if tag in _FAMILIES:
        return _FAMILIES[tag]()
    if tag.startswith("tree:"):
        try:
            d = int(tag.split(":", 1)[1])
        except ValueError:
            raise UnsupportedFamilyError(f"bad tree degree in {tag!r}") from None
        return TreeFamily(d)
    raise UnsupportedFamilyError(f"unknown family {tag!r}; expected z, z2, z3, or tree:<d>")


def family_ball(family: GraphFamily, n: int) -> tuple[Graph, VertexSet, VertexSet]:
    """(graph, interior, boundary) of the family truncated at radius ``n``."""
    ball = family.ball(n)
    return ball.graph, ball.interior, ball.boundary


@dataclass(frozen=True)
class Exhaustion:
    """Strictly increasing finite connected vertex sets inside one ball graph."""

    ball: FamilyBall
    radii: tuple[int, ...]
    levels: tuple[VertexSet, ...]

    def __post_init__(self):
        prev = None
        for r, level in zip(self.radii, self.levels):
            if prev is not None:
                if not (prev.issubset(level) and len(prev) < len(level)):
                    raise NonIncreasingRadiiError("exhaustion levels must strictly increase")
            if not is_connected(self.ball.graph, level.ids):
                raise ValueError(f"exhaustion level at radius {r} is not connected")
            prev = level

    def __len__(self) -> int:
        return len(self.levels)


def build_exhaustion(family: GraphFamily, radii: Sequence[int], ball: FamilyBall | None = None) -> Exhaustion:
    """Exhaustion U_i = B_{r_i}(o) inside the ball at the largest radius.

    Pass ``ball`` (radius >= max radii) to reuse an existing truncation.
    """
    radii = tuple(int(r) for r in radii)
    if not radii:
        raise NonIncreasingRadiiError("empty radius list")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise NonIncreasingRadiiError(f"radii must be strictly increasing, got {radii}")
    if radii[0] < 1:
        raise NonIncreasingRadiiError("radii must be >= 1")
    if ball is None:
        ball = family.ball(radii[-1])
    levels = tuple(ball.ids_within(r) for r in radii)
    return Exhaustion(ball=ball, radii=radii, levels=levels)


# ---------------------------------------------------------------------------
# Direction specs: the fixed menu of "regions reaching infinity" used by the
# boundary probes. Lattices split by the sign of the first coordinate; trees
# take the subtree hanging below one root neighbor.
# ---------------------------------------------------------------------------

class Direction:
    """A family-relative region; membership is decided per coordinate."""

    label: str = ""

    def accepts(self, family: GraphFamily) -> bool:
        raise NotImplementedError

    def contains(self, coord) -> bool:
        raise NotImplementedError

    def region_ids(self, ball: FamilyBall) -> VertexSet:
        ids = [i for i, c in enumerate(ball.coords) if self.contains(c)]
        return VertexSet(ball.graph, ids)

    def shell_ids(self, ball: FamilyBall) -> VertexSet:
        ids = [i for i in ball.boundary.ids if self.contains(ball.coords[i])]
        return VertexSet(ball.graph, ids)

    def __repr__(self) -> str:
        return f"Direction({self.label!r})"


class HalfSpace(Direction):
    """Lattice vertices with sign * first coordinate > 0."""

    def __init__(self, sign: int):
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.sign = sign
        self.label = "x+" if sign > 0 else "x-"

    def accepts(self, family: GraphFamily) -> bool:
        return isinstance(family, (LineFamily, PlaneFamily, SpaceFamily))

    def contains(self, coord) -> bool:
        first = coord if isinstance(coord, int) else coord[0]
        return self.sign * first > 0


class Subtree(Direction):
    """Tree vertices below one root neighbor (root excluded)."""

    def __init__(self, child: int):
        if child < 0:
            raise ValueError("child index must be >= 0")
        self.child = child
        self.label = f"subtree:{child}"

    def accepts(self, family: GraphFamily) -> bool:
        return isinstance(family, TreeFamily) and self.child < family.d

    def contains(self, coord) -> bool:
        return len(coord) >= 1 and coord[0] == self.child


def default_directions(family: GraphFamily) -> tuple[Direction, Direction]:
    """The canonical (plus, minus) pair for a family."""
    if isinstance(family, TreeFamily):
        return Subtree(0), Subtree(1)
    return HalfSpace(1), HalfSpace(-1)
