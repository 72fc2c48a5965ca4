"""p-extremal length of path families via cutting planes, plus a brute-force oracle.

The extremal length of a path family Q is 1 / inf E_p(w), the infimum of
E_p(w) = sum_e w(e)^p over nonnegative edge weights giving every path in Q
w-length at least 1. The production solver generates constraints lazily:
a nonnegative-weight shortest path (deterministic ties, lowest vertex id)
acts as the separation oracle, and each restricted problem is solved in the
Lagrangian dual by cyclic coordinate ascent, where the optimal weight has
the closed form w_e = (sum of multipliers of cuts through e / p)^(1/(p-1)).

The oracle route materializes every simple-path constraint and hands the
convex program to an interior-point solver; it is meant for tiny graphs and
is kept independent of the cutting-plane machinery.
"""

from __future__ import annotations

import heapq
import logging
import math
import weakref
from dataclasses import dataclass

import numpy as np

from .calculus import as_p
from .errors import CutBudgetExceededError, GraphError
from .families import FamilyBall
from .graphs import Graph, VertexSet
from .paths import SimplePath, _enumerate

logger = logging.getLogger("royden")

INFINITE_LENGTH = math.inf


@dataclass(frozen=True)
class EdgeWeight:
    """Nonnegative weights on the edges of one graph, in graph.edges order."""

    graph: Graph
    values: np.ndarray
    p: float
    energy: float

    def __post_init__(self):
        if len(self.values) != self.graph.num_edges:
            raise GraphError("one weight per graph edge required")
        if len(self.values) and (not np.all(np.isfinite(self.values)) or self.values.min() < 0.0):
            raise ValueError("edge weights must be finite and nonnegative")
        if not math.isfinite(self.energy):
            raise ValueError("edge weight energy must be finite")

    def __getitem__(self, edge: tuple[int, int]) -> float:
        a, b = (edge[0], edge[1]) if edge[0] < edge[1] else (edge[1], edge[0])
        idx = _edge_index(self.graph).get((a, b))
        if idx is None:
            raise GraphError(f"no edge {edge} in graph")
        return float(self.values[idx])


@dataclass(frozen=True)
class PathFamilySpec:
    """A family of simple paths: sources -> sinks through an allowed interior."""

    graph: Graph
    sources: VertexSet
    sinks: VertexSet
    interior: VertexSet
    kind: str

    @classmethod
    def between(cls, A: VertexSet, B: VertexSet, S: VertexSet) -> "PathFamilySpec":
        """All simple A-to-B paths whose interior vertices stay in S."""
        g = S.graph
        if len(A) == 0 or len(B) == 0:
            raise GraphError("path family endpoints must be nonempty")
        if not A.isdisjoint(B):
            raise GraphError("path family endpoints must be disjoint")
        interior = S.difference(A).difference(B)
        return cls(graph=g, sources=A, sinks=B, interior=interior, kind="between")

    @classmethod
    def to_shell(cls, ball: FamilyBall, a: int) -> "PathFamilySpec":
        """All simple paths from ``a`` to the outer shell of a family ball."""
        g = ball.graph
        sources = VertexSet(g, [a])
        interior = ball.interior.difference(sources)
        return cls(graph=g, sources=sources, sinks=ball.boundary, interior=interior, kind="to-shell")


_EDGE_INDEX_CACHE = weakref.WeakKeyDictionary()


def _edge_index(g: Graph) -> dict[tuple[int, int], int]:
    idx = _EDGE_INDEX_CACHE.get(g)
    if idx is None:
        idx = {(int(a), int(b)): i for i, (a, b) in enumerate(g.edges)}
        _EDGE_INDEX_CACHE[g] = idx
    return idx


def _incidence(g: Graph) -> dict[int, list[tuple[int, int]]]:
    inc: dict[int, list[tuple[int, int]]] = {v: [] for v in range(g.n)}
    for i, (a, b) in enumerate(g.edges):
        inc[int(a)].append((int(b), i))
        inc[int(b)].append((int(a), i))
    for v in inc:
        inc[v].sort()
    return inc


def _shortest_family_path(
    spec: PathFamilySpec, weights: np.ndarray, inc
) -> tuple[float, SimplePath] | None:
    """Minimum-weight family path by Dijkstra; ties resolved by lowest id."""
    dist: dict[int, float] = {}
    parent: dict[int, int] = {}
    settled: set[int] = set()
    interior = spec.interior._set
    sinks = spec.sinks._set
    heap: list[tuple[float, int]] = []
    for s in sorted(spec.sources.ids):
        dist[s] = 0.0
        heapq.heappush(heap, (0.0, s))
    while heap:
        d, x = heapq.heappop(heap)
        if x in settled or d > dist.get(x, math.inf):
            continue
        settled.add(x)
        if x in sinks:
            seq = [x]
            while seq[-1] in parent:
                seq.append(parent[seq[-1]])
            return d, SimplePath(tuple(reversed(seq)))
        for y, ei in inc[x]:
            if y in settled or not (y in interior or y in sinks):
                continue
            nd = d + float(weights[ei])
            if nd < dist.get(y, math.inf):
                dist[y] = nd
                parent[y] = x
                heapq.heappush(heap, (nd, y))
    return None


def _dual_objective(lam: np.ndarray, s_used: np.ndarray, p: float) -> float:
    q = p / (p - 1.0)
    return float(lam.sum() - (p - 1.0) * np.sum((s_used / p) ** q))


def _dual_kkt_error(M: np.ndarray, lam: np.ndarray, s_used: np.ndarray, p: float) -> float:
    lengths = M @ (s_used / p) ** (1.0 / (p - 1.0))
    viol = np.where(lam > 0.0, np.abs(lengths - 1.0), np.maximum(0.0, 1.0 - lengths))
    return float(viol.max()) if len(viol) else 0.0


def _dual_newton(M: np.ndarray, lam: np.ndarray, p: float, inner_tol: float):
    """Projected Newton on the restricted dual (tiny dense system).

    Quadratic convergence takes over where cyclic ascent crawls, which
    happens whenever the cut paths share most of their edges.
    """
    r = 1.0 / (p - 1.0)
    s_used = M.T @ lam
    obj = _dual_objective(lam, s_used, p)
    for _ in range(60):
        omega = (s_used / p) ** r
        grad = 1.0 - M @ omega
        free = (lam > 0.0) | (grad > 0.0)
        if not free.any():
            break
        with np.errstate(divide="ignore"):
            kappa = (r / p) * (s_used / p) ** (r - 1.0)
        kappa = np.where(np.isfinite(kappa), kappa, 0.0)
        kappa = np.maximum(kappa, 1e-14)
        Mf = M[free]
        H = (Mf * kappa) @ Mf.T
        H[np.diag_indices_from(H)] += 1e-13 * (1.0 + np.trace(H))
        try:
            delta = np.linalg.solve(H, grad[free])
        except np.linalg.LinAlgError:
            break
        improved = False
        t = 1.0
        for _ in range(30):
            trial = lam.copy()
            trial[free] = np.maximum(lam[free] + t * delta, 0.0)
            s_trial = M.T @ trial
            obj_trial = _dual_objective(trial, s_trial, p)
            if obj_trial > obj:
                lam, s_used, obj = trial, s_trial, obj_trial
                improved = True
                break
            t *= 0.5
        if not improved:
            break
        if _dual_kkt_error(M, lam, s_used, p) <= inner_tol:
            break
    return lam, s_used


def _dual_coordinate_ascent(
    cut_edges: list[np.ndarray],
    lam: np.ndarray,
    s: np.ndarray,
    p: float,
    inner_tol: float,
    max_sweeps: int = 200,
) -> tuple[np.ndarray, np.ndarray]:
    """Maximize the restricted dual; each coordinate makes its path length 1.

    ``s`` is the per-edge multiplier load (columns of the cut matrix times
    lam), updated in place and returned with lam. Cyclic exact coordinate
    maximization does the early work; when its progress per sweep slows, a
    projected Newton step on the same dual finishes to tolerance.
    """
    r = 1.0 / (p - 1.0)

    def length_at(edges: np.ndarray, base: np.ndarray, t: float) -> float:
        return float(np.sum(((base + t) / p) ** r))

    used = np.unique(np.concatenate(cut_edges)) if cut_edges else np.array([], dtype=np.int64)
    col_of = {int(e): j for j, e in enumerate(used)}
    M = np.zeros((len(cut_edges), len(used)))
    for i, edges in enumerate(cut_edges):
        for e in edges.tolist():
            M[i, col_of[e]] = 1.0

    prev_err = math.inf
    for sweep in range(max_sweeps):
        for i, edges in enumerate(cut_edges):
            base = s[edges] - lam[i]
            if length_at(edges, base, 0.0) >= 1.0:
                t = 0.0
            else:
                hi = max(lam[i], 1.0)
                while length_at(edges, base, hi) < 1.0:
                    hi *= 2.0
                lo = 0.0
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    if length_at(edges, base, mid) < 1.0:
                        lo = mid
                    else:
                        hi = mid
                t = 0.5 * (lo + hi)
            s[edges] = base + t
            lam[i] = t
        # the error that matters is measured after the whole sweep: updating a
        # later multiplier moves every earlier path that shares its edges
        err = _dual_kkt_error(M, lam, s[used], p)
        if err <= inner_tol:
            break
        if sweep >= 1 and err > 0.3 * prev_err:
            lam, s_used = _dual_newton(M, lam, p, inner_tol)
            s[:] = 0.0
            s[used] = s_used
            err = _dual_kkt_error(M, lam, s_used, p)
            if err <= inner_tol:
                break
        prev_err = err
    return lam, s


def extremal_length(
    spec: PathFamilySpec,
    p,
    tol: float = 1e-9,
    max_cuts: int = 500,
) -> tuple[float, EdgeWeight, list[SimplePath]]:
    """(lambda_p, optimal weight, active cut paths) for a path family.

    An empty family gets the distinguished value math.inf with a zero weight.
    Raises CutBudgetExceededError if the separation loop cannot close the gap
    within ``max_cuts`` constraint generations.
    """
    p = as_p(p)
    g = spec.graph
    m = g.num_edges
    inc = _incidence(g)
    s = np.zeros(m)
    lam = np.zeros(0)
    cut_edges: list[np.ndarray] = []
    cut_paths: list[SimplePath] = []
    seen: set[tuple[int, ...]] = set()
    inner_tol = min(tol * 1e-2, 1e-11)
    r = 1.0 / (p - 1.0)
    edge_index = _edge_index(g)

    first = _shortest_family_path(spec, np.zeros(m), inc)
    if first is None:
        weight = EdgeWeight(graph=g, values=np.zeros(m), p=p, energy=0.0)
        return INFINITE_LENGTH, weight, []

    length = 0.0
    for _ in range(max_cuts):
        omega = (s / p) ** r
        hit = _shortest_family_path(spec, omega, inc)
        assert hit is not None
        length, path = hit
        if length >= 1.0 - tol:
            break
        key = path.vertices
        if key in seen:
            inner_tol *= 1e-2
            if inner_tol < 1e-15:
                raise CutBudgetExceededError(
                    f"separation stalled on a repeated path at length {length}"
                )
        else:
            seen.add(key)
            cut_edges.append(np.array([edge_index[e] for e in path.edges], dtype=np.int64))
            cut_paths.append(path)
            lam = np.append(lam, 0.0)
        lam, s = _dual_coordinate_ascent(cut_edges, lam, s, p, inner_tol)
        logger.debug("cut %d: shortest length %.12g", len(cut_paths), length)
    else:
        raise CutBudgetExceededError(f"no convergence within {max_cuts} cuts")

    omega = (s / p) ** r / length  # scaling by the final shortest length keeps it admissible
    energy = math.fsum(float(t) ** p for t in omega)
    weight = EdgeWeight(graph=g, values=omega, p=p, energy=energy)
    lam_max = lam.max() if len(lam) else 0.0
    active = [path for path, li in zip(cut_paths, lam) if li > 1e-12 * max(lam_max, 1.0)]
    return 1.0 / energy, weight, active


def extremal_length_bruteforce(
    A: VertexSet,
    B: VertexSet,
    S: VertexSet,
    g: Graph,
    p,
    cap: int = 20_000,
) -> float:
    """lambda_p with every simple-path constraint materialized (tiny graphs only).

    The convex program goes to an interior-point solver, which keeps this
    route independent of the cutting-plane code it cross-checks.
    """
    p = as_p(p)
    allowed = set(S.ids) - set(A.ids) - set(B.ids)
    paths = _enumerate(g, A.ids, set(B.ids), allowed, cap)
    if not paths:
        return INFINITE_LENGTH
    import cvxpy as cp

    edge_index = _edge_index(g)
    m = g.num_edges
    rows = np.zeros((len(paths), m))
    for i, path in enumerate(paths):
        for e in path.edges:
            rows[i, edge_index[e]] = 1.0
    w = cp.Variable(m, nonneg=True)
    objective = cp.Minimize(cp.sum(cp.power(w, p)))
    problem = cp.Problem(objective, [rows @ w >= 1.0])
    try:
        problem.solve(solver=cp.CLARABEL)
    except (cp.SolverError, TypeError):
        problem.solve()
    if problem.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"oracle solve ended with status {problem.status}")
    # rescale to exact admissibility before reporting
    lengths = rows @ np.maximum(np.asarray(w.value), 0.0)
    shortest = float(lengths.min())
    energy = math.fsum(max(float(t), 0.0) ** p for t in w.value) / shortest ** p
    return 1.0 / energy
