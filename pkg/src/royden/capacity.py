"""p-capacity of condensers and the capacity-at-infinity classification.

cap_p(A, B, S) is the minimal edge energy of a potential that is 0 on A and
1 on B, the energy running over edges that meet S \\ (A u B) or join A to B
directly (each undirected edge once). Iterates are clamped to [0, 1], which
never increases the energy, so the minimizer is the p-harmonic extremal
potential off the plates.

Capacity at infinity truncates the ambient graph to a family ball at the
largest requested radius and moves the far plate outward level by level; the
resulting sequence is nonincreasing and its limit separates p-hyperbolic
(positive) from p-parabolic (zero) families. Any finite truncation only
supports a "-likely" verdict, and the classifier says so.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .calculus import VertexFunction, as_p
from .errors import TooFewPointsError
from .families import FamilyBall, GraphFamily
from .graphs import Graph, VertexSet, outer_boundary
from .solver import SolveReport, minimize_p_energy

logger = logging.getLogger("royden")


@dataclass(frozen=True)
class Condenser:
    """Plates A and B inside the closure of an ambient set S."""

    A: VertexSet
    B: VertexSet
    S: VertexSet

    def __post_init__(self):
        g = self.S.graph
        if self.A.graph is not g or self.B.graph is not g:
            raise ValueError("plates and ambient set must share one graph")
        if len(self.A) == 0 or len(self.B) == 0:
            raise ValueError("plates must be nonempty")
        if not self.A.isdisjoint(self.B):
            raise ValueError("plates must be disjoint")
        closure = self.S.union(outer_boundary(self.S, g))
        if not (self.A.issubset(closure) and self.B.issubset(closure)):
            raise ValueError("plates must lie in S united with its outer boundary")

    @property
    def graph(self) -> Graph:
        return self.S.graph


@dataclass(frozen=True)
class CapacitySequence:
    """Capacity values along an exhaustion, one row per truncation radius."""

    family: str
    p: float
    radii: tuple[int, ...]
    values: tuple[float, ...]
    residuals: tuple[float, ...]
    converged: tuple[bool, ...] = ()

    def entries(self):
        return list(zip(self.radii, self.values, self.residuals))

    def __len__(self) -> int:
        return len(self.radii)


@dataclass(frozen=True)
class Verdict:
    """Heuristic transience/recurrence classification of a capacity sequence."""

    classification: str  # parabolic-likely | hyperbolic-likely | inconclusive
    fitted_exponent: float
    last_value: float
    note: str


def _condenser_edges(c: Condenser) -> tuple[np.ndarray, np.ndarray]:
    g = c.graph
    edges = g.edges
    mid_mask = np.zeros(g.n, dtype=bool)
    mid_ids = set(c.S.ids) - set(c.A.ids) - set(c.B.ids)
    if mid_ids:
        mid_mask[list(mid_ids)] = True
    a_mask = c.A.as_mask()
    b_mask = c.B.as_mask()
    u, v = edges[:, 0], edges[:, 1]
    keep = mid_mask[u] | mid_mask[v]
    keep |= (a_mask[u] & b_mask[v]) | (b_mask[u] & a_mask[v])
    return u[keep].copy(), v[keep].copy()


def capacity(
    c: Condenser,
    p,
    tol: float | None = None,
    max_iter: int = 500,
) -> tuple[float, VertexFunction, SolveReport]:
    """Minimal edge energy of a unit potential between the plates.

    Returns (value, extremal potential, report). When no counted edge path
    joins the plates the value is exactly 0 and the report carries the
    ``no-admissible`` flag.
    """
    p = as_p(p)
    if tol is None:
        tol = 1e-10 if p == 2.0 else 1e-8
    g = c.graph
    eu, ev = _condenser_edges(c)

    values = np.zeros(g.n)
    for v in c.B.ids:
        values[v] = 1.0
    closure = c.S.union(outer_boundary(c.S, g)) if len(c.S) < g.n else c.S
    free = sorted(set(closure.ids) - set(c.A.ids) - set(c.B.ids))
    mid_ids = np.array(sorted(set(c.S.ids) - set(c.A.ids) - set(c.B.ids)), dtype=np.int64)

    values, report = minimize_p_energy(
        g.n,
        eu,
        ev,
        np.array(free, dtype=np.int64),
        values,
        p,
        tol,
        max_iter,
        clamp=(0.0, 1.0),
        report_ids=mid_ids,
    )

    flags = report.flags
    if len(eu) == 0 or not _plates_connected(g.n, eu, ev, c):
        flags = tuple(sorted(set(flags) | {"no-admissible"}))
    report = SolveReport(
        iterations=report.iterations,
        residual=report.residual,
        energy=report.energy,
        converged=report.converged,
        wall_time=report.wall_time,
        flags=flags,
    )
    domain_ids = sorted(set(free) | set(c.A.ids) | set(c.B.ids))
    u_fn = VertexFunction(
        VertexSet(g, domain_ids), {v: float(values[v]) for v in domain_ids}
    )
    value = 0.0 if "no-admissible" in flags else report.energy
    return value, u_fn, report


def _plates_connected(n: int, eu, ev, c: Condenser) -> bool:
    adj = sp.coo_matrix((np.ones(len(eu)), (eu, ev)), shape=(n, n))
    _, labels = sp.csgraph.connected_components(adj, directed=False)
    return bool(set(labels[list(c.A.ids)]) & set(labels[list(c.B.ids)]))


def capacity_at_infinity(
    A: VertexSet,
    family: GraphFamily,
    radii,
    p,
    tol: float | None = None,
    max_iter: int = 500,
    ball: FamilyBall | None = None,
) -> CapacitySequence:
    """cap_p(A, far plate at radius n, ball) for each n, largest ball as ambient.

    The far plate at level n is everything in the ball (shell included) at
    distance >= n from the base vertex; the sequence is nonincreasing.
    """
    p = as_p(p)
    radii = tuple(int(r) for r in radii)
    if any(b <= a for a, b in zip(radii, radii[1:])) or not radii:
        raise ValueError(f"radii must be a nonempty increasing sequence, got {radii}")
    if ball is None:
        ball = family.ball(radii[-1])
    elif ball.radius < radii[-1]:
        raise ValueError("provided ball is smaller than the largest radius")
    g = ball.graph
    if not A.issubset(ball.ids_within(radii[0])):
        raise ValueError("the near plate must lie inside the smallest ball")
    A = VertexSet(g, A.ids)
    interior = ball.interior

    values = []
    residuals = []
    converged = []
    prev = math.inf
    for n in radii:
        inner = ball.ids_within(n)
        far = VertexSet(g, set(range(g.n)) - set(inner.ids))
        cond = Condenser(A=A, B=far, S=interior)
        val, _, rep = capacity(cond, p, tol=tol, max_iter=max_iter)
        logger.info("capinf %s p=%g n=%d cap=%.12g residual=%.3g", ball.family.tag, p, n, val, rep.residual)
        assert val <= prev + 1e-12, f"capacity sequence increased at radius {n}"
        prev = val
        values.append(val)
        residuals.append(rep.residual)
        converged.append(rep.converged)
    return CapacitySequence(
        family=ball.family.tag,
        p=p,
        radii=radii,
        values=tuple(values),
        residuals=tuple(residuals),
        converged=tuple(converged),
    )


def classify_parabolicity(
    seq: CapacitySequence,
    eps_zero: float = 1e-3,
    min_points: int = 3,
    flatness: float = 1e-4,
) -> Verdict:
    """Deterministic heuristic verdict from a finite capacity sequence.

    parabolic-likely when the log-log fitted decay exponent is <= -0.2 on a
    decreasing sequence, or the last value is below eps_zero; hyperbolic-likely
    when successive differences have flattened below ``flatness`` while the
    value stays above 10 * eps_zero; otherwise inconclusive.
    """
    if len(seq) < min_points:
        raise TooFewPointsError(f"need at least {min_points} points, got {len(seq)}")
    vals = np.array(seq.values)
    rads = np.array(seq.radii, dtype=float)
    positive = vals > 0
    if positive.sum() >= 2:
        slope = float(
            np.polyfit(np.log(rads[positive]), np.log(vals[positive]), 1)[0]
        )
    else:
        slope = 0.0
    last = float(vals[-1])
    decreasing = bool(np.all(np.diff(vals) <= 1e-12))
    last_gap = float(abs(vals[-1] - vals[-2]))

    note = (
        f"heuristic from {len(seq)} finite truncations; no finite computation "
        f"certifies the limit (fitted exponent {slope:.3g}, last gap {last_gap:.3g})"
    )
    if (decreasing and slope <= -0.2) or last < eps_zero:
        return Verdict("parabolic-likely", slope, last, note)
    if last_gap < flatness and last > 10.0 * eps_zero:
        return Verdict("hyperbolic-likely", slope, last, note)
    return Verdict("inconclusive", slope, last, note)
