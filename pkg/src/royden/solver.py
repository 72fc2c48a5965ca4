"""p-harmonic Dirichlet solving and the harmonic/potential splitting.

The solver minimizes the edge-based energy

    E(f) = sum over counted edges {x, y} of |f(y) - f(x)|^p

over the free vertices, whose stationarity condition is exactly
Lap_p f(x) = 0 at every free vertex with a full counted neighborhood. The
p = 2 case is one sparse linear solve. For other p the engine warm-starts
from the p = 2 solution, takes damped Newton steps on a regularized Hessian
(the gradient is not Lipschitz near zero differences when p < 2), and
finishes with cyclic coordinate minimization: exact one-dimensional convex
updates by safeguarded bisection, swept color class by color class in a
fixed order so runs are deterministic. Coordinate updates never increase the
energy, which makes the fallback unconditionally convergent.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .calculus import VertexFunction, as_p, dirichlet_sum
from .errors import (
    DomainMismatchError,
    EmptyBoundaryError,
    MissingValueError,
    SingularSystemError,
)
from .families import Exhaustion
from .graphs import Graph, VertexSet, outer_boundary

logger = logging.getLogger("royden")

_BISECT_STEPS = 64


@dataclass(frozen=True)
class SolveReport:
    """Numerical record of one energy minimization."""

    iterations: int
    residual: float
    energy: float
    converged: bool
    wall_time: float
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class DirichletProblem:
    """Prescribed boundary values on the outer boundary of an interior set."""

    graph: Graph
    interior: VertexSet
    boundary_data: VertexFunction
    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", as_p(self.p))
        if len(self.interior) == 0:
            raise ValueError("interior set is empty")
        rim = outer_boundary(self.interior, self.graph)
        if len(rim) == 0:
            raise EmptyBoundaryError("interior has empty outer boundary")
        for v in rim.ids:
            if v not in self.boundary_data:
                raise MissingValueError(f"no boundary value at vertex {v}")
        object.__setattr__(self, "boundary_data", self.boundary_data.restrict(rim))

    @property
    def boundary(self) -> VertexSet:
        return self.boundary_data.domain


@dataclass(frozen=True)
class RoydenSplit:
    """f = u + h with h the stabilized p-harmonic part along an exhaustion."""

    harmonic: VertexFunction
    potential: VertexFunction
    radii: tuple[int, ...]
    level_sups: tuple[float, ...]
    drifts: tuple[float, ...]
    energy_harmonic: float
    energy_potential: float
    converged: bool


# ---------------------------------------------------------------------------
# Vectorized primitives over a counted edge list
# ---------------------------------------------------------------------------

def _signed_power_arr(t: np.ndarray, p: float) -> np.ndarray:
    return np.sign(t) * np.abs(t) ** (p - 1.0)


def _energy_of(values: np.ndarray, eu: np.ndarray, ev: np.ndarray, p: float) -> float:
    return float(np.sum(np.abs(values[ev] - values[eu]) ** p))


def _energy_exact(values: np.ndarray, eu: np.ndarray, ev: np.ndarray, p: float) -> float:
    return math.fsum(abs(d) ** p for d in (values[ev] - values[eu]).tolist())


def _gradient_all(n: int, values: np.ndarray, eu: np.ndarray, ev: np.ndarray, p: float) -> np.ndarray:
    """r with r[x] = sum over counted edges at x of |df|^{p-2} df toward x.

    The energy gradient is dE/df_x = -p * r[x]; r[x] equals Lap_p f(x) at any
    vertex whose full neighborhood is counted.
    """
    t = _signed_power_arr(values[ev] - values[eu], p)
    return np.bincount(eu, weights=t, minlength=n) - np.bincount(ev, weights=t, minlength=n)


def _edges_meeting(graph: Graph, mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    edges = graph.edges
    keep = mask[edges[:, 0]] | mask[edges[:, 1]]
    return edges[keep, 0].copy(), edges[keep, 1].copy()


def _anchored_partition(n: int, eu, ev, free_mask: np.ndarray) -> np.ndarray:
    """Mask of free vertices connected through free-free counted edges to a fixed one."""
    ff = free_mask[eu] & free_mask[ev]
    adj = sp.coo_matrix(
        (np.ones(int(ff.sum())), (eu[ff], ev[ff])), shape=(n, n)
    )
    ncomp, labels = sp.csgraph.connected_components(adj, directed=False)
    anchored_labels = np.zeros(ncomp, dtype=bool)
    mixed = free_mask[eu] ^ free_mask[ev]
    if mixed.any():
        free_end = np.where(free_mask[eu[mixed]], eu[mixed], ev[mixed])
        anchored_labels[labels[free_end]] = True
    return free_mask & anchored_labels[labels]


def _weighted_linear_solve(n, eu, ev, free_ids, values, weights) -> np.ndarray:
    """Minimize sum w_e (f(v)-f(u))^2 over the free vertices (fixed data in values)."""
    nf = len(free_ids)
    pos = np.full(n, -1, dtype=np.int64)
    pos[free_ids] = np.arange(nf)
    fu, fv = pos[eu], pos[ev]
    diag = np.bincount(fu[fu >= 0], weights=weights[fu >= 0], minlength=nf)
    diag = diag + np.bincount(fv[fv >= 0], weights=weights[fv >= 0], minlength=nf)
    both = (fu >= 0) & (fv >= 0)
    u_fixed = (fu < 0) & (fv >= 0)
    v_fixed = (fu >= 0) & (fv < 0)
    rhs = np.bincount(fv[u_fixed], weights=weights[u_fixed] * values[eu[u_fixed]], minlength=nf)
    rhs = rhs + np.bincount(fu[v_fixed], weights=weights[v_fixed] * values[ev[v_fixed]], minlength=nf)
    rows = np.concatenate([np.arange(nf), fu[both], fv[both]])
    cols = np.concatenate([np.arange(nf), fv[both], fu[both]])
    vals = np.concatenate([diag, -weights[both], -weights[both]])
    A = sp.coo_matrix((vals, (rows, cols)), shape=(nf, nf)).tocsc()
    try:
        x = spla.spsolve(A, rhs)
    except RuntimeError as exc:
        raise SingularSystemError(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("linear solve produced non-finite values")
    out = values.copy()
    out[free_ids] = x
    return out


def _color_classes(free_ids: np.ndarray, eu, ev, free_mask) -> list[np.ndarray]:
    """Greedy coloring of the free-free counted adjacency, by ascending id."""
    nbrs: dict[int, list[int]] = {int(v): [] for v in free_ids}
    for a, b in zip(eu.tolist(), ev.tolist()):
        if free_mask[a] and free_mask[b]:
            nbrs[a].append(b)
            nbrs[b].append(a)
    color: dict[int, int] = {}
    ncolors = 0
    for v in free_ids.tolist():
        used = {color[w] for w in nbrs[v] if w in color}
        c = 0
        while c in used:
            c += 1
        color[v] = c
        ncolors = max(ncolors, c + 1)
    return [
        np.array([v for v in free_ids.tolist() if color[v] == c], dtype=np.int64)
        for c in range(ncolors)
    ]


def _class_tables(class_ids: np.ndarray, nbr_lists: dict) -> tuple[np.ndarray, np.ndarray]:
    width = max(len(nbr_lists[int(v)]) for v in class_ids)
    idx = np.zeros((len(class_ids), width), dtype=np.int64)
    mask = np.zeros((len(class_ids), width), dtype=bool)
    for i, v in enumerate(class_ids.tolist()):
        row = nbr_lists[v]
        idx[i, : len(row)] = row
        mask[i, : len(row)] = True
    return idx, mask


def _sweep(values, class_tables, p, clamp) -> None:
    """One cyclic pass of exact coordinate minimization (in place)."""
    pm1 = p - 1.0
    for ids, idx, mask in class_tables:
        a = values[idx]
        lo = np.where(mask, a, np.inf).min(axis=1)
        hi = np.where(mask, a, -np.inf).max(axis=1)
        for _ in range(_BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            d = mid[:, None] - a
            s = np.where(mask, np.sign(d) * np.abs(d) ** pm1, 0.0).sum(axis=1)
            neg = s < 0.0
            lo = np.where(neg, mid, lo)
            hi = np.where(neg, hi, mid)
        t = 0.5 * (lo + hi)
        if clamp is not None:
            t = np.clip(t, clamp[0], clamp[1])
        values[ids] = t


def minimize_p_energy(
    n: int,
    eu: np.ndarray,
    ev: np.ndarray,
    free_ids: np.ndarray,
    values0: np.ndarray,
    p: float,
    tol: float,
    max_iter: int,
    clamp: tuple[float, float] | None = None,
    report_ids: np.ndarray | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Minimize the edge energy over the free vertices; deterministic.

    Returns the final value array over all n vertices and a report whose
    residual is the max energy gradient over ``report_ids`` (default: all
    free vertices). Iterations count Newton steps plus coordinate sweeps.
    """
    t0 = time.perf_counter()
    p = as_p(p)
    values = np.asarray(values0, dtype=float).copy()
    free_ids = np.asarray(sorted(int(v) for v in free_ids), dtype=np.int64)
    if report_ids is None:
        report_ids = free_ids
    report_ids = np.asarray(sorted(int(v) for v in report_ids), dtype=np.int64)

    free_mask = np.zeros(n, dtype=bool)
    free_mask[free_ids] = True

    # Free vertices with no counted edge, and free components that never touch
    # a fixed vertex, do not influence the energy; pin them to 0 so the linear
    # systems stay nonsingular (the "no admissible connection" degeneracy).
    flags: list[str] = []
    if len(eu) and len(free_ids):
        anchored = _anchored_partition(n, eu, ev, free_mask)
    else:
        anchored = np.zeros(n, dtype=bool)
    pinned = free_mask & ~anchored
    if pinned.any():
        values[pinned] = 0.0
        free_mask &= ~pinned
        free_ids = np.flatnonzero(free_mask)
        flags.append("pinned-degenerate-vertices")

    def finish(iters: int, converged: bool) -> tuple[np.ndarray, SolveReport]:
        r = _gradient_all(n, values, eu, ev, p)
        res = float(np.max(np.abs(r[report_ids]))) if len(report_ids) else 0.0
        rep = SolveReport(
            iterations=iters,
            residual=res,
            energy=_energy_exact(values, eu, ev, p),
            converged=converged,
            wall_time=time.perf_counter() - t0,
            flags=tuple(flags),
        )
        return values, rep

    if clamp is not None:
        values[free_ids] = np.clip(values[free_ids], clamp[0], clamp[1])
    if len(free_ids) == 0 or len(eu) == 0:
        return finish(0, True)

    # p = 2 warm start (exact solution when p == 2)
    values = _weighted_linear_solve(n, eu, ev, free_ids, values, np.ones(len(eu)))
    if clamp is not None:
        values[free_ids] = np.clip(values[free_ids], clamp[0], clamp[1])
    iters = 1

    def max_res() -> float:
        r = _gradient_all(n, values, eu, ev, p)
        return float(np.max(np.abs(r[free_ids])))

    if p == 2.0:
        res = max_res()
        if res <= tol:
            return finish(iters, True)

    diffs = np.abs(values[ev] - values[eu])
    scale = float(diffs.max()) if len(diffs) else 1.0
    eps = 0.1 * scale + 1e-12
    eps_floor = 1e-12
    energy = _energy_of(values, eu, ev, p)
    nbr_lists: dict[int, list[int]] | None = None
    class_tables = None
    newton_ok = p != 2.0
    sweeps_since_newton = 0
    last_rel_de = np.inf
    best_res = np.inf
    stalled = 0

    while iters < max_iter:
        res = max_res()
        if res <= tol and last_rel_de <= tol * tol:
            return finish(iters, True)
        if res <= tol and iters > 1 and not newton_ok:
            # a full sweep that changed nothing: energy is stationary
            return finish(iters, True)
        if res < 0.999 * best_res:
            best_res = res
            stalled = 0
        else:
            stalled += 1
            if stalled >= 30:
                flags.append("residual-floor")
                break

        if newton_ok:
            r = _gradient_all(n, values, eu, ev, p)
            d = values[ev] - values[eu]
            w = (d * d + eps * eps) ** ((p - 2.0) / 2.0)
            w = np.maximum(w, 1e-14 * (w.max() + 1e-300))
            try:
                trial_base = _weighted_linear_solve(n, eu, ev, free_ids, values, w * (p - 1.0))
            except SingularSystemError:
                newton_ok = False
                continue
            step = trial_base[free_ids] - values[free_ids]
            slope = float(np.dot(r[free_ids], step))  # dE/dt at 0 is -p * slope
            noise = 1e-14 * (1.0 + abs(energy))
            accepted = False
            if slope > 0.0:
                polish = p * slope <= noise  # decrease invisible at fp scale: go by residual
                t = 1.0
                for _ in range(40):
                    trial = values.copy()
                    trial[free_ids] = values[free_ids] + t * step
                    if clamp is not None:
                        e_raw = _energy_of(trial, eu, ev, p)
                        trial[free_ids] = np.clip(trial[free_ids], clamp[0], clamp[1])
                        e_new = _energy_of(trial, eu, ev, p)
                        assert e_new <= e_raw + 1e-12 * (1.0 + e_raw), "clamping increased the energy"
                    else:
                        e_new = _energy_of(trial, eu, ev, p)
                    if polish:
                        r_new = _gradient_all(n, trial, eu, ev, p)
                        if (
                            float(np.max(np.abs(r_new[free_ids]))) < res
                            and e_new <= energy + noise
                        ):
                            accepted = True
                            break
                    elif e_new <= energy - 1e-4 * t * p * slope:
                        accepted = True
                        break
                    t *= 0.5
            if accepted:
                last_rel_de = abs(energy - e_new) / max(abs(energy), 1e-300)
                values = trial
                energy = e_new
                eps = max(eps * (0.2 if t == 1.0 else 0.6), eps_floor)
                iters += 1
                logger.debug("newton it=%d res=%.3e energy=%.12e eps=%.1e t=%g", iters, res, energy, eps, t)
                continue
            newton_ok = False
            continue

        if class_tables is None:
            nbr_lists = {int(v): [] for v in free_ids}
            for a, b in zip(eu.tolist(), ev.tolist()):
                if free_mask[a]:
                    nbr_lists[a].append(b)
                if free_mask[b]:
                    nbr_lists[b].append(a)
            classes = _color_classes(free_ids, eu, ev, free_mask)
            class_tables = [(ids,) + _class_tables(ids, nbr_lists) for ids in classes]
        _sweep(values, class_tables, p, clamp)
        e_new = _energy_of(values, eu, ev, p)
        last_rel_de = abs(energy - e_new) / max(abs(energy), 1e-300)
        energy = e_new
        iters += 1
        sweeps_since_newton += 1
        if sweeps_since_newton >= 3 and p != 2.0:
            newton_ok = True
            sweeps_since_newton = 0
        logger.debug("sweep it=%d res=%.3e energy=%.12e", iters, res, energy)

    res = max_res()
    converged = res <= tol
    if not converged:
        flags.append("not-converged")
    return finish(iters, converged)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def _default_tol(p: float, tol: float | None) -> float:
    if tol is not None:
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        return float(tol)
    return 1e-10 if p == 2.0 else 1e-8


def solve_dirichlet(
    prob: DirichletProblem,
    tol: float | None = None,
    max_iter: int = 500,
) -> tuple[VertexFunction, SolveReport]:
    """Solve Lap_p f = 0 on the interior with the prescribed boundary values.

    The returned function lives on interior u boundary, equals the data on
    the boundary, and lies inside the boundary hull [min g, max g].
    """
    p = prob.p
    tol = _default_tol(p, tol)
    g = prob.graph
    S = prob.interior
    rim = prob.boundary
    domain = S.union(rim)
    g_lo = prob.boundary_data.min()
    g_hi = prob.boundary_data.max()

    if g_lo == g_hi:
        f = VertexFunction.constant(domain, g_lo)
        report = SolveReport(0, 0.0, 0.0, True, 0.0, ("constant-data",))
        return f, report

    values = np.zeros(g.n)
    for v, t in prob.boundary_data.items():
        values[v] = t
    eu, ev = _edges_meeting(g, S.as_mask())
    free = np.array(S.ids, dtype=np.int64)
    values, report = minimize_p_energy(
        g.n, eu, ev, free, values, p, tol, max_iter, clamp=(g_lo, g_hi)
    )
    f = VertexFunction(domain, {v: float(values[v]) for v in domain.ids})
    return f, report


def solve_p2_oracle(prob: DirichletProblem) -> VertexFunction:
    """Exact 2-harmonic solution by dense Gaussian elimination.

    Independent of the sparse fast path in solve_dirichlet: assembles the
    mean-value equations deg(x) f(x) = sum of neighbor values and eliminates
    with partial pivoting. Intended for small validation graphs.
    """
    if prob.p != 2.0:
        raise ValueError("the elimination oracle only handles p = 2")
    g = prob.graph
    ids = list(prob.interior.ids)
    pos = {v: i for i, v in enumerate(ids)}
    m = len(ids)
    A = np.zeros((m, m))
    b = np.zeros(m)
    for i, x in enumerate(ids):
        nbrs = g.neighbors(x)
        A[i, i] = len(nbrs)
        for y in nbrs:
            y = int(y)
            j = pos.get(y)
            if j is None:
                b[i] += prob.boundary_data(y)
            else:
                A[i, j] -= 1.0
    scale = np.abs(A).max()
    for col in range(m):
        piv = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[piv, col]) < 1e-14 * scale:
            raise SingularSystemError("zero pivot in elimination")
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        factor = A[col + 1:, col] / A[col, col]
        A[col + 1:, col:] -= factor[:, None] * A[col, col:]
        b[col + 1:] -= factor * b[col]
    x = np.zeros(m)
    for i in range(m - 1, -1, -1):
        x[i] = (b[i] - A[i, i + 1:] @ x[i + 1:]) / A[i, i]
    out = {v: float(x[i]) for i, v in enumerate(ids)}
    for v, t in prob.boundary_data.items():
        out[v] = t
    return VertexFunction.from_dict(g, out)


def residual(f: VertexFunction, S: VertexSet, p) -> float:
    """max over S of |Lap_p f(x)|."""
    p = as_p(p)
    g = S.graph
    values = np.full(g.n, np.nan)
    for v, t in f.items():
        values[v] = t
    eu, ev = _edges_meeting(g, S.as_mask())
    need = np.unique(np.concatenate([eu, ev])) if len(eu) else np.array([], dtype=np.int64)
    if np.isnan(values[need]).any():
        bad = int(need[np.isnan(values[need])][0])
        raise MissingValueError(f"vertex {bad} outside function domain")
    r = _gradient_all(g.n, values, eu, ev, p)
    ids = np.array(S.ids, dtype=np.int64)
    return float(np.max(np.abs(r[ids]))) if len(ids) else 0.0


def royden_decompose(
    f: VertexFunction,
    ex: Exhaustion,
    p,
    tol: float = 1e-4,
    solver_tol: float | None = None,
    max_iter: int = 500,
) -> RoydenSplit:
    """Split f into potential + harmonic parts along an exhaustion.

    At each level U_n the candidate harmonic part solves the Dirichlet
    problem on U_n with data f on dU_n (and equals f outside); the split
    converges when the sup-norm drift of successive candidates on the
    smallest level falls below ``tol``.
    """
    p = as_p(p)
    g = ex.ball.graph
    if f.domain.graph is not g:
        raise DomainMismatchError("function and exhaustion live on different graphs")
    if len(f.domain) != g.n:
        raise MissingValueError("decomposition needs f on the whole ball")
    full = VertexSet(g, range(g.n))
    energy_f = dirichlet_sum(f, full, p)
    inner_ids = ex.levels[0].ids

    h_prev: VertexFunction | None = None
    level_sups: list[float] = []
    drifts: list[float] = []
    h_ext = f
    for level in ex.levels:
        prob = DirichletProblem(g, level, f, p)
        sol, rep = solve_dirichlet(prob, tol=solver_tol, max_iter=max_iter)
        vals = dict(f.items())
        for v in level.ids:
            vals[v] = sol(v)
        h_ext = VertexFunction(f.domain, vals)
        energy_h = dirichlet_sum(h_ext, full, p)
        assert energy_h <= energy_f * (1 + 1e-9) + 1e-12, (
            f"level energy {energy_h} exceeds the energy {energy_f} of f"
        )
        level_sups.append(max(abs(sol(v)) for v in level.ids))
        if h_prev is not None:
            drifts.append(max(abs(h_ext(v) - h_prev(v)) for v in inner_ids))
        h_prev = h_ext

    converged = bool(drifts) and drifts[-1] < tol
    u = f - h_ext
    return RoydenSplit(
        harmonic=h_ext,
        potential=u,
        radii=ex.radii,
        level_sups=tuple(level_sups),
        drifts=tuple(drifts),
        energy_harmonic=dirichlet_sum(h_ext, full, p),
        energy_potential=dirichlet_sum(u, full, p),
        converged=converged,
    )
