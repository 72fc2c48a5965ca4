"""Computable surrogates for boundary-at-infinity structure.

Nothing at a finite truncation can certify behavior at infinity, so every
verdict here is "-likely" and is derived from stabilization of a nested
sequence of Dirichlet solves:

* inner_potential: potentials that vanish on the rim of a growing region and
  are 1 far out; a region whose limit potential keeps supremum near 1 with
  bounded energy behaves like a massive set (it carries escape routes).
* bhd_probe: two-direction boundary data (1 / 0, filler 0.5); a persistent
  oscillation on a fixed inner ball signals a nonconstant bounded p-harmonic
  limit, i.e. more than one boundary direction matters.
* level_set_components: connected components of a superlevel set, the
  candidate massive regions of a probe function.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .calculus import VertexFunction, as_p, dirichlet_sum
from .errors import EmptyOuterBoundaryError, OverlappingDirectionsError, UnsupportedFamilyError
from .families import Direction, GraphFamily
from .graphs import VertexSet, components, outer_boundary
from .solver import DirichletProblem, solve_dirichlet

logger = logging.getLogger("royden")


@dataclass(frozen=True)
class InnerPotentialResult:
    """Level-by-level potentials on a region, with a heuristic massiveness verdict."""

    region: str
    p: float
    radii: tuple[int, ...]
    approximants: tuple[VertexFunction, ...]
    limit_estimate: VertexFunction | None
    sup_estimate: float | None
    energies: tuple[float, ...]
    residuals: tuple[float, ...]
    verdict: str  # massive-likely | not-massive-likely | inconclusive


@dataclass(frozen=True)
class ProbeResult:
    """Two-direction probe for nonconstant bounded p-harmonic behavior."""

    family: str
    p: float
    radii: tuple[int, ...]
    h: VertexFunction
    oscillation: float
    energy: float
    residual: float
    verdict: str  # >=2-likely | trivial-likely | inconclusive
    table: tuple[dict, ...]


def _energy_trend_ok(energies, slack: float = 0.05) -> bool:
    """Nonincreasing trend over the last three levels, within relative slack."""
    window = list(energies[-3:])
    return all(b <= a * (1.0 + slack) + 1e-15 for a, b in zip(window, window[1:]))


def level_set_components(h: VertexFunction, eps: float) -> list[VertexSet]:
    """Connected components of {x : h(x) > 1 - eps}, largest first.

    Requires 0 <= h <= 1 and 0 < eps < 1. Components tie-break by smallest id.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    lo, hi = h.min(), h.max()
    if lo < 0.0 or hi > 1.0:
        raise ValueError(f"function range [{lo}, {hi}] outside [0, 1]")
    g = h.domain.graph
    ids = [v for v, t in h.items() if t > 1.0 - eps]
    comps = components(g, ids)
    comps.sort(key=lambda c: (-len(c), c[0]))
    return [VertexSet(g, c) for c in comps]


def inner_potential(
    D: Direction,
    family: GraphFamily,
    radii,
    p,
    tol: float | None = None,
    stabilization: float = 0.02,
) -> InnerPotentialResult:
    """Potentials vanishing on the region rim, 1 beyond each truncation radius.

    At radius n the solve is free on D intersected with the open ball B_n,
    with data 0 on the outer boundary of the region and 1 on the region part
    at distance >= n. The approximants decrease pointwise; the limit sup is
    estimated over vertices where the last two levels agree within
    ``stabilization``.
    """
    p = as_p(p)
    if tol is None:
        tol = 1e-10
    radii = tuple(int(r) for r in radii)
    if len(radii) < 2 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("need at least two strictly increasing radii")
    if not D.accepts(family):
        raise UnsupportedFamilyError(f"direction {D.label!r} does not apply to {family.tag}")

    ball = family.ball(radii[-1])
    g = ball.graph
    region = D.region_ids(ball)
    if len(region) == 0:
        raise ValueError("region is empty in the ambient ball")
    rim = outer_boundary(region, g)
    if len(rim) == 0:
        raise EmptyOuterBoundaryError(f"region {D.label!r} has no outer boundary")

    approximants: list[VertexFunction] = []
    energies: list[float] = []
    residuals: list[float] = []
    free_sets: list[VertexSet] = []
    prev: VertexFunction | None = None
    for n in radii:
        free = region.intersection(ball.ids_within(n))
        if len(free) == 0:
            raise ValueError(f"region has no interior vertices inside radius {n}")
        far = region.difference(free)
        data = {v: 0.0 for v in rim.ids}
        data.update({v: 1.0 for v in far.ids})
        prob = DirichletProblem(g, free, VertexFunction.from_dict(g, data), p)
        sol, rep = solve_dirichlet(prob, tol=tol)
        full = dict(data)
        full.update({v: sol(v) for v in free.ids})
        approx = VertexFunction.from_dict(g, full)
        if prev is not None:
            worst = max(approx(v) - prev(v) for v in free_sets[-1].ids)
            assert worst <= 1e-10, f"approximants increased by {worst} at radius {n}"
        assert 0.0 <= approx.min() and approx.max() <= 1.0
        approximants.append(approx)
        free_sets.append(free)
        energies.append(dirichlet_sum(approx, free, p))
        residuals.append(rep.residual)
        logger.info("inner potential %s p=%g n=%d energy=%.6g", D.label, p, n, energies[-1])
        prev = approx

    last, before = approximants[-1], approximants[-2]
    common = free_sets[-2]
    stable_ids = [v for v in common.ids if abs(last(v) - before(v)) <= stabilization]
    if stable_ids:
        limit_estimate = VertexFunction(VertexSet(g, stable_ids), {v: last(v) for v in stable_ids})
        sup_estimate = limit_estimate.max()
    else:
        limit_estimate = None
        sup_estimate = None

    if sup_estimate is None:
        verdict = "inconclusive"
    elif sup_estimate > 0.9 and _energy_trend_ok(energies):
        verdict = "massive-likely"
    elif sup_estimate < 0.1:
        verdict = "not-massive-likely"
    else:
        verdict = "inconclusive"

    return InnerPotentialResult(
        region=D.label,
        p=p,
        radii=radii,
        approximants=tuple(approximants),
        limit_estimate=limit_estimate,
        sup_estimate=sup_estimate,
        energies=tuple(energies),
        residuals=tuple(residuals),
        verdict=verdict,
    )


def bhd_probe(
    family: GraphFamily,
    plus: Direction,
    minus: Direction,
    radii,
    p,
    tol: float | None = None,
    filler: float = 0.5,
    osc_high: float = 0.5,
    osc_low: float = 0.05,
) -> ProbeResult:
    """Solve with shell data 1 toward ``plus``, 0 toward ``minus``, filler between.

    Tracks the oscillation of the solution on the open ball at the first
    radius; a stable oscillation above ``osc_high`` (with bounded energies)
    reports ">=2-likely", below ``osc_low`` reports "trivial-likely".
    """
    p = as_p(p)
    radii = tuple(int(r) for r in radii)
    if len(radii) < 2 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("need at least two strictly increasing radii")
    for d in (plus, minus):
        if not d.accepts(family):
            raise UnsupportedFamilyError(f"direction {d.label!r} does not apply to {family.tag}")

    table: list[dict] = []
    energies: list[float] = []
    prev_inner = None
    h_final = None
    rep_final = None
    for n in radii:
        ball = family.ball(n)
        g = ball.graph
        plus_ids = plus.shell_ids(ball)
        minus_ids = minus.shell_ids(ball)
        if not plus_ids.isdisjoint(minus_ids):
            raise OverlappingDirectionsError(
                f"directions {plus.label!r} and {minus.label!r} overlap on the shell"
            )
        if len(plus_ids) == 0 or len(minus_ids) == 0:
            raise ValueError(f"a direction selects no shell vertices at radius {n}")
        data = {v: filler for v in ball.boundary.ids}
        data.update({v: 1.0 for v in plus_ids.ids})
        data.update({v: 0.0 for v in minus_ids.ids})
        prob = DirichletProblem(g, ball.interior, VertexFunction.from_dict(g, data), p)
        sol, rep = solve_dirichlet(prob, tol=tol)
        inner_ids = ball.ids_within(radii[0]).ids
        inner_vals = [sol(v) for v in inner_ids]
        osc = max(inner_vals) - min(inner_vals)
        drift = (
            max(abs(a - b) for a, b in zip(inner_vals, prev_inner))
            if prev_inner is not None
            else None
        )
        energy = dirichlet_sum(sol, ball.interior, p)
        energies.append(energy)
        table.append(
            {
                "radius": n,
                "oscillation": osc,
                "sup": max(inner_vals),
                "inf": min(inner_vals),
                "energy": energy,
                "drift": drift,
                "residual": rep.residual,
                "converged": rep.converged,
            }
        )
        logger.info("probe %s/%s p=%g n=%d osc=%.6g energy=%.6g", plus.label, minus.label, p, n, osc)
        prev_inner = inner_vals
        h_final = sol
        rep_final = rep

    oscillation = table[-1]["oscillation"]
    assert 0.0 <= h_final.min() and h_final.max() <= 1.0
    if oscillation > osc_high and _energy_trend_ok(energies):
        verdict = ">=2-likely"
    elif oscillation < osc_low:
        verdict = "trivial-likely"
    else:
        verdict = "inconclusive"

    return ProbeResult(
        family=family.tag,
        p=p,
        radii=radii,
        h=h_final,
        oscillation=oscillation,
        energy=energies[-1],
        residual=rep_final.residual,
        verdict=verdict,
        table=tuple(table),
    )
