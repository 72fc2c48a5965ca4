"""End-to-end acceptance checks, one test per criterion, with pinned tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion. Expected values come from closed forms, independent oracles
(grid search, series-parallel recursion, materialized-constraint convex
solves), or exact algebraic identities; nothing is tuned to the solver.
"""

import json
import os
import subprocess
import sys
import time

import numpy as np
import pytest

import royden as R

from conftest import path_graph, random_boundary_split, random_connected_graph
from oracles import grid_search_segment_capacity, tree3_root_conductance

P_GRID = (1.3, 1.5, 2.0, 3.0, 4.0)
N_GRID = (2, 4, 8, 16, 32, 64)


def _pass(k, msg):
    print(f"\nacceptance {k}: PASS - {msg}")


def _segment_condenser(n):
    g = path_graph(n)
    return R.Condenser(
        A=R.VertexSet(g, [0]), B=R.VertexSet(g, [n]), S=R.VertexSet(g, range(1, n))
    )


def test_01_segment_capacity_closed_form():
    t0 = time.perf_counter()
    for p in P_GRID:
        for n in N_GRID:
            val, _, rep = R.capacity(_segment_condenser(n), p)
            expected = n ** (1 - p)
            assert rep.converged
            assert abs(val - expected) <= 1e-6 * max(1.0, expected)
    for p in (1.5, 2.0, 3.0):
        for n in (2, 3, 4):
            val, _, _ = R.capacity(_segment_condenser(n), p)
            assert abs(val - grid_search_segment_capacity(n, p)) <= 1e-6
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    _pass(1, f"segment capacities match n^(1-p) on the full grid in {elapsed:.2f}s")


def test_02_segment_length_capacity_duality():
    for p in P_GRID:
        for n in N_GRID:
            g = path_graph(n)
            spec = R.PathFamilySpec.between(
                R.VertexSet(g, [0]), R.VertexSet(g, [n]), R.VertexSet(g, range(g.n))
            )
            lam, _, _ = R.extremal_length(spec, p)
            expected = n ** (p - 1)
            assert abs(lam - expected) <= 1e-6 * max(1.0, expected)
            cap, _, _ = R.capacity(_segment_condenser(n), p)
            assert 1 - 1e-5 <= lam * cap <= 1 + 1e-5
    _pass(2, "single-path extremal length is n^(p-1) and lambda*cap = 1 on the grid")


def test_03_quadratic_solver_matches_elimination_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(50):
        rng = np.random.default_rng(1000 + seed)
        g = random_connected_graph(rng, 40, 120)
        S, bnd = random_boundary_split(g, rng)
        data = R.VertexFunction.from_dict(
            g, {v: float(t) for v, t in zip(bnd, rng.uniform(-2, 2, len(bnd)))}
        )
        prob = R.DirichletProblem(g, S, data, 2.0)
        f, _ = R.solve_dirichlet(prob)
        oracle = R.solve_p2_oracle(prob)
        worst = max(worst, max(abs(f(v) - oracle(v)) for v in S.ids))
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-8
    assert elapsed < 10.0
    _pass(3, f"50 seeded graphs: max deviation from the elimination oracle {worst:.2e} in {elapsed:.2f}s")


def test_04_energy_identities():
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(2000 + seed)
        g = random_connected_graph(rng, 25, 60)
        full = R.VertexSet(g, range(g.n))
        h = R.VertexFunction(full, rng.uniform(-2, 2, g.n))
        p = float(rng.uniform(1.2, 4.0))
        ip = R.dirichlet_sum(h, full, p)
        pair = R.pairing(h, h, p)
        double = 2.0 * R.edge_energy(h, g, p)
        scale = max(1.0, abs(ip))
        worst = max(worst, abs(pair - ip) / scale, abs(double - ip) / scale)
    assert worst <= 1e-12
    _pass(4, f"pairing and edge-double-count identities hold to {worst:.2e} relative")


def test_05_comparison_and_maximum_principles():
    worst_cmp = 0.0
    for seed in range(100):
        rng = np.random.default_rng(3000 + seed)
        g = random_connected_graph(rng, 40, 120)
        S, bnd = random_boundary_split(g, rng)
        lo = rng.uniform(-1, 1, len(bnd))
        hi = lo + rng.uniform(0.0, 1.0, len(bnd))
        p = (1.3, 1.7, 2.0, 2.6, 3.5)[seed % 5]
        d1 = R.VertexFunction.from_dict(g, {v: float(t) for v, t in zip(bnd, lo)})
        d2 = R.VertexFunction.from_dict(g, {v: float(t) for v, t in zip(bnd, hi)})
        f1, _ = R.solve_dirichlet(R.DirichletProblem(g, S, d1, p), tol=1e-11)
        f2, _ = R.solve_dirichlet(R.DirichletProblem(g, S, d2, p), tol=1e-11)
        worst_cmp = max(worst_cmp, max(f1(v) - f2(v) for v in S.ids))
        for f, d in ((f1, d1), (f2, d2)):
            assert d.min() <= min(f(v) for v in S.ids)
            assert max(f(v) for v in S.ids) <= d.max()
    assert worst_cmp <= 1e-9
    _pass(5, f"ordered data gives ordered solutions (violation {worst_cmp:.2e}) inside the data hull")


def test_06_line_family_is_parabolic():
    fam = R.parse_family("z")
    ball = fam.ball(64)
    A = R.VertexSet(ball.graph, [0])
    for p in (1.5, 2.0, 3.0):
        seq = R.capacity_at_infinity(A, fam, [2, 4, 8, 16, 32, 64], p, ball=ball)
        for n, v in zip(seq.radii, seq.values):
            expected = 2.0 * n ** (1 - p)
            assert abs(v - expected) <= 1e-6 * max(1.0, expected)
        verdict = R.classify_parabolicity(seq)
        assert verdict.classification == "parabolic-likely"
        assert abs(verdict.fitted_exponent - (1 - p)) <= 0.05
    _pass(6, "line capacities equal 2n^(1-p) and classify parabolic-likely for p in {1.5, 2, 3}")


def test_07_ternary_tree_is_hyperbolic():
    t0 = time.perf_counter()
    fam = R.parse_family("tree:3")
    seq = R.capacity_at_infinity(
        R.VertexSet(fam.ball(14).graph, [0]), fam, list(range(2, 15)), 2.0
    )
    assert all(b <= a + 1e-12 for a, b in zip(seq.values, seq.values[1:]))
    assert abs(seq.values[-1] - 1.5) <= 2e-2
    for n, v in zip(seq.radii, seq.values):
        assert v == pytest.approx(tree3_root_conductance(n), rel=1e-8)
    verdict = R.classify_parabolicity(seq)
    assert verdict.classification == "hyperbolic-likely"
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    _pass(7, f"tree capacity falls to {seq.values[-1]:.5f} (limit 1.5), hyperbolic-likely, in {elapsed:.1f}s")


def test_08_plane_trend_split():
    fam = R.parse_family("z2")
    ball = fam.ball(32)
    A = R.VertexSet(ball.graph, [0])
    ratios = {}
    for p in (1.5, 3.0):
        seq = R.capacity_at_infinity(A, fam, [8, 16, 32], p, ball=ball)
        assert seq.values[0] > seq.values[1] > seq.values[2]
        ratios[p] = seq.values[-1] / seq.values[0]
    assert ratios[1.5] > 0.5
    assert ratios[3.0] < 0.3
    _pass(8, f"plane capacity ratios split: p=1.5 -> {ratios[1.5]:.3f} (> 0.5), p=3 -> {ratios[3.0]:.3f} (< 0.3)")


def test_09_reciprocal_duality_on_random_graphs():
    worst_dual = 0.0
    worst_cross = 0.0
    for seed in range(25):
        rng = np.random.default_rng(4000 + seed)
        g = random_connected_graph(rng, 12, 24)
        ids = rng.choice(g.n, size=2, replace=False)
        A, B = R.VertexSet(g, [int(ids[0])]), R.VertexSet(g, [int(ids[1])])
        S = R.VertexSet(g, range(g.n))
        cap, _, _ = R.capacity(R.Condenser(A=A, B=B, S=S), 2.0, tol=1e-12)
        lam_bf = R.extremal_length_bruteforce(A, B, S, g, 2.0)
        lam_cp, _, _ = R.extremal_length(R.PathFamilySpec.between(A, B, S), 2.0, tol=1e-10)
        worst_dual = max(worst_dual, abs(1.0 / lam_bf - cap))
        worst_cross = max(worst_cross, abs(lam_cp - lam_bf) / max(1.0, abs(lam_bf)))
    assert worst_dual <= 1e-5
    assert worst_cross <= 1e-5
    _pass(9, f"25 seeded graphs: |1/lambda - cap| <= {worst_dual:.2e}, solver-vs-oracle gap {worst_cross:.2e}")


def test_10_harmonic_potential_splitting():
    fam = R.parse_family("tree:3")
    radii = [2, 4, 6, 8, 10, 12]
    ball = fam.ball(max(radii))
    ex = R.build_exhaustion(fam, radii, ball=ball)
    full = R.VertexSet(ball.graph, range(ball.graph.n))

    spike = R.VertexFunction.indicator(full, [0])
    split = R.royden_decompose(spike, ex, 2.0)
    assert split.level_sups[-1] < 0.05
    assert all(b <= a + 1e-15 for a, b in zip(split.level_sups, split.level_sups[1:]))

    ones = R.VertexFunction.constant(full, 1.0)
    split1 = R.royden_decompose(ones, ex, 2.0)
    assert all(split1.harmonic(v) == 1.0 for v in range(ball.graph.n))
    assert all(split1.potential(v) == 0.0 for v in range(ball.graph.n))

    branch = R.VertexFunction.indicator(full, R.Subtree(0).region_ids(ball).ids)
    bumped = R.VertexFunction(
        branch.domain, {v: branch(v) + (0.5 if v == 0 else 0.0) for v in branch.domain.ids}
    )
    h1 = R.royden_decompose(branch, ex, 2.0).harmonic
    h2 = R.royden_decompose(bumped, ex, 2.0).harmonic
    inner = ex.levels[0].ids
    gap = max(abs(h1(v) - h2(v)) for v in inner)
    assert gap < 1e-3
    _pass(10, f"spike splits to zero harmonic part; constants stay harmonic; bump shifts h by {gap:.1e}")


def test_11_massive_and_non_massive_regions():
    z = R.parse_family("z")
    t3 = R.parse_family("tree:3")
    for p in (1.5, 2.0, 3.0):
        half = R.inner_potential(R.HalfSpace(1), z, [4, 8, 16, 32, 64, 128], p)
        assert half.sup_estimate < 0.1
        assert half.verdict == "not-massive-likely"
        branch = R.inner_potential(R.Subtree(0), t3, [4, 6, 8, 10, 12], p)
        assert branch.sup_estimate > 0.9
        assert branch.verdict == "massive-likely"
    _pass(11, "half-line potentials collapse (< 0.1); tree-branch potentials persist (> 0.9) for p in {1.5, 2, 3}")


def test_12_two_direction_probe():
    t3 = R.parse_family("tree:3")
    probe = R.bhd_probe(t3, R.Subtree(0), R.Subtree(1), [4, 6, 8, 10, 12], 2.0)
    assert probe.verdict == ">=2-likely"
    assert probe.oscillation > 0.5

    line = R.bhd_probe(R.parse_family("z"), R.HalfSpace(1), R.HalfSpace(-1), [4, 8, 16, 32, 64], 2.0)
    assert line.verdict == "trivial-likely"
    assert line.oscillation < 0.05

    high = R.level_set_components(probe.h, 0.4)
    low = R.level_set_components(
        R.VertexFunction(probe.h.domain, {v: 1.0 - t for v, t in probe.h.items()}), 0.4
    )
    assert len(high) + len(low) >= 2
    ball = t3.ball(probe.radii[-1])
    assert all(ball.coords[v][0] == 0 for v in high[0].ids)
    assert all(ball.coords[v][0] == 1 for v in low[0].ids)
    _pass(12, f"tree probe oscillates at {probe.oscillation:.3f}, line probe at {line.oscillation:.4f}; "
              "polar level sets sit in the two probed subtrees")


def _run_cli(args):
    env = dict(os.environ)
    env["PYTHONPATH"] = os.pathsep.join(
        [os.path.join(os.path.dirname(__file__), "..", "src")] + sys.path
    )
    return subprocess.run(
        [sys.executable, "-m", "royden", *args], capture_output=True, env=env, timeout=300
    )


def test_13_cli_cold_process_reproduces_line_capacities():
    args = ["capinf", "--family", "z", "--p", "1.5,2,3", "--radii", "2:64:x2"]
    first = _run_cli(args)
    second = _run_cli(args)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    lines = first.stdout.decode().splitlines()
    assert lines[0] == "family,p,n,cap,residual"
    assert len(lines) == 1 + 3 * 6
    for line in lines[1:]:
        _, p, n, cap, _ = line.split(",")
        expected = 2.0 * float(n) ** (1 - float(p))
        assert abs(float(cap) - expected) <= 1e-6 * max(1.0, expected)
    j1 = _run_cli(args + ["--format", "json"])
    j2 = _run_cli(args + ["--format", "json"])
    assert j1.stdout == j2.stdout and j1.returncode == 0
    _pass(13, "cold CLI runs reproduce the line capacities and are byte-identical")
