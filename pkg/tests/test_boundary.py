import pytest

import royden as R
from royden.boundary import level_set_components
from royden.errors import (
    EmptyOuterBoundaryError,
    OverlappingDirectionsError,
    UnsupportedFamilyError,
)

from conftest import path_graph


def _full(g):
    return R.VertexSet(g, range(g.n))


def test_level_sets_of_constant_one():
    g = path_graph(3)
    h = R.VertexFunction.constant(_full(g), 1.0)
    comps = level_set_components(h, 0.3)
    assert len(comps) == 1 and comps[0].ids == (0, 1, 2, 3)


def test_level_sets_of_constant_zero():
    g = path_graph(3)
    h = R.VertexFunction.constant(_full(g), 0.0)
    assert level_set_components(h, 0.3) == []


def test_level_sets_two_isolated_peaks():
    g = path_graph(4)
    h = R.VertexFunction.indicator(_full(g), [0, 4])
    comps = level_set_components(h, 0.5)
    assert [c.ids for c in comps] == [(0,), (4,)]


def test_level_sets_validate_inputs():
    g = path_graph(2)
    h = R.VertexFunction(_full(g), [0.0, 2.0, 1.0])
    with pytest.raises(ValueError):
        level_set_components(h, 0.5)
    ok = R.VertexFunction(_full(g), [0.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        level_set_components(ok, 1.5)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_half_line_is_not_massive(p):
    fam = R.parse_family("z")
    result = R.inner_potential(R.HalfSpace(1), fam, [4, 8, 16, 32, 64], p)
    assert result.verdict == "not-massive-likely"
    assert result.sup_estimate < 0.1
    # ramp at the deepest level: value k/n at distance k
    deepest = result.approximants[-1]
    ball = fam.ball(64)
    assert deepest(ball.id_of(1)) == pytest.approx(1.0 / 64.0, abs=1e-9)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_tree_branch_is_massive(p):
    fam = R.parse_family("tree:3")
    result = R.inner_potential(R.Subtree(0), fam, [4, 6, 8, 10, 12], p)
    assert result.verdict == "massive-likely"
    assert result.sup_estimate > 0.9
    assert all(e > 0 for e in result.energies)


def test_inner_potential_approximants_decrease_pointwise():
    fam = R.parse_family("tree:3")
    result = R.inner_potential(R.Subtree(0), fam, [3, 5, 7], 2.0)
    ball = fam.ball(7)
    region = R.Subtree(0).region_ids(ball)
    first_free = region.intersection(ball.ids_within(3))
    a, b, c = result.approximants
    for v in first_free.ids:
        assert a(v) >= b(v) - 1e-10 >= c(v) - 2e-10
        assert 0.0 <= c(v) <= 1.0


def test_inner_potential_rejects_mismatched_direction():
    with pytest.raises(UnsupportedFamilyError):
        R.inner_potential(R.Subtree(0), R.parse_family("z"), [2, 4], 2.0)


def test_inner_potential_empty_rim_rejected():
    class Everything(R.Direction):
        label = "all"

        def accepts(self, family):
            return True

        def contains(self, coord):
            return True

    with pytest.raises(EmptyOuterBoundaryError):
        R.inner_potential(Everything(), R.parse_family("z"), [2, 4], 2.0)


def test_probe_tree_detects_two_directions():
    fam = R.parse_family("tree:3")
    result = R.bhd_probe(fam, R.Subtree(0), R.Subtree(1), [4, 6, 8, 10], 2.0)
    assert result.verdict == ">=2-likely"
    assert result.oscillation > 0.5
    assert 0.0 <= result.h.min() and result.h.max() <= 1.0
    # high and low level sets sit deep inside the two probed subtrees
    ball = fam.ball(result.radii[-1])
    high = level_set_components(result.h, 0.4)
    low = level_set_components(
        R.VertexFunction(result.h.domain, {v: 1.0 - t for v, t in result.h.items()}), 0.4
    )
    assert len(high) >= 1 and len(low) >= 1
    assert all(ball.coords[v][0] == 0 for v in high[0].ids)
    assert all(ball.coords[v][0] == 1 for v in low[0].ids)


def test_probe_line_is_trivial():
    result = R.bhd_probe(
        R.parse_family("z"), R.HalfSpace(1), R.HalfSpace(-1), [4, 8, 16, 32, 64], 2.0
    )
    assert result.verdict == "trivial-likely"
    assert result.oscillation < 0.05


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_probe_line_is_trivial_for_other_exponents(p):
    result = R.bhd_probe(
        R.parse_family("z"), R.HalfSpace(1), R.HalfSpace(-1), [4, 8, 16, 32, 64], p
    )
    assert result.verdict == "trivial-likely"


def test_probe_plane_is_trivial_for_quadratic_energy():
    result = R.bhd_probe(
        R.parse_family("z2"), R.HalfSpace(1), R.HalfSpace(-1), [4, 8, 16, 32, 64, 128], 2.0
    )
    assert result.verdict == "trivial-likely"
    assert result.oscillation < 0.05


def test_probe_rejects_overlapping_directions():
    fam = R.parse_family("tree:3")
    with pytest.raises(OverlappingDirectionsError):
        R.bhd_probe(fam, R.Subtree(0), R.Subtree(0), [2, 4], 2.0)


def test_probe_solution_between_extreme_data():
    # comparison with all-0 and all-1 data: probe values stay inside [0, 1]
    fam = R.parse_family("z2")
    result = R.bhd_probe(fam, R.HalfSpace(1), R.HalfSpace(-1), [3, 5], 2.0)
    assert 0.0 <= result.h.min() <= result.h.max() <= 1.0
