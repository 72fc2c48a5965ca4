import pytest

import royden as R
from royden.errors import GraphError, TooManyPathsError

from conftest import random_connected_graph


def _vs(g, ids):
    return R.VertexSet(g, ids)


def test_single_path_on_segment():
    g = R.build_graph([(0, 1), (1, 2)])
    paths = R.enumerate_simple_paths(_vs(g, [0]), _vs(g, [2]), g)
    assert [p.vertices for p in paths] == [(0, 1, 2)]
    assert paths[0].edges == ((0, 1), (1, 2))


def test_four_cycle_has_two_routes():
    g = R.build_graph([(0, 1), (1, 2), (2, 3), (0, 3)])
    paths = R.enumerate_simple_paths(_vs(g, [0]), _vs(g, [2]), g)
    assert [p.vertices for p in paths] == [(0, 1, 2), (0, 3, 2)]


def test_triangle_direct_and_detour():
    g = R.build_graph([(0, 1), (1, 2), (0, 2)])
    paths = R.enumerate_simple_paths(_vs(g, [0]), _vs(g, [2]), g)
    assert [p.vertices for p in paths] == [(0, 1, 2), (0, 2)]


def test_cap_enforced():
    g = R.build_graph([(0, 1), (1, 2), (2, 3), (0, 3), (1, 3), (0, 2)])
    with pytest.raises(TooManyPathsError):
        R.enumerate_simple_paths(_vs(g, [0]), _vs(g, [2]), g, cap=1)


def test_endpoints_must_be_disjoint_nonempty():
    g = R.build_graph([(0, 1), (1, 2)])
    with pytest.raises(GraphError):
        R.enumerate_simple_paths(_vs(g, [0]), _vs(g, [0, 2]), g)
    with pytest.raises(GraphError):
        R.enumerate_simple_paths(_vs(g, []), _vs(g, [2]), g)


def test_no_interior_endpoint_reuse():
    # paths may not pass through other endpoint-set vertices
    g = R.build_graph([(0, 1), (1, 2), (2, 3)])
    paths = R.enumerate_simple_paths(_vs(g, [0, 1]), _vs(g, [3]), g)
    assert [p.vertices for p in paths] == [(1, 2, 3)]


def test_paths_are_simple_and_count_matches_recount(rng):
    for _ in range(25):
        g = random_connected_graph(rng, 10, 18)
        ids = rng.choice(g.n, size=2, replace=False)
        A, B = _vs(g, [int(ids[0])]), _vs(g, [int(ids[1])])
        paths = R.enumerate_simple_paths(A, B, g, cap=50_000)
        for p in paths:
            assert len(set(p.vertices)) == len(p.vertices)
            for a, b in p.edges:
                assert g.has_edge(a, b)
        assert len(paths) == R.count_simple_paths(A, B, g)
        assert [p.vertices for p in paths] == sorted(p.vertices for p in paths)


def test_repeated_vertex_rejected():
    with pytest.raises(GraphError):
        R.SimplePath((0, 1, 0))
