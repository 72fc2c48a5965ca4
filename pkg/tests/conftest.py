import numpy as np
import pytest

import royden as R


def path_graph(n_edges):
    return R.build_graph([(i, i + 1) for i in range(n_edges)])


def random_connected_graph(rng, max_vertices=40, max_edges=120):
    """Random spanning tree plus random extra edges; always connected."""
    n = int(rng.integers(2, max_vertices + 1))
    edges = {(int(rng.integers(0, i)), i) for i in range(1, n)}
    budget = min(max_edges, n * (n - 1) // 2)
    want = int(rng.integers(len(edges), budget + 1))
    tries = 0
    while len(edges) < want and tries < 6 * budget:
        a, b = int(rng.integers(0, n)), int(rng.integers(0, n))
        tries += 1
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return R.build_graph(sorted(edges))


def random_boundary_split(g, rng):
    """(interior VertexSet, sorted boundary ids); boundary nonempty, strict."""
    nb = int(rng.integers(1, max(2, g.n // 3 + 1)))
    bnd = sorted(int(v) for v in rng.choice(g.n, size=nb, replace=False))
    S = R.VertexSet(g, set(range(g.n)) - set(bnd))
    return S, bnd


def random_vertex_function(g, rng, scale=2.0):
    full = R.VertexSet(g, range(g.n))
    return R.VertexFunction(full, rng.uniform(-scale, scale, g.n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
