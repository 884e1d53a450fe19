import itertools
import math

import numpy as np
import pytest

from conftest import brute_force_profile, caveman, random_connected_graph
from ncpkit.graph import GraphError, build_graph
from ncpkit.quality import (
    clustering_coefficient,
    clustering_coefficients,
    conductance,
    conductance_ratio,
    edge_expansion,
    graph_conductance,
    graph_expansion,
    internal_conductance,
    lambda2,
    mean_clustering,
)

TRIANGLES = build_graph([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


def test_conductance_examples(k4):
    assert conductance(k4, [0, 1]) == pytest.approx(2 / 3)
    assert conductance(TRIANGLES, [0, 1, 2]) == 0
    star = build_graph([(0, 1), (0, 2), (0, 3)])
    assert conductance(star, [1]) == 1


@pytest.mark.parametrize("s", [[], [0, 1, 2, 3]])
def test_conductance_rejects_trivial_sets(k4, s):
    with pytest.raises(GraphError):
        conductance(k4, s)


def test_expansion_examples(k4):
    assert edge_expansion(k4, [0]) == 3
    assert edge_expansion(TRIANGLES, [0, 1, 2]) == 0
    c6 = build_graph([(i, (i + 1) % 6) for i in range(6)])
    assert edge_expansion(c6, [0, 1, 2]) == pytest.approx(2 / 3)
    assert graph_expansion(c6) == pytest.approx(2 / 3)


def test_graph_conductance_matches_brute_force(rng):
    for _ in range(10):
        g = random_connected_graph(rng, weighted=True)
        assert graph_conductance(g) == pytest.approx(np.min(brute_force_profile(g)[1:]), abs=1e-12)


def test_internal_conductance_examples(k4):
    g = caveman(3, 4)
    assert internal_conductance(k4, [0, 1, 2, 3]) == pytest.approx(2 / 3)
    assert internal_conductance(TRIANGLES, [0, 1, 3, 4]) == 0
    p4 = build_graph([(0, 1), (1, 2), (2, 3)])
    assert internal_conductance(p4, [0, 1, 2, 3]) == pytest.approx(1 / 3)
    assert math.isnan(internal_conductance(k4, [2]))
    # clique 0 of the ring is K4 minus edge (0,3): the best split is 2|2 with cut 3, volume 5
    assert internal_conductance(g, [0, 1, 2, 3]) == pytest.approx(3 / 5)


def test_spectral_internal_conductance_is_upper_bound(rng):
    for _ in range(20):
        g = random_connected_graph(rng, n_lo=4, n_hi=12, weighted=True)
        nodes = list(range(g.n))
        exact = internal_conductance(g, nodes, "exact")
        assert internal_conductance(g, nodes, "spectral") >= exact - 1e-12


def test_conductance_ratio_examples():
    assert conductance_ratio(TRIANGLES, [0, 1, 2]) == 0
    assert internal_conductance(TRIANGLES, [0, 1, 2]) == pytest.approx(1.0)
    bridged = build_graph([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)])
    assert conductance_ratio(bridged, [0, 1, 3, 4]) == math.inf
    # two whole components: 0/0 is left undefined
    three = build_graph([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (6, 7)])
    assert math.isnan(conductance_ratio(three, [0, 1, 2, 3, 4, 5]))
    ring = caveman(3, 4)
    assert conductance_ratio(ring, [0, 1, 2, 3]) == pytest.approx((1 / 6) / (3 / 5))


def test_clustering_examples():
    tri = build_graph([(0, 1), (1, 2), (0, 2)])
    assert clustering_coefficient(tri, 0) == 1
    path = build_graph([(0, 1), (1, 2)])
    assert clustering_coefficient(path, 1) == 0
    w = build_graph([(0, 1, 1.0), (0, 2, 1.0), (1, 2, 0.5)])
    assert clustering_coefficient(w, 0) == pytest.approx(0.5 ** (1 / 3))


def test_clustering_unweighted_matches_triangle_count(rng):
    for _ in range(20):
        g = random_connected_graph(rng)
        A = g.adjacency.toarray() > 0
        for i in range(g.n):
            nb = np.flatnonzero(A[i])
            k = len(nb)
            tri = sum(A[a, b] for a, b in itertools.combinations(nb, 2))
            expected = tri / (k * (k - 1) / 2) if k >= 2 else 0.0
            assert clustering_coefficients(g)[i] == pytest.approx(expected)
        assert mean_clustering(g) == pytest.approx(clustering_coefficients(g).mean())


def test_lambda2_examples(k4):
    assert lambda2(k4) == pytest.approx(4 / 3, abs=1e-10)
    c4 = build_graph([(i, (i + 1) % 4) for i in range(4)])
    assert lambda2(c4) == pytest.approx(1.0, abs=1e-10)
    assert lambda2(build_graph([(0, 1)])) == pytest.approx(2.0, abs=1e-10)
    with pytest.raises(GraphError):
        lambda2(TRIANGLES)


def test_lambda2_matches_dense_and_cheeger(rng):
    for _ in range(15):
        g = random_connected_graph(rng, n_lo=5, n_hi=12, weighted=True)
        A = g.adjacency.toarray()
        d = A.sum(axis=1)
        Lsym = np.eye(g.n) - A / np.sqrt(np.outer(d, d))
        lam = np.linalg.eigvalsh(Lsym)[1]
        assert lambda2(g) == pytest.approx(lam, abs=1e-8)
        assert lam / 2 <= graph_conductance(g) + 1e-12
