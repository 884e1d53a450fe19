import math

import numpy as np
import pytest
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import squareform

from conftest import caveman
from ncpkit.association import (
    AssociationMatrix,
    _average_linkage_order,
    accumulate,
    order_nodes,
    reweight_graph,
    sample_communities,
    write_coordinates,
    write_permutation,
)
from ncpkit.graph import GraphError, build_graph


def test_counting_example():
    a = accumulate([[1, 2], [1, 2, 3]], 4)
    assert a.value(1, 2) == 1
    assert a.value(1, 3) == pytest.approx(0.5)
    assert a.value(2, 3) == pytest.approx(0.5)
    assert a.counts.tolist() == [0, 2, 2, 1]
    assert math.isnan(a.value(0, 0))


def test_single_sample_and_disjoint():
    a = accumulate([[0, 2]], 4)
    d = a.dense()
    assert d[0, 2] == d[2, 0] == d[0, 0] == 1
    assert math.isnan(d[1, 3])
    assert d[0, 1] == 0  # one of the pair was sampled
    assert accumulate([[1], [2]], 3).value(1, 2) == 0


def test_empty_or_out_of_range_sample_rejected():
    with pytest.raises(GraphError):
        accumulate([[]], 3)
    with pytest.raises(GraphError):
        accumulate([[3]], 3)


def test_merge_is_additive(rng):
    samples = [rng.choice(10, size=rng.integers(1, 6), replace=False) for _ in range(30)]
    whole = accumulate(samples, 10)
    parts = accumulate(samples[:13], 10).merge(accumulate(samples[13:], 10))
    assert (whole.co_count != parts.co_count).nnz == 0
    shuffled = accumulate(samples[::-1], 10)
    assert np.array_equal(whole.dense(), shuffled.dense(), equal_nan=True)


def test_order_block_diagonal():
    samples = [[0, 2, 4]] * 3 + [[1, 3, 5]] * 3
    perm = order_nodes(accumulate(samples, 6)).tolist()
    assert set(perm[:3]) in ({0, 2, 4}, {1, 3, 5})


def test_order_identity_keeps_input_order():
    a = accumulate([[i] for i in range(5)], 5)
    assert order_nodes(a).tolist() == list(range(5))


def test_order_three_nodes():
    sim = np.array([[1, 0.9, 0.1], [0.9, 1, 0.1], [0.1, 0.1, 1]])
    order = _average_linkage_order(sim)
    # {0,1} merges first and, having the larger internal association, leads
    assert order == [0, 1, 2]


def _scipy_heights(sim):
    return np.sort(linkage(squareform(1 - sim, checks=False), method="average")[:, 2])


def _our_heights(sim):
    """Replays the merge order via a tiny instrumented copy of the algorithm."""
    k = len(sim)
    clusters = {i: [i] for i in range(k)}
    heights = []
    while len(clusters) > 1:
        best, pair = -np.inf, None
        keys = sorted(clusters)
        for x in range(len(keys)):
            for y in range(x + 1, len(keys)):
                a, b = clusters[keys[x]], clusters[keys[y]]
                s = sim[np.ix_(a, b)].mean()
                if s > best:
                    best, pair = s, (keys[x], keys[y])
        heights.append(1 - best)
        clusters[pair[0]] = clusters[pair[0]] + clusters.pop(pair[1])
    return np.sort(heights)


def test_average_linkage_heights_match_scipy(rng):
    for _ in range(10):
        samples = [rng.choice(12, size=rng.integers(2, 7), replace=False) for _ in range(15)]
        sim = np.nan_to_num(accumulate(samples, 12).dense())
        np.fill_diagonal(sim, 1.0)
        assert _our_heights(sim) == pytest.approx(_scipy_heights(sim), abs=1e-12)
        perm = _average_linkage_order(sim)
        assert sorted(perm) == list(range(12))


def test_dendrogram_clusters_contiguous(rng):
    # a planted two-level structure must appear as contiguous runs
    samples = [[0, 1, 2, 3]] * 4 + [[4, 5, 6, 7]] * 4 + [[0, 1]] * 3 + [[6, 7]] * 3
    order = order_nodes(accumulate(samples, 8)).tolist()
    for block in ({0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1}, {6, 7}):
        pos = sorted(order.index(i) for i in block)
        assert pos[-1] - pos[0] == len(block) - 1


def test_order_with_groups():
    a = accumulate([[0, 3], [1, 2]], 4)
    perm = order_nodes(a, groups=["b", "a", "a", "b"]).tolist()
    assert set(perm[:2]) == {1, 2}
    assert set(perm[2:]) == {0, 3}


def test_reweight_graph():
    g = build_graph([(0, 1), (1, 2), (2, 3)])
    a = accumulate([[0, 1, 2, 3]], 4)
    assert sorted(w for _, _, w in reweight_graph(g, a).edges()) == [1, 1, 1]
    a = accumulate([[0, 1], [2, 3]], 4)
    assert [(i, j) for i, j, _ in reweight_graph(g, a).edges()] == [(0, 1), (2, 3)]


def test_reweight_mean_threshold():
    g = build_graph([(0, 1), (1, 2), (2, 3)])
    co = np.zeros((4, 4), dtype=np.int64)
    # pick counts so edge weights are 0.2, 0.4, 0.9
    import scipy.sparse as sp
    cnt = np.array([10, 10, 10, 10])
    pairs = {(0, 1): 0.2, (1, 2): 0.4, (2, 3): 0.9}
    for (i, j), w in pairs.items():
        c = round(w * 20 / (1 + w))
        co[i, j] = co[j, i] = c
    np.fill_diagonal(co, cnt)
    a = AssociationMatrix(4, sp.csr_matrix(co))
    weights = {(i, j): a.value(i, j) for i, j in pairs}
    assert weights[(2, 3)] > np.mean(list(weights.values())) > weights[(1, 2)]
    kept = reweight_graph(g, a, mean_threshold=True)
    assert [(i, j) for i, j, _ in kept.edges()] == [(2, 3)]


def test_sample_communities_on_caveman():
    g = caveman(5, 6)
    samples = sample_communities(g, "aclcut", 1e-4, n_samples=10, rng_seed=1)
    assert 0 < len(samples) <= 10
    a = accumulate(samples, g.n)
    assert (a.counts > 0).sum() > 0
    again = sample_communities(g, "aclcut", 1e-4, n_samples=10, rng_seed=1)
    assert all(np.array_equal(x, y) for x, y in zip(samples, again))


def test_write_files(tmp_path):
    a = accumulate([[1, 2], [1, 2, 3]], 4)
    p = tmp_path / "a.txt"
    assert write_coordinates(a, p) == 6
    lines = p.read_text().splitlines()
    assert lines[0] == "1 1 1"
    assert "1 3 0.5" in lines
    write_permutation([2, 0, 1], tmp_path / "perm.txt")
    assert (tmp_path / "perm.txt").read_text() == "2\n0\n1\n"
