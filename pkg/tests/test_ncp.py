import math

import numpy as np
import pytest

from conftest import brute_force_profile, caveman, random_connected_graph
from ncpkit.graph import build_graph
from ncpkit.ncp import (
    NCP_COLUMNS,
    CoverageBudget,
    NcpCurve,
    crp,
    format_value,
    global_ncp,
    local_ncp,
    sweep,
    write_csv,
)
from ncpkit.quality import conductance
from ncpkit.ranking import RankVector


def rank(scores, support=None):
    scores = np.asarray(scores, dtype=float)
    support = np.flatnonzero(scores > 0) if support is None else np.asarray(support)
    return RankVector(scores, support, "test", 0, {"epsilon": 0.1})


def test_sweep_groups_ties(path5):
    res = sweep(path5, rank([3, 2, 2, 1, 0]))
    assert res.prefix_sizes.tolist() == [1, 3, 4]
    assert [s.tolist() for s in res.sweep_sets()] == [[0], [0, 1, 2], [0, 1, 2, 3]]
    for s, phi in zip(res.sweep_sets(), res.prefix_conductances):
        assert phi == pytest.approx(conductance(path5, s))


def test_sweep_on_k4_best_pair(k4):
    res = sweep(k4, rank([4, 3, 2, 1]))
    assert res.best.tolist() == [0, 1]
    assert res.best_conductance == pytest.approx(2 / 3)
    assert math.isnan(res.prefix_conductances[-1])  # whole graph


def test_connected_only_and_volume_cap():
    g = build_graph([(0, 1), (1, 2), (3, 4), (4, 5), (2, 3)])
    r = rank([5, 1, 1, 4, 1, 0], support=range(6))
    plain = sweep(g, r)
    conn = sweep(g, r, connected_only=True)
    assert 2 in plain.sizes.tolist()
    assert 2 not in conn.sizes.tolist()
    capped = sweep(g, r, volume_cap=3)
    assert (capped.volumes <= 3).all()


def test_degree_normalized_sweep():
    g = build_graph([(0, 1), (0, 2), (0, 3), (3, 4)])
    res = sweep(g, rank([3, 1, 1, 1.9, 0.9]), degree_normalized=True)
    # normalized scores: 1, 1, 1, 0.95, 0.9
    assert res.prefix_sizes.tolist() == [3, 4, 5]


def test_empty_support(k4):
    res = sweep(k4, rank([0, 0, 0, 0]))
    assert len(res.best) == 0
    assert res.best_conductance == math.inf


def test_caveman_local_ncp():
    g = caveman(3, 4)
    curve = local_ncp(g, "aclcut", 1, [1e-3, 1e-4, 1e-5])
    assert curve.conductance[4] == pytest.approx(1 / 6)
    assert sorted(curve.witness(4).tolist()) == [0, 1, 2, 3]


def test_two_cliques_global_ncp():
    import itertools
    edges = [(i, j) for i, j in itertools.combinations(range(5), 2)]
    edges += [(i + 5, j + 5) for i, j in itertools.combinations(range(5), 2)]
    edges.append((4, 5))
    g = build_graph(edges)
    curve = global_ncp(g, ("aclcut", "movcut", "egonet"), CoverageBudget(min_coverage=math.inf))
    assert curve.conductance[5] == pytest.approx(1 / 21)
    assert curve.witness(5).tolist() in ([0, 1, 2, 3, 4], [5, 6, 7, 8, 9])


def test_global_ncp_never_below_brute_force(rng):
    for _ in range(5):
        g = random_connected_graph(rng, n_lo=6, n_hi=9)
        bf = brute_force_profile(g)
        curve = global_ncp(g, ("aclcut", "egonet"), CoverageBudget(min_coverage=math.inf, eps_count=8))
        for k in curve.sizes():
            assert curve.conductance[k] >= bf[k] - 1e-12
            assert curve.conductance[k] == pytest.approx(conductance(g, curve.witness(k)))


def test_global_ncp_deterministic_and_thread_independent():
    g = caveman(6, 5)
    budget = CoverageBudget(min_coverage=2, eps_count=5, alpha_count=4, rng_seed=3)
    a = global_ncp(g, ("aclcut", "movcut"), budget)
    b = global_ncp(g, ("aclcut", "movcut"), budget, threads=3)
    assert np.array_equal(a.conductance, b.conductance)
    assert a.provenance == b.provenance


def test_merge_takes_pointwise_minimum(path5):
    a, b = NcpCurve.empty(path5), NcpCurve.empty(path5)
    a.add(sweep(path5, rank([5, 4, 3, 2, 1])), rank([5, 4, 3, 2, 1]))
    b.add(sweep(path5, rank([1, 5, 4, 0, 0])), rank([1, 5, 4, 0, 0]))
    m = a.merge(b)
    assert np.array_equal(m.conductance, np.minimum(a.conductance, b.conductance))
    assert m.runs == 2


def test_rows_crp_and_csv(tmp_path):
    g = caveman(3, 4)
    curve = local_ncp(g, "aclcut", 1, [1e-4])
    rows = curve.rows()
    row4 = next(r for r in rows if r["size"] == 4)
    assert row4["internal_conductance"] == pytest.approx(3 / 5)
    assert row4["ratio"] == pytest.approx((1 / 6) / (3 / 5))
    assert (4, pytest.approx(5 / 18)) in crp(curve)
    path = tmp_path / "ncp.csv"
    assert write_csv(path, NCP_COLUMNS, rows) == len(rows)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(NCP_COLUMNS)
    assert len(lines) == len(rows) + 1


def test_format_value():
    assert format_value(1 / 3) == "0.333333333333"
    assert format_value(math.nan) == "nan"
    assert format_value(math.inf) == "inf"
    assert format_value(3) == "3"
    assert format_value(None) == ""
    assert format_value(True) == "1"
