import itertools

import numpy as np
import pytest

from ncpkit.graph import build_graph


def random_connected_graph(rng, n_lo=4, n_hi=12, weighted=False, p_lo=0.2, p_hi=0.6):
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        p = rng.uniform(p_lo, p_hi)
        edges = [
            (i, j, float(rng.integers(1, 5)) if weighted else 1.0)
            for i, j in itertools.combinations(range(n), 2)
            if rng.random() < p
        ]
        if len(edges) < 2:
            continue
        g = build_graph(edges, nodes=range(n))
        if g.is_connected():
            return g


def random_graph(rng, n, p, weighted=False):
    """G(n, p) with at least one edge; may be disconnected."""
    while True:
        edges = [
            (i, j, float(rng.uniform(0.5, 3.0)) if weighted else 1.0)
            for i, j in itertools.combinations(range(n), 2)
            if rng.random() < p
        ]
        if edges:
            return build_graph(edges, nodes=range(n))


def caveman(cliques, size):
    """Ring of cliques: in clique c the edge (first, last) is removed and the
    last node is linked to the first node of clique c+1."""
    edges = []
    for c in range(cliques):
        base = c * size
        for i, j in itertools.combinations(range(size), 2):
            if (i, j) != (0, size - 1):
                edges.append((base + i, base + j))
        edges.append((base + size - 1, ((c + 1) % cliques) * size))
    return build_graph(edges)


def brute_force_profile(g):
    """min conductance by subset size over all 2^n - 2 proper subsets."""
    n = g.n
    A = g.adjacency.toarray()
    d = A.sum(axis=1)
    vol = d.sum()
    masks = np.arange(1, 2 ** n - 1)
    X = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    v = X @ d
    cut = v - np.einsum("ij,jk,ik->i", X, A, X)
    phi = cut / np.minimum(v, vol - v)
    out = np.full(n + 1, np.inf)
    np.minimum.at(out, X.sum(axis=1).astype(int), phi)
    return out


def dense_conductance(A, members):
    x = np.zeros(len(A))
    x[list(members)] = 1.0
    d = A.sum(axis=1)
    v = x @ d
    cut = v - x @ A @ x
    return cut / min(v, d.sum() - v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def k4():
    return build_graph(list(itertools.combinations(range(4), 2)))


@pytest.fixture
def path5():
    return build_graph([(i, i + 1) for i in range(4)])


# -- acceptance reporting -----------------------------------------------------

_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Records one pass/fail line per acceptance criterion."""

    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
