"""Community-quality scores and whole-graph diagnostics.

Undefined values are reported as ``nan`` and unbounded ratios as ``inf``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from ._kernels import enumerate_bipartitions, sweep_profile
from .graph import Graph, GraphError, cut_and_volume, node_set

#: Largest node count for which exhaustive bipartition enumeration is allowed.
EXACT_LIMIT = 22

UNDEFINED = math.nan


def conductance(g: Graph, s) -> float:
    """vol(S, S̄) / min(vol(S), vol(S̄))."""
    s = node_set(g, s)
    if len(s) == 0 or len(s) == g.n:
        raise GraphError("conductance needs a nonempty proper subset")
    cut, vol = cut_and_volume(g, s)
    denom = min(vol, g.total_volume - vol)
    if denom <= 0:
        raise GraphError("conductance undefined: one side has zero volume")
    return cut / denom


def edge_expansion(g: Graph, s) -> float:
    """Boundary weight per node, |E(S, S̄)| / |S| (weights count as multiplicities)."""
    s = node_set(g, s)
    if len(s) == 0:
        raise GraphError("edge expansion of an empty set")
    cut, _ = cut_and_volume(g, s)
    return cut / len(s)


def _dense(g: Graph) -> np.ndarray:
    return g.adjacency.toarray()


def _check_exact(n: int) -> None:
    if n > EXACT_LIMIT:
        raise GraphError(f"exact enumeration limited to n <= {EXACT_LIMIT} (got {n})")
    if n < 2:
        raise GraphError("need at least two nodes")


def exact_profile(g: Graph) -> np.ndarray:
    """Exact minimum conductance for every set size 0..n (``inf`` where none)."""
    _check_exact(g.n)
    min_phi, _ = enumerate_bipartitions(_dense(g))
    return min_phi


def graph_conductance(g: Graph) -> float:
    """Minimum conductance over all nonempty proper subsets (exhaustive)."""
    return float(exact_profile(g).min())


def graph_expansion(g: Graph) -> float:
    """Minimum edge expansion over subsets with at most n/2 nodes (exhaustive)."""
    _check_exact(g.n)
    _, min_cut = enumerate_bipartitions(_dense(g))
    sizes = np.arange(1, g.n // 2 + 1)
    return float((min_cut[sizes] / sizes).min())


def internal_conductance(g: Graph, c, mode: str = "auto") -> float:
    """Conductance of the subgraph induced by ``c``, viewed in isolation.

    ``mode`` is ``"exact"`` (|C| <= 22), ``"spectral"`` (best Fiedler sweep,
    an upper bound) or ``"auto"`` (exact when allowed).  Returns ``nan`` for
    a singleton and 0 when the induced subgraph is disconnected.
    """
    c = node_set(g, c)
    if len(c) < 2:
        return UNDEFINED
    sub = g.subgraph(c)
    if not sub.is_connected():
        return 0.0
    if mode == "auto":
        mode = "exact" if len(c) <= EXACT_LIMIT else "spectral"
    if mode == "exact":
        return graph_conductance(sub)
    if mode == "spectral":
        return _spectral_sweep_conductance(sub)
    raise ValueError(f"unknown mode {mode!r}")


def _spectral_sweep_conductance(g: Graph) -> float:
    _, vec = fiedler(g)
    score = vec / np.sqrt(g.strength)
    best = math.inf
    for sign in (1.0, -1.0):
        order = np.argsort(-sign * score, kind="stable")
        ends = np.ones(g.n, dtype=bool)
        _, vols, cuts, _ = sweep_profile(g.indptr, g.indices, g.weights, g.strength, order, ends)
        denom = np.minimum(vols, g.total_volume - vols)[:-1]
        best = min(best, float((cuts[:-1] / denom).min()))
    return best


def conductance_ratio(g: Graph, c, mode: str = "auto") -> float:
    """φ(C) / φ_in(C); ``inf`` when only φ_in vanishes, ``nan`` when undefined."""
    c = node_set(g, c)
    phi_in = internal_conductance(g, c, mode)
    if math.isnan(phi_in):
        return UNDEFINED
    phi = conductance(g, c)
    return ratio(phi, phi_in)


def ratio(phi: float, phi_in: float) -> float:
    if math.isnan(phi_in) or math.isnan(phi):
        return UNDEFINED
    if phi_in > 0:
        return phi / phi_in
    return math.inf if phi > 0 else UNDEFINED


def clustering_coefficients(g: Graph) -> np.ndarray:
    """Weighted local clustering: (1/(k(k-1))) Σ_{j,k} (ŵ_ij ŵ_ik ŵ_jk)^(1/3).

    ŵ is the weight divided by the largest weight; nodes with fewer than two
    neighbors get 0.
    """
    A = g.adjacency
    W3 = A.multiply(1.0 / g.weights.max()).power(1.0 / 3.0).tocsr()
    closed = np.asarray((W3 @ W3).multiply(W3).sum(axis=1)).ravel()
    k = g.degree.astype(float)
    out = np.zeros(g.n)
    ok = k >= 2
    out[ok] = closed[ok] / (k[ok] * (k[ok] - 1))
    return out


def clustering_coefficient(g: Graph, i: int) -> float:
    if not 0 <= i < g.n:
        raise GraphError(f"node {i} out of range")
    return float(clustering_coefficients(g)[i])


def mean_clustering(g: Graph) -> float:
    return float(clustering_coefficients(g).mean())


def fiedler(g: Graph, tol: float = 1e-8) -> tuple[float, np.ndarray]:
    """Second-smallest eigenpair of the normalized Laplacian.

    Runs implicitly restarted Lanczos (ARPACK) on 2I - 𝓛 with the null vector
    D^{1/2}1 deflated, so the wanted eigenvalue becomes the largest one.
    The start vector comes from a fixed RNG seed.
    """
    if not g.is_connected():
        raise GraphError("graph is disconnected; lambda_2 = 0 is uninformative")
    key = ("fiedler", tol)
    if key in g._cache:
        return g._cache[key]
    n = g.n
    sqrt_d = np.sqrt(g.strength)
    u = sqrt_d / np.linalg.norm(sqrt_d)
    inv_sqrt_d = 1.0 / sqrt_d
    A = g.adjacency
    if n <= 2:
        # ARPACK needs more room than a 2x2 problem offers
        N = inv_sqrt_d[:, None] * A.toarray() * inv_sqrt_d[None, :]
        vals, vecs = np.linalg.eigh(np.eye(n) - N)
        result = (float(vals[1]), vecs[:, 1])
    else:

        def matvec(x):
            x = np.ravel(x)
            return x + inv_sqrt_d * (A @ (inv_sqrt_d * x)) - 2.0 * u * (u @ x)

        op = LinearOperator((n, n), matvec=matvec, dtype=float)
        v0 = np.random.default_rng(0).standard_normal(n)
        v0 -= u * (u @ v0)
        try:
            vals, vecs = eigsh(op, k=1, which="LA", v0=v0, tol=tol / 4, maxiter=10 * n)
        except ArpackNoConvergence as exc:
            raise GraphError(f"lambda_2 did not converge within {10 * n} restarts") from exc
        result = (float(2.0 - vals[0]), vecs[:, 0])
    g._cache[key] = result
    return result


def lambda2(g: Graph, tol: float = 1e-8) -> float:
    """Smallest nonzero eigenvalue of D^{-1/2} L D^{-1/2} (connected graphs only)."""
    return fiedler(g, tol)[0]
