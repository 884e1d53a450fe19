"""Approximate personalized PageRank by local push.

The push works with the lazy random walk W = (I + D^{-1}A)/2 and teleport
constant ``alpha_tilde``.  Its fixed point is the ordinary PageRank vector
with ``alpha = 1 - 2*alpha_tilde/(1 + alpha_tilde)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from ._kernels import acl_push
from .graph import Graph, GraphError
from .ranking import RankVector

DEFAULT_ALPHA_TILDE = 0.001


def alpha_from_lazy(alpha_tilde: float) -> float:
    return 1.0 - 2.0 * alpha_tilde / (1.0 + alpha_tilde)


def lazy_from_alpha(alpha: float) -> float:
    return (1.0 - alpha) / (1.0 + alpha)


@dataclass(frozen=True)
class PushParams:
    epsilon: float
    seed: int
    alpha_tilde: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.alpha is not None and self.alpha_tilde is not None:
            raise ValueError("give alpha or alpha_tilde, not both")
        if self.alpha is None:
            lazy = DEFAULT_ALPHA_TILDE if self.alpha_tilde is None else self.alpha_tilde
            object.__setattr__(self, "alpha_tilde", lazy)
            object.__setattr__(self, "alpha", alpha_from_lazy(lazy))
        else:
            object.__setattr__(self, "alpha_tilde", lazy_from_alpha(self.alpha))
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


def exact_ppr(g: Graph, alpha: float, seed_distribution) -> RankVector:
    """Solve p = alpha * A D^{-1} p + (1 - alpha) s directly.

    This is the mass-conserving form of the PageRank recursion (random-walk
    transition applied to a distribution), so p sums to 1.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    s = np.asarray(seed_distribution, dtype=float)
    if s.shape != (g.n,) or (s < 0).any() or not np.isclose(s.sum(), 1.0):
        raise ValueError("seed distribution must be a nonnegative length-n vector summing to 1")
    inv_d = np.divide(1.0, g.strength, out=np.zeros(g.n), where=g.strength > 0)
    M = sp.identity(g.n, format="csc") - alpha * (g.adjacency @ sp.diags(inv_d)).tocsc()
    b = (1.0 - alpha) * s
    p = spsolve(M, b)
    res = np.linalg.norm(M @ p - b)
    if res > 1e-10:
        # one refinement step is enough for the conditioning seen with alpha < 1
        p += spsolve(M, b - M @ p)
        res = np.linalg.norm(M @ p - b)
        if res > 1e-10:
            raise GraphError(f"PageRank solve residual {res:.3g} exceeds 1e-10")
    p = np.maximum(p, 0.0)
    return RankVector(p, np.flatnonzero(p > 0), "exact_ppr", int(np.argmax(s)), {"alpha": alpha})


def push_approx_ppr(g: Graph, params: PushParams) -> RankVector:
    """Local push approximation of PageRank seeded at one node.

    On return ``residual[u] < epsilon * d_u`` for every node and
    ``0 <= exact - scores <= epsilon * d_u`` node-wise.
    """
    if not 0 <= params.seed < g.n:
        raise GraphError(f"seed {params.seed} out of range [0, {g.n})")
    p, r, pushes = acl_push(
        g.indptr, g.indices, g.weights, g.strength,
        params.seed, params.alpha_tilde, params.epsilon,
    )
    return RankVector(
        p,
        np.flatnonzero(p > 0),
        "aclcut",
        params.seed,
        {"epsilon": params.epsilon, "alpha_tilde": params.alpha_tilde, "alpha": params.alpha,
         "pushes": int(pushes)},
        residual=r,
    )


def epsilon_grid(g: Graph, count: int = 20) -> np.ndarray:
    """``count`` log-spaced truncation values from 1/vol(G) up to 1/k_max."""
    if count < 2:
        raise ValueError("count must be at least 2")
    if g.m < 2:
        raise GraphError("epsilon grid needs at least two edges")
    return np.geomspace(1.0 / g.total_volume, 1.0 / g.max_strength, count)
