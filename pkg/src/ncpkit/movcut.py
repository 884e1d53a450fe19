"""Locally-biased spectral ranking.

Solves (L - γD) x = D s for the seed vector s (the indicator of one node
projected D-orthogonally off the constant vector).  For γ < λ₂ the operator
is positive definite on the subspace D-orthogonal to 1, where a
diagonally-scaled conjugate gradient iteration is run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError
from .quality import lambda2
from .ranking import RankVector

#: Gap kept below the theoretical alpha maximum (1 - λ₂)^{-1}.
ALPHA_MARGIN = 1e-10
ALPHA_MIN = 0.7


class NegativeCurvature(GraphError):
    """CG met p'Ap <= 0, so γ is not below λ₂ of this graph."""


def gamma_from_alpha(alpha: float) -> float:
    return (alpha - 1.0) / alpha


def alpha_from_gamma(gamma: float) -> float:
    return 1.0 / (1.0 - gamma)


@dataclass(frozen=True)
class MovParams:
    seed: int
    gamma: float | None = None
    alpha: float | None = None
    volume_cap: float | None = None

    def __post_init__(self):
        if (self.gamma is None) == (self.alpha is None):
            raise ValueError("give exactly one of gamma or alpha")
        if self.gamma is None:
            if self.alpha <= 0:
                raise ValueError("alpha must be positive")
            object.__setattr__(self, "gamma", gamma_from_alpha(self.alpha))
        if self.volume_cap is not None and not self.volume_cap > 0:
            raise ValueError("volume_cap must be positive")


def seed_vector(g: Graph, i: int) -> np.ndarray:
    """e_i projected so that s'D1 = 0, then scaled so that s'Ds = 1."""
    if not 0 <= i < g.n:
        raise GraphError(f"seed {i} out of range [0, {g.n})")
    s = np.full(g.n, -g.strength[i] / g.total_volume)
    s[i] += 1.0
    return s / math.sqrt(s @ (g.strength * s))


def conjugate_gradient(matvec, b, *, project=None, tol=1e-10, maxiter=None, residual_norm=None):
    """Plain CG for a symmetric operator that is positive definite on the
    subspace kept by ``project``.

    ``residual_norm`` maps a residual to the norm used for the stopping test
    (defaults to Euclidean); iteration stops once it is <= tol times the same
    norm of ``b``.  Returns ``(x, iterations, final_relative_residual)``.
    """
    project = project or (lambda v: v)
    norm = residual_norm or np.linalg.norm
    maxiter = maxiter or 10 * len(b)
    x = np.zeros_like(b)
    r = project(b.copy())
    target = tol * norm(b)
    if norm(r) <= target:
        return x, 0, 0.0
    p = r.copy()
    rr = r @ r
    for it in range(1, maxiter + 1):
        Ap = project(matvec(p))
        curv = p @ Ap
        if not curv > 0:
            raise NegativeCurvature(f"nonpositive curvature {curv:.3g} at iteration {it}")
        step = rr / curv
        x += step * p
        r -= step * Ap
        if it % 50 == 0:
            # refresh to stop drift between the recursive and true residual
            r = project(b - matvec(x))
        res = norm(r)
        if res <= target:
            return x, it, res / norm(b)
        rr_new = r @ r
        p = project(r + (rr_new / rr) * p)
        rr = rr_new
    return x, maxiter, norm(project(b - matvec(x))) / norm(b)


def movcut_rank(g: Graph, params: MovParams, *, lam2: float | None = None, tol: float = 1e-10) -> RankVector:
    """x* = (L - γD)^+ D s with unit normalization constant.

    ``lam2`` may be passed to avoid recomputing λ₂.  Raises if γ >= λ₂ or if
    the solve misses the relative residual ``max(tol, 1e-8)``.
    """
    if not g.is_connected():
        raise GraphError("spectral ranking needs a connected graph")
    lam = lambda2(g) if lam2 is None else lam2
    gamma = params.gamma
    if not gamma < lam:
        raise GraphError(f"gamma={gamma:.12g} must be below lambda_2={lam:.12g}")
    s = seed_vector(g, params.seed)
    sqrt_d = np.sqrt(g.strength)
    inv_sqrt_d = 1.0 / sqrt_d
    u = sqrt_d / np.linalg.norm(sqrt_d)
    A = g.adjacency
    # Work with y = D^{1/2} x so the operator is (1 - γ)I - D^{-1/2} A D^{-1/2}.
    def matvec(y):
        return (1.0 - gamma) * y - inv_sqrt_d * (A @ (inv_sqrt_d * y))

    def project(v):
        return v - u * (u @ v)

    def original_norm(r):
        # residual of (L - γD)x = Ds equals D^{1/2} times the scaled residual
        return np.linalg.norm(sqrt_d * r)

    b = sqrt_d * s
    y, iters, rel = conjugate_gradient(
        matvec, b, project=project, tol=tol, maxiter=max(10 * g.n, 1000), residual_norm=original_norm,
    )
    if rel > max(tol, 1e-8):
        raise GraphError(f"conjugate gradient stalled at relative residual {rel:.3g} after {iters} iterations")
    x = inv_sqrt_d * y
    return RankVector(
        x,
        np.arange(g.n),
        "movcut",
        params.seed,
        {"gamma": gamma, "alpha": alpha_from_gamma(gamma), "volume_cap": params.volume_cap,
         "iterations": iters, "residual": rel},
    )


def alpha_interval(lam2: float, count: int = 20) -> np.ndarray:
    """``count`` evenly spaced alphas in [0.7, (1 - λ₂)^{-1} - 1e-10]."""
    if count < 2:
        raise ValueError("count must be at least 2")
    if lam2 >= 1.0:
        raise GraphError(
            f"lambda_2={lam2:.6g} >= 1 leaves alpha unbounded; pass explicit alpha or gamma values"
        )
    upper = 1.0 / (1.0 - lam2) - ALPHA_MARGIN
    if not upper > ALPHA_MIN:
        raise GraphError(f"empty alpha interval [0.7, {upper:.6g}]; pass explicit values")
    return np.linspace(ALPHA_MIN, upper, count)


def alpha_grid(g: Graph, count: int = 20) -> np.ndarray:
    return alpha_interval(lambda2(g), count)


def gamma_grid(g: Graph, count: int = 20, *, lam2: float | None = None) -> np.ndarray:
    """γ values for NCP sampling.

    Maps :func:`alpha_grid` through γ = (α - 1)/α.  When λ₂ >= 1 no finite
    alpha reaches λ₂, so γ is spaced evenly over the matching range
    [γ(0.7), λ₂ - 1e-10] instead.
    """
    lam = lambda2(g) if lam2 is None else lam2
    if lam < 1.0:
        return np.array([gamma_from_alpha(a) for a in alpha_interval(lam, count)])
    return np.linspace(gamma_from_alpha(ALPHA_MIN), lam - ALPHA_MARGIN, count)
