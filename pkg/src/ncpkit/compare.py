"""Rank agreement between the three dynamics over a grid of (ε, α).

For each seed and grid cell the push-approximate PPR vector, the spectral
ranking at γ = (α - 1)/α and the geodesic ranking are restricted to the
nodes with positive PPR score and compared pairwise by Spearman correlation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .aclcut import PushParams, push_approx_ppr
from .egonet import egorank
from .graph import Graph, GraphError
from .movcut import MovParams, gamma_from_alpha, movcut_rank
from .ncp import write_csv
from .quality import lambda2

PAIRS = ("A-M", "A-E", "M-E")
STATS = ("max", "mean", "min")
DEFAULT_EPSILONS = (1e-3, 1e-4, 1e-5, 1e-6)
DEFAULT_ALPHAS = (0.6, 0.7, 0.8, 0.9, 0.99)
COMPARE_COLUMNS = ("epsilon", "alpha", "pair", "stat", "value", "n_seeds_valid")


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    denom = math.sqrt((a @ a) * (b @ b))
    if denom == 0:
        return math.nan
    return float(np.clip((a @ b) / denom, -1.0, 1.0))


def spearman(x, y) -> float:
    """Pearson correlation of average ranks; ``nan`` if either input is constant."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("spearman needs two 1-d vectors of equal length")
    if len(x) < 2:
        return math.nan
    return _pearson(rankdata(x), rankdata(y))


@dataclass
class ComparisonGrid:
    epsilons: tuple
    alphas: tuple
    values: dict = field(default_factory=dict)  # (eps, alpha, pair) -> list of correlations
    skipped: set = field(default_factory=set)   # (eps, alpha) cells with no valid parameters

    def cell(self, eps: float, alpha: float, pair: str) -> dict:
        """``{"max", "mean", "min", "n"}`` over seeds with a defined correlation."""
        vals = [v for v in self.values.get((eps, alpha, pair), []) if not math.isnan(v)]
        if not vals:
            return {"max": math.nan, "mean": math.nan, "min": math.nan, "n": 0}
        return {"max": max(vals), "mean": float(np.mean(vals)), "min": min(vals), "n": len(vals)}

    def rows(self) -> list[dict]:
        out = []
        for eps in self.epsilons:
            for alpha in self.alphas:
                for pair in PAIRS:
                    c = self.cell(eps, alpha, pair)
                    for stat in STATS:
                        out.append({"epsilon": eps, "alpha": alpha, "pair": pair, "stat": stat,
                                    "value": c[stat], "n_seeds_valid": c["n"]})
        return out

    def write(self, path) -> int:
        return write_csv(path, COMPARE_COLUMNS, self.rows())


def _restricted(vectors, support, rerank):
    if rerank:
        return [v[support] for v in vectors]
    return [rankdata(v)[support] for v in vectors]


def compare_methods(
    g: Graph,
    seeds=None,
    epsilons=DEFAULT_EPSILONS,
    alphas=DEFAULT_ALPHAS,
    *,
    n_seeds: int = 50,
    rng_seed: int = 0,
    rerank: bool = True,
    lengths: str = "inverse_weight",
) -> ComparisonGrid:
    """Pairwise Spearman correlations aggregated over seeds for every (ε, α).

    ``seeds`` defaults to ``n_seeds`` nodes drawn uniformly without
    replacement.  With ``rerank`` the restricted vectors are ranked afresh;
    otherwise ranks over all nodes are computed first and then restricted.
    Cells whose α has no valid spectral counterpart (α >= 1/(1 - λ₂)) or no
    valid PPR (α >= 1) are skipped.
    """
    epsilons = tuple(float(e) for e in epsilons)
    alphas = tuple(float(a) for a in alphas)
    if not epsilons or not alphas:
        raise GraphError("comparison grids must be nonempty")
    if seeds is None:
        seeds = np.random.default_rng(rng_seed).choice(g.n, size=min(n_seeds, g.n), replace=False)
    seeds = [int(s) for s in seeds]
    lam = lambda2(g)
    bound = math.inf if lam >= 1 else 1.0 / (1.0 - lam)
    grid = ComparisonGrid(epsilons, alphas)
    ego = {s: egorank(g, s, lengths).scores for s in seeds}
    for alpha in alphas:
        if not (0 < alpha < 1) or alpha >= bound:
            grid.skipped.update((eps, alpha) for eps in epsilons)
            continue
        gamma = gamma_from_alpha(alpha)
        spectral = {}
        for s in seeds:
            try:
                spectral[s] = movcut_rank(g, MovParams(seed=s, gamma=gamma), lam2=lam).scores
            except GraphError:
                spectral[s] = None
        for eps in epsilons:
            for s in seeds:
                p = push_approx_ppr(g, PushParams(epsilon=eps, seed=s, alpha=alpha)).scores
                support = np.flatnonzero(p > 0)
                m = spectral[s]
                vecs = _restricted([p, m if m is not None else p, ego[s]], support, rerank)
                corr = {
                    "A-M": spearman(vecs[0], vecs[1]) if m is not None else math.nan,
                    "A-E": spearman(vecs[0], vecs[2]),
                    "M-E": spearman(vecs[1], vecs[2]) if m is not None else math.nan,
                }
                for pair, v in corr.items():
                    grid.values.setdefault((eps, alpha, pair), []).append(v)
    return grid
