"""Geodesic spreading: rank nodes by 1 / (1 + distance from the seed)."""
from __future__ import annotations

import numpy as np

from .graph import Graph, geodesic_distances, k_neighborhood
from .ranking import RankVector


def egorank(g: Graph, seed: int, lengths: str = "inverse_weight") -> RankVector:
    dist = geodesic_distances(g, seed, lengths)
    reachable = np.isfinite(dist)
    scores = np.zeros(g.n)
    scores[reachable] = 1.0 / (1.0 + dist[reachable])
    return RankVector(scores, np.flatnonzero(reachable), "egonet", seed, {"lengths": lengths})


def k_ego_net(g: Graph, seed: int, k: float, lengths: str = "inverse_weight") -> np.ndarray:
    """Nodes of the k-ego-net of ``seed`` (seed included)."""
    return k_neighborhood(g, [seed], k, lengths)
