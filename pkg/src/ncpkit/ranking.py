from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class RankVector:
    """Per-node scores from one dynamics run.

    ``support`` lists the nodes that take part in sweeps: positive scores for
    PageRank-type and geodesic rankings, every node for the spectral one
    (whose scores may be negative).
    """

    scores: np.ndarray
    support: np.ndarray
    method: str
    seed: int
    params: dict = field(default_factory=dict)
    residual: np.ndarray | None = None

    def param_value(self):
        """The size-scale parameter reported in NCP output."""
        for key in ("epsilon", "alpha", "gamma"):
            if key in self.params:
                return self.params[key]
        return None
