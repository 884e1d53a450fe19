"""Co-membership frequencies of sampled local communities and node orderings.

For sampled communities S_1..S_T, the association of nodes i and j is the
number of samples containing both divided by the number containing either.
Pairs that never appeared in any sample carry no value and are masked.
"""
from __future__ import annotations

from collections.abc import Iterable

import numpy as np
import scipy.sparse as sp

from .graph import Graph, GraphError, build_graph


class AssociationMatrix:
    """Sparse co-occurrence counts over a fixed node universe ``0..n-1``."""

    def __init__(self, n: int, co_count: sp.csr_matrix | None = None):
        self.n = n
        self.co_count = co_count if co_count is not None else sp.csr_matrix((n, n), dtype=np.int64)

    @property
    def counts(self) -> np.ndarray:
        """Number of samples each node appeared in."""
        return np.asarray(self.co_count.diagonal()).astype(np.int64)

    @property
    def samples_seen(self) -> np.ndarray:
        return np.flatnonzero(self.counts)

    def values(self) -> sp.csr_matrix:
        """Ã on co-occurring pairs (including the diagonal) as a sparse matrix.

        Entries not stored are 0 when :meth:`mask` is true and undefined
        otherwise.
        """
        co = self.co_count.tocoo()
        cnt = self.counts
        either = cnt[co.row] + cnt[co.col] - co.data
        return sp.csr_matrix((co.data / either, (co.row, co.col)), shape=(self.n, self.n))

    def mask(self) -> np.ndarray:
        """Dense boolean matrix: true where Ã is defined (either node was sampled)."""
        seen = self.counts > 0
        return seen[:, None] | seen[None, :]

    def dense(self) -> np.ndarray:
        """Ã as a dense array with ``nan`` on undefined pairs."""
        out = self.values().toarray()
        out[~self.mask()] = np.nan
        return out

    def value(self, i: int, j: int) -> float:
        cnt = self.counts
        co = self.co_count[i, j]
        either = cnt[i] + cnt[j] - co
        return float(co / either) if either else float("nan")

    def merge(self, other: AssociationMatrix) -> AssociationMatrix:
        if other.n != self.n:
            raise GraphError("association matrices over different node sets")
        return AssociationMatrix(self.n, (self.co_count + other.co_count).tocsr())


def accumulate(samples: Iterable, n: int) -> AssociationMatrix:
    """Count co-occurrences of node indices over ``samples``."""
    rows, cols = [], []
    for s in samples:
        s = np.unique(np.asarray(list(s), dtype=np.int64))
        if len(s) == 0:
            raise GraphError("empty community sample")
        if s[0] < 0 or s[-1] >= n:
            raise GraphError(f"sample node out of range [0, {n})")
        rows.append(np.repeat(s, len(s)))
        cols.append(np.tile(s, len(s)))
    if not rows:
        return AssociationMatrix(n)
    r, c = np.concatenate(rows), np.concatenate(cols)
    co = sp.csr_matrix((np.ones(len(r), dtype=np.int64), (r, c)), shape=(n, n))
    co.sum_duplicates()
    return AssociationMatrix(n, co)


def sample_communities(
    g: Graph,
    method: str = "movcut",
    param: float | None = None,
    *,
    n_samples: int | None = None,
    volume_cap: float | None = None,
    rng_seed: int = 0,
    connected_only: bool = True,
    lengths: str = "inverse_weight",
) -> list[np.ndarray]:
    """Best sweep set for each of ``n_samples`` seeds drawn without replacement.

    ``param`` is ε for ``aclcut`` and γ for ``movcut`` (default: the middle of
    the usual grid).  Seeds whose run fails or whose sweep is empty are
    skipped.
    """
    from .ncp import CoverageBudget, _param_grid, _run_one, _Runner
    from .quality import lambda2

    lam2 = lambda2(g) if method == "movcut" else None
    if param is None:
        grid = _param_grid(g, method, CoverageBudget(), lam2)
        param = grid[len(grid) // 2]
    runner = _Runner(g, method, param, lam2=lam2, lengths=lengths, volume_cap=volume_cap)
    seeds = np.random.default_rng(rng_seed).permutation(g.n)[: n_samples or g.n]
    sweep_kw = {"connected_only": connected_only, "volume_cap": volume_cap, "degree_normalized": False}
    out = []
    for s in seeds:
        res = _run_one(runner, int(s), sweep_kw)
        if res is not None and len(res[1].best):
            out.append(res[1].best)
    return out


def _average_linkage_order(sim: np.ndarray) -> list[int]:
    """Leaf order of the average-linkage dendrogram for similarity ``sim``.

    The most similar pair of clusters merges first; ties go to the pair
    with the smallest indices.  Within every merge the child with the larger
    mean internal similarity is listed first (singletons count as 0, ties
    by smallest member).
    """
    k = len(sim)
    if k <= 1:
        return list(range(k))
    S = np.array(sim, dtype=float)
    np.fill_diagonal(S, -np.inf)
    size = np.ones(k)
    internal = np.zeros(k)
    leaves = [[i] for i in range(k)]
    active = np.ones(k, dtype=bool)
    row_best = S.max(axis=1)
    row_arg = S.argmax(axis=1)

    for _ in range(k - 1):
        a = int(np.argmax(np.where(active, row_best, -np.inf)))
        b = int(row_arg[a])
        a, b = min(a, b), max(a, b)
        cross = S[a, b] * size[a] * size[b]

        def key(c):
            pairs = size[c] * (size[c] - 1) / 2
            return (-(internal[c] / pairs) if pairs else 0.0, leaves[c][0])

        first, second = (a, b) if key(a) <= key(b) else (b, a)
        merged_leaves = leaves[first] + leaves[second]
        new_row = (S[a] * size[a] + S[b] * size[b]) / (size[a] + size[b])
        internal[a] += internal[b] + cross
        size[a] += size[b]
        leaves[a] = merged_leaves
        active[b] = False
        new_row[~active] = -np.inf
        new_row[a] = -np.inf
        S[a, :] = new_row
        S[:, a] = new_row
        S[b, :] = -np.inf
        S[:, b] = -np.inf
        row_best[b] = -np.inf
        for i in np.flatnonzero(active):
            if i == a:
                continue
            if row_arg[i] in (a, b):
                row_arg[i] = int(np.argmax(S[i]))
                row_best[i] = S[i, row_arg[i]]
            elif S[i, a] > row_best[i] or (S[i, a] == row_best[i] and a < row_arg[i]):
                row_best[i] = S[i, a]
                row_arg[i] = a
        row_arg[a] = int(np.argmax(S[a]))
        row_best[a] = S[a, row_arg[a]]
    root = int(np.flatnonzero(active)[0])
    return leaves[root]


def order_nodes(a: AssociationMatrix, groups=None) -> np.ndarray:
    """Permutation placing strongly associated nodes next to each other.

    ``groups`` (one key per node) keeps nodes of the same group contiguous,
    groups in sorted key order, with the dendrogram order inside each group.
    """
    sim = np.nan_to_num(a.dense(), nan=0.0)
    if groups is None:
        return np.array(_average_linkage_order(sim), dtype=np.int64)
    groups = np.asarray(groups)
    if len(groups) != a.n:
        raise GraphError("need one group key per node")
    out = []
    for key in sorted(set(groups.tolist())):
        idx = np.flatnonzero(groups == key)
        out.extend(idx[_average_linkage_order(sim[np.ix_(idx, idx)])])
    return np.array(out, dtype=np.int64)


def reweight_graph(g: Graph, a: AssociationMatrix, *, mean_threshold: bool = False) -> Graph:
    """Same edges with weight Ã_ij; zero-association edges are dropped.

    With ``mean_threshold`` only edges above the mean new weight survive.
    """
    if a.n != g.n:
        raise GraphError("association matrix and graph have different node counts")
    vals = a.values()
    edges = [(i, j, vals[i, j]) for i, j, _ in g.edges()]
    edges = [e for e in edges if e[2] > 0]
    if mean_threshold and edges:
        mean = float(np.mean([w for _, _, w in edges]))
        edges = [e for e in edges if e[2] > mean]
    labelled = [(g.label(i), g.label(j), w) for i, j, w in edges]
    return build_graph(labelled, nodes=[g.label(i) for i in range(g.n)])


def write_coordinates(a: AssociationMatrix, path, g: Graph | None = None) -> int:
    """``i j value`` lines for every stored pair with i <= j; returns rows written."""
    coo = sp.triu(a.values()).tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for k in order:
            i, j = int(coo.row[k]), int(coo.col[k])
            li, lj = (g.label(i), g.label(j)) if g is not None else (i, j)
            fh.write(f"{li} {lj} {coo.data[k]:.12g}\n")
    return len(order)


def write_permutation(perm, path, g: Graph | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i in perm:
            fh.write(f"{g.label(int(i)) if g is not None else int(i)}\n")
