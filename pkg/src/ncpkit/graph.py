"""Immutable sparse undirected weighted graphs.

Nodes are dense indices ``0..n-1``; the original identifiers passed to
:func:`build_graph` are kept in ``Graph.labels``.  Adjacency is stored in CSR
form with both directions of every edge present.
"""
from __future__ import annotations

from collections.abc import Hashable, Iterable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph


class GraphError(ValueError):
    """Raised for malformed graph input or invalid node references."""


@dataclass(frozen=True, eq=False)
class Graph:
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    strength: np.ndarray
    labels: tuple | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.strength)

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @property
    def total_volume(self) -> float:
        return float(self.strength.sum())

    @property
    def degree(self) -> np.ndarray:
        """Unweighted degree (neighbor count) per node."""
        return np.diff(self.indptr)

    @property
    def max_strength(self) -> float:
        return float(self.strength.max())

    @property
    def adjacency(self) -> sp.csr_matrix:
        A = self._cache.get("adjacency")
        if A is None:
            A = sp.csr_matrix((self.weights, self.indices, self.indptr), shape=(self.n, self.n))
            self._cache["adjacency"] = A
        return A

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def label(self, i: int):
        return i if self.labels is None else self.labels[i]

    def index_of(self, label) -> int:
        lookup = self._cache.get("label_index")
        if lookup is None:
            lookup = {lab: i for i, lab in enumerate(self.labels or range(self.n))}
            self._cache["label_index"] = lookup
        try:
            return lookup[label]
        except KeyError:
            raise GraphError(f"unknown node {label!r}") from None

    def edges(self) -> Iterable[tuple[int, int, float]]:
        """Each undirected edge once, as ``(i, j, w)`` with ``i < j``."""
        for i in range(self.n):
            for j, w in zip(*self.neighbors(i)):
                if i < j:
                    yield i, int(j), float(w)

    def subgraph(self, nodes) -> Graph:
        """Induced subgraph on ``nodes`` (relabelled densely, labels carried over)."""
        nodes = node_set(self, nodes)
        A = self.adjacency[nodes][:, nodes].tocsr()
        A.sort_indices()
        labels = tuple(self.label(int(i)) for i in nodes)
        return _from_csr(A, labels)

    def is_connected(self) -> bool:
        key = "connected"
        if key not in self._cache:
            ncomp, _ = csgraph.connected_components(self.adjacency, directed=False)
            self._cache[key] = ncomp == 1
        return self._cache[key]


def _from_csr(A: sp.csr_matrix, labels: tuple | None) -> Graph:
    indptr = np.asarray(A.indptr, dtype=np.int64)
    indices = np.asarray(A.indices, dtype=np.int64)
    weights = np.asarray(A.data, dtype=np.float64)
    rows = np.repeat(np.arange(A.shape[0]), np.diff(indptr))
    strength = np.bincount(rows, weights=weights, minlength=A.shape[0]).astype(np.float64)
    return Graph(indptr, indices, weights, strength, labels)


def _ordered_labels(labels: list) -> list:
    try:
        return sorted(labels)
    except TypeError:
        return labels


def build_graph(
    edges: Iterable[tuple],
    *,
    nodes: Iterable[Hashable] | None = None,
    lcc: bool = False,
) -> Graph:
    """Build a :class:`Graph` from ``(u, v)`` or ``(u, v, w)`` tuples.

    Duplicate undirected edges have their weights summed.  Self-loops and
    non-positive weights are rejected.  ``nodes`` adds nodes that may have no
    incident edge.  With ``lcc=True`` only the largest connected component is
    returned.
    """
    merged: dict[tuple, float] = {}
    seen: dict[Hashable, None] = {}
    for e in edges:
        if len(e) == 2:
            u, v = e
            w = 1.0
        elif len(e) == 3:
            u, v, w = e
            w = float(w)
        else:
            raise GraphError(f"edge must have 2 or 3 fields, got {e!r}")
        if u == v:
            raise GraphError(f"self-loop on node {u!r}")
        if not w > 0 or not np.isfinite(w):
            raise GraphError(f"non-positive or non-finite weight in edge {e!r}")
        seen.setdefault(u)
        seen.setdefault(v)
        key = (v, u) if (v, u) in merged else (u, v)
        merged[key] = merged.get(key, 0.0) + w
    if not merged:
        raise GraphError("empty edge list")
    if nodes is not None:
        for u in nodes:
            seen.setdefault(u)

    labels = _ordered_labels(list(seen))
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    rows = np.empty(2 * len(merged), dtype=np.int64)
    cols = np.empty_like(rows)
    data = np.empty(2 * len(merged))
    for k, ((u, v), w) in enumerate(merged.items()):
        i, j = index[u], index[v]
        rows[2 * k], cols[2 * k], data[2 * k] = i, j, w
        rows[2 * k + 1], cols[2 * k + 1], data[2 * k + 1] = j, i, w
    A = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    A.sort_indices()
    g = _from_csr(A, tuple(labels))
    return largest_component(g) if lcc else g


def read_edgelist(path: str | Path, *, lcc: bool = False) -> Graph:
    """Read ``u v [w]`` lines; ``#`` comments and blank lines are skipped.

    Integer-looking node tokens are converted to ``int`` so that they sort
    numerically.
    """
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise GraphError(f"{path}:{lineno}: expected 'u v [w]', got {line!r}")
            u, v = (_parse_token(t) for t in parts[:2])
            try:
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise GraphError(f"{path}:{lineno}: bad weight {parts[2]!r}") from None
            edges.append((u, v, w))
    try:
        return build_graph(edges, lcc=lcc)
    except GraphError as exc:
        raise GraphError(f"{path}: {exc}") from None


def _parse_token(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


def write_edgelist(g: Graph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, j, w in g.edges():
            fh.write(f"{g.label(i)} {g.label(j)} {w:.12g}\n")


def node_set(g: Graph, nodes) -> np.ndarray:
    """Validate ``nodes`` as indices of ``g``; returns them sorted and unique."""
    arr = np.unique(np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes, dtype=np.int64))
    if len(arr) and (arr[0] < 0 or arr[-1] >= g.n):
        raise GraphError(f"node index out of range [0, {g.n})")
    return arr


def _mask(g: Graph, nodes) -> np.ndarray:
    mask = np.zeros(g.n, dtype=bool)
    mask[node_set(g, nodes)] = True
    return mask


def volume(g: Graph, s1, s2=None) -> float:
    """Total edge weight from ``s1`` into ``s2`` (``s2=None`` means all nodes)."""
    s1 = node_set(g, s1)
    if s2 is None:
        return float(g.strength[s1].sum())
    in2 = _mask(g, s2)
    total = 0.0
    for i in s1:
        nbrs, w = g.neighbors(i)
        total += w[in2[nbrs]].sum()
    return float(total)


def cut_and_volume(g: Graph, nodes) -> tuple[float, float]:
    """``(vol(S, S̄), vol(S))`` in one pass over the rows of S."""
    s = node_set(g, nodes)
    inside = np.zeros(g.n, dtype=bool)
    inside[s] = True
    vol = float(g.strength[s].sum())
    internal = 0.0
    for i in s:
        nbrs, w = g.neighbors(i)
        internal += w[inside[nbrs]].sum()
    return vol - internal, vol


def geodesic_distances(g: Graph, seed: int, lengths: str = "inverse_weight") -> np.ndarray:
    """Shortest-path distance from ``seed`` to every node (``inf`` if unreachable).

    ``lengths="unit"`` counts hops; ``"inverse_weight"`` uses edge length 1/w.
    """
    if not 0 <= seed < g.n:
        raise GraphError(f"seed {seed} out of range [0, {g.n})")
    if lengths == "unit":
        return csgraph.shortest_path(g.adjacency, directed=False, unweighted=True, indices=seed)
    if lengths == "inverse_weight":
        L = sp.csr_matrix((1.0 / g.weights, g.indices, g.indptr), shape=(g.n, g.n))
        return csgraph.dijkstra(L, directed=False, indices=seed)
    raise ValueError(f"unknown lengths mode {lengths!r}")


def k_neighborhood(g: Graph, seeds, k: float, lengths: str = "inverse_weight") -> np.ndarray:
    """All nodes within distance ``k`` of any seed; always contains the seeds."""
    seeds = node_set(g, seeds)
    if len(seeds) == 0:
        raise GraphError("k_neighborhood needs at least one seed")
    if k < 0:
        raise ValueError("k must be nonnegative")
    inside = np.zeros(g.n, dtype=bool)
    inside[seeds] = True
    for s in seeds:
        inside |= geodesic_distances(g, int(s), lengths) <= k
    return np.flatnonzero(inside)


def connected_components(g: Graph, restricted_to=None) -> list[np.ndarray]:
    """Components as sorted index arrays, ordered by their smallest node.

    With ``restricted_to`` the components of the induced subgraph on those
    nodes are returned (in original indices).
    """
    if restricted_to is None:
        nodes = np.arange(g.n)
        A = g.adjacency
    else:
        nodes = node_set(g, restricted_to)
        A = g.adjacency[nodes][:, nodes]
    if len(nodes) == 0:
        return []
    _, label = csgraph.connected_components(A, directed=False)
    comps: dict[int, list[int]] = {}
    for node, c in zip(nodes, label):
        comps.setdefault(int(c), []).append(int(node))
    return sorted((np.array(v, dtype=np.int64) for v in comps.values()), key=lambda a: a[0])


def largest_component(g: Graph) -> Graph:
    comps = connected_components(g)
    if len(comps) == 1:
        return g
    biggest = max(comps, key=len)  # first of equal size wins: lowest smallest-node
    return g.subgraph(biggest)
