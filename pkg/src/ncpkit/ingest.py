"""Multilayer (temporal) networks from roll-call votes, plus partition files.

A vote CSV has a header row with ``actor_id``, ``layer`` and one column per
bill; each row is one actor in one layer.  Vote cells are ``1``/``Y``/``yea``
(yes), ``-1``/``N``/``nay`` (no) or ``0``/empty/``NA`` (did not vote).
"""
from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import Graph, GraphError, build_graph

YES = frozenset({"1", "+1", "y", "yea", "yes"})
NO = frozenset({"-1", "n", "nay", "no"})
ABSENT = frozenset({"0", "", "na", "nan"})


@dataclass(frozen=True)
class Layer:
    """Weighted edges among the actors of one layer (edges may be empty)."""

    actors: tuple
    edges: tuple = ()

    def __post_init__(self):
        actors = tuple(self.actors)
        dup = [a for a, c in Counter(actors).items() if c > 1]
        if dup:
            raise GraphError(f"actor {dup[0]!r} appears twice in one layer")
        known = set(actors)
        for e in self.edges:
            if e[0] not in known or e[1] not in known:
                raise GraphError(f"edge {e!r} references an actor outside the layer")
        object.__setattr__(self, "actors", actors)
        object.__setattr__(self, "edges", tuple(self.edges))


@dataclass(frozen=True)
class MultilayerSpec:
    layers: tuple
    omega: float = 1.0
    names: tuple = field(default=())

    def __post_init__(self):
        if self.omega < 0:
            raise GraphError("omega must be nonnegative")
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.names:
            object.__setattr__(self, "names", tuple(range(len(self.layers))))
        elif len(self.names) != len(self.layers):
            raise GraphError("one name per layer required")

    def node_index(self) -> list[tuple]:
        """``(layer name, actor)`` for every supra-graph node, in node order."""
        return [(name, a) for name, layer in zip(self.names, self.layers) for a in layer.actors]


def build_supra(spec: MultilayerSpec) -> Graph:
    """Block-diagonal union of the layers plus weight-ω edges joining each
    actor to itself in the next layer.

    Nodes are numbered ``0..N-1`` layer by layer; see
    :meth:`MultilayerSpec.node_index` for what each number stands for.
    """
    offsets = np.concatenate([[0], np.cumsum([len(l.actors) for l in spec.layers])]).astype(int)
    index = [{a: int(offsets[s]) + k for k, a in enumerate(l.actors)} for s, l in enumerate(spec.layers)]
    edges = []
    for s, layer in enumerate(spec.layers):
        for e in layer.edges:
            w = e[2] if len(e) == 3 else 1.0
            edges.append((index[s][e[0]], index[s][e[1]], w))
        if spec.omega > 0 and s + 1 < len(spec.layers):
            nxt = index[s + 1]
            edges.extend((i, nxt[a], spec.omega) for a, i in index[s].items() if a in nxt)
    if not edges:
        raise GraphError("supra-graph has no edges")
    return build_graph(edges, nodes=range(int(offsets[-1])))


def parse_vote(token: str, row: int, col: int) -> float:
    t = token.strip().lower()
    if t in YES:
        return 1.0
    if t in NO:
        return -1.0
    if t in ABSENT:
        return 0.0
    raise GraphError(f"row {row}, column {col}: unrecognized vote code {token!r}")


def vote_similarity_layer(votes, actors=None) -> Layer:
    """Agreement graph: weight = shared identical votes / bills both voted on.

    ``votes`` is an (actors x bills) array with +1, -1 and 0 (absent).
    Pairs without a shared bill, or without any agreement, get no edge.
    """
    V = np.asarray(votes, dtype=float)
    if V.ndim != 2:
        raise GraphError("votes must be a 2-d array")
    bad = ~np.isin(V, (-1.0, 0.0, 1.0))
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise GraphError(f"row {r}, column {c}: vote value {V[r, c]!r} is not -1, 0 or 1")
    actors = tuple(range(len(V))) if actors is None else tuple(actors)
    if len(actors) != len(V):
        raise GraphError("one actor id per vote row required")
    yes = (V == 1).astype(float)
    no = (V == -1).astype(float)
    present = yes + no
    agree = yes @ yes.T + no @ no.T
    shared = present @ present.T
    iu, ju = np.triu_indices(len(V), k=1)
    keep = (shared[iu, ju] > 0) & (agree[iu, ju] > 0)
    edges = [(actors[i], actors[j], agree[i, j] / shared[i, j]) for i, j in zip(iu[keep], ju[keep])]
    return Layer(actors, edges)


def _layer_order(keys: list) -> list:
    def as_number(k):
        try:
            return float(k)
        except ValueError:
            return None

    nums = [as_number(k) for k in keys]
    if all(x is not None for x in nums):
        return [k for _, k in sorted(zip(nums, keys))]
    return keys


def read_vote_csv(path: str | Path, omega: float = 1.0) -> MultilayerSpec:
    """Parse a vote CSV into one similarity layer per distinct ``layer`` value.

    Layers are ordered numerically when every layer key is a number, else in
    order of first appearance.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise GraphError(f"{path}: empty vote file") from None
        for col in ("actor_id", "layer"):
            if col not in header:
                raise GraphError(f"{path}: missing column {col!r}")
        ai, li = header.index("actor_id"), header.index("layer")
        bill_cols = [c for c in range(len(header)) if c not in (ai, li)]
        rows: dict[str, tuple[list, list]] = {}
        for lineno, row in enumerate(reader, 2):
            if not row or all(not x.strip() for x in row):
                continue
            if len(row) != len(header):
                raise GraphError(f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}")
            actors, votes = rows.setdefault(row[li].strip(), ([], []))
            actor = row[ai].strip()
            if actor in actors:
                raise GraphError(f"{path}: row {lineno}: actor {actor!r} repeated in layer {row[li].strip()!r}")
            actors.append(actor)
            votes.append([parse_vote(row[c], lineno, c + 1) for c in bill_cols])
    if not rows:
        raise GraphError(f"{path}: no vote rows")
    names = _layer_order(list(rows))
    layers = []
    for name in names:
        actors, votes = rows[name]
        layers.append(vote_similarity_layer(np.array(votes).reshape(len(actors), len(bill_cols)), actors))
    return MultilayerSpec(tuple(layers), omega, tuple(names))


def write_node_index(spec: MultilayerSpec, path: str | Path) -> None:
    """``node layer actor`` per supra-graph node."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, (name, actor) in enumerate(spec.node_index()):
            fh.write(f"{i} {name} {actor}\n")


def read_partition(path: str | Path, g: Graph) -> np.ndarray:
    """Community id per node from ``node community`` lines.

    Every node of ``g`` must be listed exactly once.
    """
    membership = np.full(g.n, -1, dtype=np.int64)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphError(f"{path}:{lineno}: expected 'node community'")
            tok = parts[0]
            try:
                label = int(tok)
            except ValueError:
                label = tok
            try:
                c = int(parts[1])
            except ValueError:
                raise GraphError(f"{path}:{lineno}: community id must be an integer") from None
            i = g.index_of(label)
            if membership[i] != -1:
                raise GraphError(f"{path}:{lineno}: node {label!r} listed twice")
            membership[i] = c
    if (membership == -1).any():
        raise GraphError(f"{path}: {int((membership == -1).sum())} nodes have no community")
    return membership
