"""Sweep cuts, local and global network community profiles, and CRPs."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._kernels import sweep_profile
from .aclcut import DEFAULT_ALPHA_TILDE, PushParams, epsilon_grid, push_approx_ppr
from .egonet import egorank
from .graph import Graph, GraphError, node_set
from .movcut import MovParams, gamma_grid, movcut_rank
from .quality import internal_conductance, lambda2, ratio
from .ranking import RankVector

log = logging.getLogger(__name__)

METHODS = ("aclcut", "movcut", "egonet")


@dataclass(eq=False)
class SweepResult:
    """Conductance of the sweep sets of one ranking.

    ``ordered_nodes`` is the support sorted by descending score (ties by node
    index) and ``prefix_sizes`` the sizes of every sweep set; equal scores
    always enter together.  ``sizes``/``volumes``/``conductances`` hold the
    curve after filtering: sets with undefined conductance, disconnected sets
    (with ``connected_filtered``) and sets over ``volume_cap`` are dropped.
    """

    ordered_nodes: np.ndarray
    prefix_sizes: np.ndarray
    prefix_volumes: np.ndarray
    prefix_conductances: np.ndarray
    prefix_connected: np.ndarray
    keep: np.ndarray
    connected_filtered: bool = False
    volume_cap: float | None = None

    @property
    def sizes(self) -> np.ndarray:
        return self.prefix_sizes[self.keep]

    @property
    def volumes(self) -> np.ndarray:
        return self.prefix_volumes[self.keep]

    @property
    def conductances(self) -> np.ndarray:
        return self.prefix_conductances[self.keep]

    @property
    def curve(self) -> list[tuple[int, float, float]]:
        return list(zip(self.sizes.tolist(), self.volumes.tolist(), self.conductances.tolist()))

    @property
    def unfiltered_keep(self) -> np.ndarray:
        """Like ``keep`` but admitting disconnected sets."""
        keep = ~np.isnan(self.prefix_conductances)
        if self.volume_cap is not None:
            keep &= self.prefix_volumes <= self.volume_cap
        return keep

    def sweep_sets(self) -> list[np.ndarray]:
        """Every sweep set S_t, unfiltered, as sorted node arrays."""
        return [np.sort(self.ordered_nodes[:k]) for k in self.prefix_sizes]

    def _best_index(self) -> int | None:
        cond = self.conductances
        return int(np.argmin(cond)) if len(cond) else None

    @property
    def best(self) -> np.ndarray:
        i = self._best_index()
        if i is None:
            return np.empty(0, dtype=np.int64)
        return np.sort(self.ordered_nodes[: self.sizes[i]])

    @property
    def best_conductance(self) -> float:
        i = self._best_index()
        return math.inf if i is None else float(self.conductances[i])


def sweep(
    g: Graph,
    rank: RankVector,
    *,
    connected_only: bool = False,
    volume_cap: float | None = None,
    degree_normalized: bool = False,
) -> SweepResult:
    if volume_cap is None:
        volume_cap = rank.params.get("volume_cap")
    support = np.asarray(rank.support, dtype=np.int64)
    if degree_normalized:
        support = support[g.strength[support] > 0]
    if len(support) == 0:
        empty = np.empty(0)
        return SweepResult(
            np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64), empty, empty,
            np.empty(0, dtype=bool), np.empty(0, dtype=bool), connected_only, volume_cap,
        )
    scores = rank.scores[support]
    if degree_normalized:
        scores = scores / g.strength[support]
    perm = np.lexsort((support, -scores))
    order = support[perm]
    ranked = scores[perm]
    group_end = np.ones(len(order), dtype=bool)
    group_end[:-1] = ranked[:-1] != ranked[1:]
    sizes, vols, cuts, connected = sweep_profile(g.indptr, g.indices, g.weights, g.strength, order, group_end)
    denom = np.minimum(vols, g.total_volume - vols)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(denom > 0, np.maximum(cuts, 0.0) / denom, np.nan)
    keep = ~np.isnan(cond)
    if connected_only:
        keep &= connected
    if volume_cap is not None:
        keep &= vols <= volume_cap
    return SweepResult(order, sizes, vols, cond, connected, keep, connected_only, volume_cap)


@dataclass(eq=False)
class NcpCurve:
    """Lower envelope of conductance by community size (1..n//2).

    Only the current best community per size is kept, as a reference to
    the ordering that produced it.
    """

    graph: Graph
    conductance: np.ndarray
    witnesses: list = field(repr=False)
    provenance: list = field(repr=False)
    runs: int = 0
    skipped: int = 0
    unfiltered: NcpCurve | None = field(default=None, repr=False)

    @classmethod
    def empty(cls, g: Graph) -> NcpCurve:
        kmax = g.n // 2
        return cls(g, np.full(kmax + 1, math.inf), [None] * (kmax + 1), [None] * (kmax + 1))

    @property
    def max_size(self) -> int:
        return len(self.conductance) - 1

    def sizes(self) -> np.ndarray:
        """Sizes for which some community was found."""
        return np.flatnonzero(np.isfinite(self.conductance))

    def witness(self, k: int) -> np.ndarray | None:
        ref = self.witnesses[k]
        if ref is None:
            return None
        order, size = ref
        return np.sort(order[:size])

    def add(self, result: SweepResult, rank: RankVector, *, filtered: bool = True) -> None:
        if filtered:
            sizes, cond = result.sizes, result.conductances
        else:
            keep = result.unfiltered_keep
            sizes, cond = result.prefix_sizes[keep], result.prefix_conductances[keep]
        sel = sizes <= self.max_size
        sizes, cond = sizes[sel], cond[sel]
        better = np.flatnonzero(cond < self.conductance[sizes])
        if len(better):
            tag = (rank.method, rank.seed, rank.param_value())
            for i in better:
                k = int(sizes[i])
                self.conductance[k] = cond[i]
                self.witnesses[k] = (result.ordered_nodes, k)
                self.provenance[k] = tag
        self.runs += 1

    def merge(self, other: NcpCurve) -> NcpCurve:
        """Pointwise minimum; on ties the receiver's witness is kept."""
        out = NcpCurve(self.graph, self.conductance.copy(), list(self.witnesses), list(self.provenance),
                       self.runs + other.runs, self.skipped + other.skipped)
        better = np.flatnonzero(other.conductance < out.conductance)
        for k in better:
            out.conductance[k] = other.conductance[k]
            out.witnesses[k] = other.witnesses[k]
            out.provenance[k] = other.provenance[k]
        if self.unfiltered is not None and other.unfiltered is not None:
            out.unfiltered = self.unfiltered.merge(other.unfiltered)
        return out

    def rows(self, with_internal: bool = True, mode: str = "auto") -> list[dict]:
        rows = []
        for k in self.sizes():
            phi = float(self.conductance[k])
            if with_internal:
                phi_in = internal_conductance(self.graph, self.witness(k), mode)
                rho = ratio(phi, phi_in)
            else:
                phi_in = rho = math.nan
            method, seed, param = self.provenance[k]
            rows.append(
                {"size": int(k), "conductance": phi, "internal_conductance": phi_in, "ratio": rho,
                 "method": method, "seed": self.graph.label(seed), "param": param}
            )
        return rows


def crp(ncp: NcpCurve, mode: str = "auto") -> list[tuple[int, float]]:
    """Conductance ratio of each witness; sizes whose ratio is undefined are skipped."""
    out = []
    for row in ncp.rows(with_internal=True, mode=mode):
        if not math.isnan(row["ratio"]):
            out.append((row["size"], row["ratio"]))
    return out


NCP_COLUMNS = ("size", "conductance", "internal_conductance", "ratio", "method", "seed", "param")


def format_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{float(x):.12g}"
    return str(x)


def write_csv(path, columns, rows) -> int:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(format_value(row[c]) for c in columns) + "\n")
    return len(rows)


# -- sampling ---------------------------------------------------------------


@dataclass(frozen=True)
class CoverageBudget:
    """Stopping rule and parameter grids for global NCP sampling.

    Seeds are drawn without replacement, independently for each parameter
    value, until every node has been in at least ``min_coverage`` best
    communities or every node has been used (or ``max_seeds`` is reached).
    ``min_coverage=math.inf`` uses every node.
    """

    min_coverage: float = 10
    max_seeds: int | None = None
    rng_seed: int = 0
    eps_count: int = 20
    alpha_count: int = 20
    alpha_tilde: float = DEFAULT_ALPHA_TILDE
    epsilons: tuple | None = None
    gammas: tuple | None = None
    egonet_all_seeds: bool = True


@dataclass
class _Runner:
    g: Graph
    method: str
    param: float | None
    alpha_tilde: float = DEFAULT_ALPHA_TILDE
    lam2: float | None = None
    lengths: str = "inverse_weight"
    volume_cap: float | None = None

    def rank(self, seed: int) -> RankVector:
        if self.method == "aclcut":
            return push_approx_ppr(self.g, PushParams(epsilon=self.param, seed=seed, alpha_tilde=self.alpha_tilde))
        if self.method == "movcut":
            return movcut_rank(self.g, MovParams(seed=seed, gamma=self.param, volume_cap=self.volume_cap),
                               lam2=self.lam2)
        if self.method == "egonet":
            return egorank(self.g, seed, self.lengths)
        raise ValueError(f"unknown method {self.method!r}")


def _param_grid(g: Graph, method: str, budget: CoverageBudget, lam2: float | None) -> list:
    if method == "aclcut":
        return list(budget.epsilons) if budget.epsilons is not None else list(epsilon_grid(g, budget.eps_count))
    if method == "movcut":
        return list(budget.gammas) if budget.gammas is not None else list(gamma_grid(g, budget.alpha_count, lam2=lam2))
    if method == "egonet":
        return [None]
    raise ValueError(f"unknown method {method!r}")


def _run_one(runner: _Runner, seed: int, sweep_kw: dict):
    try:
        rank = runner.rank(seed)
    except GraphError as exc:
        # near γ = λ₂ the solve can fail; the run is dropped, not the sampling
        log.debug("skipping %s seed=%d param=%s: %s", runner.method, seed, runner.param, exc)
        return None
    return rank, sweep(runner.g, rank, **sweep_kw)


def _sample_parameter(g, runner, seeds, budget, sweep_kw, curve, raw, pool, threads, exhaustive):
    coverage = np.zeros(g.n)
    limit = len(seeds) if budget.max_seeds is None else min(len(seeds), budget.max_seeds)
    pos = 0
    while pos < limit:
        batch = seeds[pos: pos + (threads if pool else 1)]
        batch = batch[: limit - pos]
        if pool is not None and len(batch) > 1:
            results = list(pool.map(lambda s: _run_one(runner, int(s), sweep_kw), batch))
        else:
            results = [_run_one(runner, int(s), sweep_kw) for s in batch]
        for out in results:
            pos += 1
            if out is None:
                curve.skipped += 1
                continue
            rank, res = out
            curve.add(res, rank)
            if raw is not None:
                raw.add(res, rank, filtered=False)
            best = res.best
            if len(best):
                coverage[best] += 1
            if not exhaustive and coverage.min() >= budget.min_coverage:
                return


def global_ncp(
    g: Graph,
    methods=("aclcut",),
    budget: CoverageBudget | None = None,
    *,
    connected_only: bool = True,
    collect_unfiltered: bool = False,
    degree_normalized: bool = False,
    volume_cap: float | None = None,
    lengths: str = "inverse_weight",
    threads: int = 1,
) -> NcpCurve:
    """Envelope of local NCPs over sampled seeds and each method's parameter grid.

    With ``collect_unfiltered`` the envelope that also admits disconnected
    sweep sets is attached as ``curve.unfiltered``.  Results do not depend on
    ``threads``.
    """
    budget = budget or CoverageBudget()
    if isinstance(methods, str):
        methods = (methods,)
    curve = NcpCurve.empty(g)
    raw = NcpCurve.empty(g) if collect_unfiltered else None
    sweep_kw = {"connected_only": connected_only, "volume_cap": volume_cap, "degree_normalized": degree_normalized}
    lam2 = lambda2(g) if "movcut" in methods else None
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for mi, method in enumerate(methods):
            if method not in METHODS:
                raise ValueError(f"unknown method {method!r}")
            for pi, param in enumerate(_param_grid(g, method, budget, lam2)):
                rng = np.random.default_rng([budget.rng_seed, mi, pi])
                seeds = rng.permutation(g.n)
                runner = _Runner(g, method, param, budget.alpha_tilde, lam2, lengths, volume_cap)
                exhaustive = math.isinf(budget.min_coverage) or (method == "egonet" and budget.egonet_all_seeds)
                _sample_parameter(g, runner, seeds, budget, sweep_kw, curve, raw, pool, threads, exhaustive)
    finally:
        if pool is not None:
            pool.shutdown()
    curve.unfiltered = raw
    return curve


def local_ncp(
    g: Graph,
    method: str,
    seed: int,
    param_grid=None,
    *,
    connected_only: bool = False,
    degree_normalized: bool = False,
    volume_cap: float | None = None,
    lengths: str = "inverse_weight",
    alpha_tilde: float = DEFAULT_ALPHA_TILDE,
) -> NcpCurve:
    """Envelope over all sweep sets of one seed across a parameter grid."""
    node_set(g, [seed])
    lam2 = lambda2(g) if method == "movcut" else None
    if param_grid is None:
        param_grid = _param_grid(g, method, CoverageBudget(alpha_tilde=alpha_tilde), lam2)
    curve = NcpCurve.empty(g)
    sweep_kw = {"connected_only": connected_only, "volume_cap": volume_cap, "degree_normalized": degree_normalized}
    for param in param_grid:
        runner = _Runner(g, method, param, alpha_tilde, lam2, lengths, volume_cap)
        out = _run_one(runner, seed, sweep_kw)
        if out is None:
            curve.skipped += 1
            continue
        curve.add(out[1], out[0])
    return curve
