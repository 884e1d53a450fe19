"""LFR benchmark graphs: power-law degrees and community sizes, mixing μ.

Every node gets ``round((1 - μ) k_i)`` stubs inside its community and the
rest outside; the two stub pools are matched uniformly at random and
self-loops / multi-edges are removed by random rewiring.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .graph import Graph, build_graph

log = logging.getLogger(__name__)


SIZE_REDRAWS = 200
REPAIR_STEPS_PER_NODE = 20


class InfeasibleError(ValueError):
    """Parameters (or a sampled instance) admit no valid LFR graph."""


@dataclass(frozen=True)
class LfrParams:
    n: int
    k_mean: float
    k_max: int
    mu: float
    c_min: int
    c_max: int
    tau1: float = -2.0
    tau2: float = -1.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise InfeasibleError("n must be at least 2")
        if not 0 <= self.mu <= 1:
            raise InfeasibleError(f"mu must lie in [0, 1], got {self.mu}")
        if self.c_min < 1 or self.c_max < self.c_min:
            raise InfeasibleError(f"need 1 <= c_min <= c_max, got [{self.c_min}, {self.c_max}]")
        if self.k_max < self.k_mean or self.k_mean < 1:
            raise InfeasibleError(f"need 1 <= k_mean <= k_max, got k_mean={self.k_mean}, k_max={self.k_max}")
        if self.c_min > self.n:
            raise InfeasibleError("c_min exceeds n")


PRESETS = {
    "fig17a": dict(k_mean=10, k_max=100, tau1=-2.0, tau2=-3.0, c_min=10, c_max=50),
    "fig17b": dict(k_mean=20, k_max=50, tau1=-2.0, tau2=-1.0, c_min=10, c_max=50),
    "fig17c": dict(k_mean=20, k_max=50, tau1=-2.0, tau2=-1.0, c_min=20, c_max=100),
}


def preset(name: str, *, n: int = 1000, mu: float = 0.1, rng_seed: int = 0) -> LfrParams:
    try:
        base = PRESETS[name]
    except KeyError:
        raise InfeasibleError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return LfrParams(n=n, mu=mu, rng_seed=rng_seed, **base)


@dataclass(frozen=True, eq=False)
class PlantedPartition:
    membership: np.ndarray
    communities: list
    discarded_edges: int = 0

    def write(self, path, g: Graph | None = None) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for i, c in enumerate(self.membership):
                fh.write(f"{g.label(i) if g is not None else i} {int(c)}\n")


def _quantiles(weights: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(weights)
    return np.searchsorted(cdf, u * cdf[-1], side="right").clip(max=len(weights) - 1)


def _cut_weights(base: np.ndarray, cutoff: float) -> np.ndarray:
    # mass below ``cutoff`` (relative to base[0]) removed, fractional at the edge
    w = base.copy()
    whole = int(math.floor(cutoff))
    w[:whole] = 0.0
    if whole < len(w):
        w[whole] *= 1.0 - (cutoff - whole)
    return w


def sample_power_law(exponent, lo, hi, count, target_mean=None, rng=None) -> np.ndarray:
    """Integers in [lo, hi] with P(x) ∝ x**exponent.

    With ``target_mean`` the lower cutoff is raised (continuously, by
    bisection on the realized sample mean with fixed uniforms) until the
    sample mean is within 2% of the target.
    """
    lo, hi = int(lo), int(hi)
    if lo < 1 or hi < lo:
        raise InfeasibleError(f"need 1 <= lo <= hi, got [{lo}, {hi}]")
    rng = rng if rng is not None else np.random.default_rng()
    values = np.arange(lo, hi + 1)
    base = values.astype(float) ** exponent
    u = rng.random(count)
    if target_mean is None:
        return values[_quantiles(base, u)]

    def draw(cutoff):
        return values[_quantiles(_cut_weights(base, cutoff), u)]

    tol = 0.02 * target_mean
    low_draw = draw(0.0)
    if low_draw.mean() >= target_mean - tol:
        if low_draw.mean() > target_mean + tol:
            raise InfeasibleError(f"target mean {target_mean} below attainable minimum {low_draw.mean():.4g}")
        return low_draw
    if hi < target_mean - tol:
        raise InfeasibleError(f"target mean {target_mean} above attainable maximum {hi}")
    a, b = 0.0, float(len(values) - 1)
    best = draw(b)
    for _ in range(100):
        mid = 0.5 * (a + b)
        x = draw(mid)
        if abs(x.mean() - target_mean) < abs(best.mean() - target_mean):
            best = x
        if abs(x.mean() - target_mean) <= tol / 4:
            break
        if x.mean() < target_mean:
            a = mid
        else:
            b = mid
    if abs(best.mean() - target_mean) > tol:
        raise InfeasibleError(f"could not reach mean {target_mean} (got {best.mean():.4g})")
    return best


def _community_sizes(p: LfrParams, rng) -> np.ndarray:
    batch = p.n // p.c_min + 1
    draws = sample_power_law(p.tau2, p.c_min, p.c_max, batch, rng=rng)
    total = np.cumsum(draws)
    sizes = list(draws[: int(np.searchsorted(total, p.n)) + 1])
    excess = sum(sizes) - p.n
    while excess > 0:
        shrinkable = [i for i, s in enumerate(sizes) if s > p.c_min]
        if not shrinkable:
            sizes.pop(int(rng.integers(len(sizes))))
            excess = sum(sizes) - p.n
            continue
        sizes[shrinkable[int(rng.integers(len(shrinkable)))]] -= 1
        excess -= 1
    while excess < 0:
        growable = [i for i, s in enumerate(sizes) if s < p.c_max]
        if not growable:
            raise InfeasibleError("community sizes cannot be made to sum to n")
        sizes[growable[int(rng.integers(len(growable)))]] += 1
        excess += 1
    return np.array(sizes, dtype=np.int64)


def _assign(intra: np.ndarray, sizes: np.ndarray, rng, attempts: int = 10) -> np.ndarray:
    """Uniform slot assignment subject to size >= intra-degree + 1.

    Nodes are placed in order of decreasing intra-degree, each into a random
    free slot of a community large enough for it.
    """
    order = np.argsort(-intra, kind="stable")
    for _ in range(attempts):
        free = sizes.copy()
        membership = np.full(len(intra), -1, dtype=np.int64)
        for i in order:
            ok = (sizes >= intra[i] + 1) & (free > 0)
            if not ok.any():
                break
            w = np.where(ok, free, 0).astype(float)
            c = int(_quantiles(w, rng.random(1))[0])
            membership[i] = c
            free[c] -= 1
        else:
            return membership
    need = int(intra.max())
    raise InfeasibleError(
        f"no community has room for a node needing {need} internal neighbours "
        f"(largest community {int(sizes.max())}) after {attempts} attempts"
    )


def _shortfall(deg: np.ndarray) -> int:
    """Stubs the greedy construction cannot place (0 iff graphical up to parity)."""
    d = np.sort(deg)[::-1].copy()
    missing = 0
    while len(d) and d[0] > 0:
        r, d = d[0], d[1:]
        take = min(r, int(np.count_nonzero(d)))
        d[:take] -= 1
        missing += r - take
        d = -np.sort(-d)
    return int(missing)


def _repair(intra, exact, membership, sizes, rng, steps):
    """Swap nodes between communities until each intra-degree sequence is
    realizable (or ``steps`` proposals are spent)."""
    def shortfall(m):
        return _shortfall(_round_community(exact[m], len(m) - 1))

    members = [list(np.flatnonzero(membership == c)) for c in range(len(sizes))]
    short = np.array([shortfall(m) for m in members])
    for _ in range(steps):
        bad = np.flatnonzero(short)
        if not len(bad):
            break
        c = int(bad[rng.integers(len(bad))])
        mc = members[c]
        w = intra[mc].astype(float) + 1e-9
        h = mc[int(_quantiles(w, rng.random(1))[0])]
        x = int(rng.integers(len(intra)))
        d = int(membership[x])
        if d == c or intra[x] >= intra[h] or sizes[d] < intra[h] + 1:
            continue
        new_c = [v for v in mc if v != h] + [x]
        new_d = [v for v in members[d] if v != x] + [h]
        sc, sd = shortfall(new_c), shortfall(new_d)
        if sc + sd < short[c] + short[d]:
            members[c], members[d] = new_c, new_d
            short[c], short[d] = sc, sd
            membership[h], membership[x] = d, c
    return membership


def _round_community(exact: np.ndarray, cap: int) -> np.ndarray:
    """Round each entry down or up so the total is the even integer nearest
    to ``exact.sum()``; the entries with the largest fractional parts go up
    (earlier entries first on ties).
    """
    lo = np.floor(exact).astype(np.int64)
    up_ok = (exact > lo) & (lo + 1 <= cap)
    total = exact.sum()
    target = 2 * int(round(total / 2))
    extra = int(np.clip(target - lo.sum(), 0, up_ok.sum()))
    if (lo.sum() + extra) % 2:
        extra += 1 if extra < up_ok.sum() else -1
    out = lo.copy()
    if extra > 0:
        frac = np.where(up_ok, exact - lo, -1.0)
        order = np.argsort(-frac, kind="stable")
        out[order[:extra]] += 1
    if extra < 0 or out.sum() % 2:
        # no rounding choice gives an even total: drop one stub somewhere
        out[int(np.argmax(out))] -= 1
    return out


def _key(u, v):
    return (u, v) if u < v else (v, u)


def _wire(stubs: np.ndarray, rng, group: np.ndarray | None, max_tries: int):
    """Random matching of ``stubs`` into a simple edge set.

    With ``group`` given, edges inside one group are also invalid.  Returns
    ``(edges, bad)``: the valid edges and the invalid ones left after
    ``max_tries`` rewiring attempts.
    """
    stubs = rng.permutation(stubs)
    pairs = [(int(stubs[2 * k]), int(stubs[2 * k + 1])) for k in range(len(stubs) // 2)]
    counts: dict[tuple, int] = {}
    for u, v in pairs:
        counts[_key(u, v)] = counts.get(_key(u, v), 0) + 1

    def valid(u, v):
        return u != v and (group is None or group[u] != group[v])

    def is_bad(k):
        u, v = pairs[k]
        return not valid(u, v) or counts[_key(u, v)] > 1

    bad = [k for k in range(len(pairs)) if is_bad(k)]
    tries = 0
    while bad and tries < max_tries:
        tries += 1
        pick = int(rng.integers(len(bad)))
        i = bad[pick]
        if not is_bad(i):
            bad[pick] = bad[-1]
            bad.pop()
            continue
        j = int(rng.integers(len(pairs)))
        if i == j:
            continue
        (u, v), (x, y) = pairs[i], pairs[j]
        if rng.random() < 0.5:
            x, y = y, x
        a, b = (u, x), (v, y)
        if not (valid(*a) and valid(*b)):
            continue
        ka, kb = _key(*a), _key(*b)
        if ka == kb or counts.get(ka, 0) or counts.get(kb, 0):
            continue
        for old in (pairs[i], pairs[j]):
            ko = _key(*old)
            counts[ko] -= 1
            if counts[ko] == 0:
                del counts[ko]
        pairs[i], pairs[j] = a, b
        counts[ka] = 1
        counts[kb] = 1
    kept, seen, leftover = [], set(), []
    for u, v in pairs:
        key = _key(u, v)
        if valid(u, v) and key not in seen:
            kept.append((u, v))
            seen.add(key)
        else:
            leftover.append((u, v))
    return kept, leftover


def _is_graphical(deg: np.ndarray) -> bool:
    """Erdős–Gallai test."""
    d = np.sort(deg)[::-1].astype(np.int64)
    if d.sum() % 2:
        return False
    n = len(d)
    prefix = np.cumsum(d)
    for k in range(1, n + 1):
        if prefix[k - 1] > k * (k - 1) + np.minimum(d[k:], k).sum():
            return False
    return True


def _havel_hakimi(nodes: np.ndarray, deg: np.ndarray):
    """Greedy realization; returns ``(edges, unmet)`` with unmet stubs per node."""
    residual = dict(zip(nodes.tolist(), deg.tolist()))
    unmet, edges = {}, []
    while True:
        live = sorted((r, v) for v, r in residual.items() if r > 0)
        if not live:
            break
        r, v = live.pop()
        partners = [u for _, u in reversed(live)][:r]
        for u in partners:
            edges.append((v, u))
            residual[u] -= 1
        del residual[v]
        if r > len(partners):
            unmet[v] = r - len(partners)
    return edges, unmet


def _shuffle_edges(edges, rng, swaps: int):
    """Degree-preserving double-edge swaps on a simple graph."""
    edges = list(edges)
    present = {_key(u, v) for u, v in edges}
    if len(edges) < 2:
        return edges
    for _ in range(swaps):
        i, j = rng.integers(len(edges), size=2)
        if i == j:
            continue
        (a, b), (c, d) = edges[i], edges[j]
        if rng.random() < 0.5:
            c, d = d, c
        if a == d or c == b or _key(a, d) in present or _key(c, b) in present:
            continue
        present -= {_key(a, b), _key(c, d)}
        present |= {_key(a, d), _key(c, b)}
        edges[i], edges[j] = (a, d), (c, b)
    return edges


def _wire_community(members, intra, rng):
    """Simple graph on ``members`` with the given intra-degrees.

    Non-graphical sequences are realized as closely as the greedy
    construction allows; the second return value maps nodes to stubs that
    could not be placed.
    """
    deg = intra[members]
    if not _is_graphical(deg):
        edges, unmet = _havel_hakimi(members, deg)
        return _shuffle_edges(edges, rng, 10 * len(edges)), unmet
    stubs = np.repeat(members, deg)
    edges, bad = _wire(stubs, rng, None, 100 * max(1, len(stubs) // 2))
    if bad:
        edges, _ = _havel_hakimi(members, deg)
        edges = _shuffle_edges(edges, rng, 10 * len(edges))
    return edges, {}


def _wire_with_retry(stubs, rng, group):
    max_tries = 100 * max(1, len(stubs) // 2)
    edges, bad = _wire(stubs, rng, group, max_tries)
    if bad:
        edges, bad = _wire(stubs, rng, group, max_tries)
    return edges, bad


def generate_lfr(p: LfrParams, *, clamp_degrees: bool = True) -> tuple[Graph, PlantedPartition]:
    """Sample one LFR graph and its planted partition.

    A node of degree k needs a community of at least (1 - μ)k + 1 nodes.  If
    ``k_max`` violates this for ``c_max``, degrees are capped at the largest
    feasible value (with a warning) unless ``clamp_degrees`` is false, in
    which case the parameters are rejected.  Community sizes are redrawn
    until the largest one can host the highest-degree node.
    """
    rng = np.random.default_rng(p.rng_seed)
    k_cap = p.k_max
    if p.mu < 1:
        feasible = int(math.floor((p.c_max - 1) / (1 - p.mu) + 1e-9))
        if feasible < p.k_max:
            if not clamp_degrees:
                raise InfeasibleError(
                    f"(1 - mu) * k_max = {(1 - p.mu) * p.k_max:.4g} exceeds c_max - 1 = {p.c_max - 1}"
                )
            warnings.warn(f"k_max {p.k_max} capped to {feasible} so every node fits a community", stacklevel=2)
            k_cap = feasible
    if k_cap < p.k_mean:
        raise InfeasibleError(f"mean degree {p.k_mean} exceeds feasible maximum degree {k_cap}")

    degrees = sample_power_law(p.tau1, 1, k_cap, p.n, target_mean=p.k_mean, rng=rng)
    if degrees.sum() % 2:
        i = int(rng.integers(p.n))
        degrees[i] += 1 if degrees[i] < k_cap else -1
    intra = np.rint((1.0 - p.mu) * degrees).astype(np.int64)
    for _ in range(SIZE_REDRAWS):
        sizes = _community_sizes(p, rng)
        if sizes.max() >= intra.max() + 1:
            break
    else:
        raise InfeasibleError(
            f"no community-size draw reached {int(intra.max()) + 1} nodes in {SIZE_REDRAWS} tries"
        )
    membership = _assign(intra, sizes, rng)
    exact = (1.0 - p.mu) * degrees
    membership = _repair(intra, exact, membership, sizes, rng, REPAIR_STEPS_PER_NODE * p.n)
    communities = [np.flatnonzero(membership == c) for c in range(len(sizes))]

    for members in communities:
        intra[members] = _round_community(exact[members], len(members) - 1)

    edges, moved = [], 0
    for members in communities:
        e, unmet = _wire_community(members, intra, rng)
        edges += e
        for v, r in unmet.items():
            intra[v] -= r
            moved += r
    if p.mu == 0:
        # no outside stubs allowed: parity and unmet stubs cost degree instead
        degrees = intra.copy()
    inter = degrees - intra
    if inter.sum() % 2:
        # unmet intra stubs can leave the outside pool odd
        candidates = np.flatnonzero(inter > 0)
        inter[candidates[rng.integers(len(candidates))]] -= 1
    e, bad = _wire_with_retry(np.repeat(np.arange(p.n), inter), rng, membership)
    edges += e
    if moved:
        log.info("LFR: %d internal stubs could not be realized and were %s", moved,
                 "dropped" if p.mu == 0 else "wired outside")
    if bad:
        log.warning("LFR wiring discarded %d edges that could not be rewired", len(bad))
    g = build_graph(edges, nodes=range(p.n))
    return g, PlantedPartition(membership, communities, len(bad))


def lfr_ncp_sweep(base: LfrParams, mus, budget=None, methods=("aclcut",), threads: int = 1) -> dict:
    """One generated graph and one global NCP per mixing value."""
    from .ncp import global_ncp

    curves = {}
    for i, mu in enumerate(mus):
        seed = int(np.random.SeedSequence([base.rng_seed, i]).generate_state(1)[0])
        g, _ = generate_lfr(replace(base, mu=float(mu), rng_seed=seed))
        curves[float(mu)] = global_ncp(g, methods, budget, threads=threads)
    return curves
