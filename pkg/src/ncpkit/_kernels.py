"""Compiled inner loops.  Inputs are plain CSR arrays so the kernels stay
independent of the Python-level graph type."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def acl_push(indptr, indices, weights, strength, seed, alpha_tilde, eps):
    """Lazy-walk push from a single seed.

    Returns ``(p, r, pushes)``; on exit every node satisfies r_u < eps * d_u.
    Violating nodes are processed in FIFO order.
    """
    n = strength.shape[0]
    p = np.zeros(n)
    r = np.zeros(n)
    queue = np.empty(n + 1, dtype=np.int64)
    queued = np.zeros(n, dtype=np.bool_)
    head = 0
    tail = 0
    cap = n + 1
    r[seed] = 1.0
    if strength[seed] > 0 and r[seed] >= eps * strength[seed]:
        queue[tail] = seed
        tail = (tail + 1) % cap
        queued[seed] = True
    pushes = 0
    keep = (1.0 - alpha_tilde) / 2.0
    while head != tail:
        u = queue[head]
        head = (head + 1) % cap
        queued[u] = False
        ru = r[u]
        du = strength[u]
        p[u] += alpha_tilde * ru
        r[u] = keep * ru
        share = keep * ru / du
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            r[v] += share * weights[k]
            if not queued[v] and r[v] >= eps * strength[v]:
                queue[tail] = v
                tail = (tail + 1) % cap
                queued[v] = True
        if not queued[u] and r[u] >= eps * du:
            queue[tail] = u
            tail = (tail + 1) % cap
            queued[u] = True
        pushes += 1
    return p, r, pushes


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True, nogil=True)
def sweep_profile(indptr, indices, weights, strength, order, group_end):
    """Cut, volume and connectivity of every tie-group prefix of ``order``.

    Returns arrays ``(sizes, vols, cuts, connected)`` with one entry per
    position ``t`` where ``group_end[t]`` is true.
    """
    n = strength.shape[0]
    in_set = np.zeros(n, dtype=np.bool_)
    parent = np.arange(n)
    count = 0
    for t in range(order.shape[0]):
        if group_end[t]:
            count += 1
    sizes = np.empty(count, dtype=np.int64)
    vols = np.empty(count)
    cuts = np.empty(count)
    connected = np.empty(count, dtype=np.bool_)
    vol = 0.0
    cut = 0.0
    comps = 0
    k = 0
    for t in range(order.shape[0]):
        u = order[t]
        in_set[u] = True
        comps += 1
        inner = 0.0
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if in_set[v] and v != u:
                inner += weights[e]
                ru = _find(parent, u)
                rv = _find(parent, v)
                if ru != rv:
                    parent[rv] = ru
                    comps -= 1
        vol += strength[u]
        cut += strength[u] - 2.0 * inner
        if group_end[t]:
            sizes[k] = t + 1
            vols[k] = vol
            cuts[k] = cut
            connected[k] = comps == 1
            k += 1
    return sizes, vols, cuts, connected


@njit(cache=True)
def enumerate_bipartitions(W):
    """Exhaustive scan of all bipartitions of a small dense weighted graph.

    Walks subsets of the first k-1 nodes in Gray-code order (the last node is
    always on the complement side), so each bipartition is visited once.
    Returns ``(min_phi, min_cut)`` indexed by set size 0..k; both sides of
    each bipartition are credited.  Entries never reached stay ``inf``.
    """
    k = W.shape[0]
    deg = np.zeros(k)
    for i in range(k):
        for j in range(k):
            deg[i] += W[i, j]
    total = deg.sum()
    min_phi = np.full(k + 1, np.inf)
    min_cut = np.full(k + 1, np.inf)
    in_s = np.zeros(k, dtype=np.bool_)
    # attach[v] = total weight between v and the current set S
    attach = np.zeros(k)
    cut = 0.0
    vol = 0.0
    size = 0
    n_sub = 1 << (k - 1)
    for step in range(1, n_sub):
        # bit that flips between Gray codes step-1 and step
        b = 0
        x = step
        while (x & 1) == 0:
            x >>= 1
            b += 1
        if in_s[b]:
            in_s[b] = False
            size -= 1
            vol -= deg[b]
            cut -= deg[b] - 2.0 * attach[b]
            sign = -1.0
        else:
            in_s[b] = True
            size += 1
            vol += deg[b]
            cut += deg[b] - 2.0 * attach[b]
            sign = 1.0
        for j in range(k):
            attach[j] += sign * W[b, j]
        c = cut if cut > 0.0 else 0.0
        if c < min_cut[size]:
            min_cut[size] = c
        if c < min_cut[k - size]:
            min_cut[k - size] = c
        denom = min(vol, total - vol)
        if denom > 0.0:
            phi = c / denom
            if phi < min_phi[size]:
                min_phi[size] = phi
            if phi < min_phi[k - size]:
                min_phi[k - size] = phi
    return min_phi, min_cut
