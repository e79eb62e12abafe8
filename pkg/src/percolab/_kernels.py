"""Numba kernels for the hot loops: union-find sweeps, batched sampling, BFS.

Everything here operates on flat int64/float64 arrays so the jitted code
stays nopython and nogil; callers own all allocations that persist across
trials.  Second-largest tracking keeps a size-multiset in `cnt` and repairs
L2 with an amortized O(1) case split (the rare downward scan is paid for by
the growth of L1).
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
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
def sweep_trial(n, eu, ev, order, thresholds,
                l1_traj, l2_traj, cnt_traj, two_traj,
                parent, size, cnt):
    """One microcanonical sweep: add edges in `order`, record stats per m.

    Trajectories have length m+1 (row 0 = empty configuration).  cnt_traj and
    two_traj are (k, m+1): per threshold, the count of components at least
    that size and the 0/1 indicator that the count is >= 2.
    """
    for i in range(n):
        parent[i] = i
        size[i] = 1
    for i in range(n + 1):
        cnt[i] = 0
    cnt[1] = n
    k = thresholds.shape[0]
    cge = np.zeros(k, np.int64)
    for j in range(k):
        if thresholds[j] <= 1:
            cge[j] = n
    l1 = 1
    l2 = 1 if n >= 2 else 0
    l1_traj[0] = l1
    l2_traj[0] = l2
    for j in range(k):
        cnt_traj[j, 0] = cge[j]
        two_traj[j, 0] = 1.0 if cge[j] >= 2 else 0.0
    m = order.shape[0]
    for step in range(m):
        e = order[step]
        ra = _find(parent, eu[e])
        rb = _find(parent, ev[e])
        if ra != rb:
            sa = size[ra]
            sb = size[rb]
            if sa < sb:
                ra, rb = rb, ra
                sa, sb = sb, sa
            parent[rb] = ra
            sc = sa + sb
            size[ra] = sc
            cnt[sa] -= 1
            cnt[sb] -= 1
            cnt[sc] += 1
            for j in range(k):
                t = thresholds[j]
                if sc >= t:
                    if sa >= t:
                        if sb >= t:
                            cge[j] -= 1
                    elif sb < t:
                        cge[j] += 1
            if sc > l1:
                old_l1 = l1
                l1 = sc
                if cnt[old_l1] >= 1:
                    l2 = old_l1
                elif cnt[l2] == 0:
                    s = l2 - 1
                    while s >= 1 and cnt[s] == 0:
                        s -= 1
                    l2 = s if s >= 1 else 0
                # else: previous second largest survives
            elif sc > l2:
                l2 = sc
        l1_traj[step + 1] = l1
        l2_traj[step + 1] = l2
        for j in range(k):
            cnt_traj[j, step + 1] = cge[j]
            two_traj[j, step + 1] = 1.0 if cge[j] >= 2 else 0.0


@njit(cache=True, nogil=True)
def batch_cluster_stats(n, eu, ev, open_mat, thresholds, l1_out, l2_out, cge_out):
    """Component statistics for a batch of open-edge indicator rows."""
    trials = open_mat.shape[0]
    m = eu.shape[0]
    k = thresholds.shape[0]
    parent = np.empty(n, np.int64)
    size = np.empty(n, np.int64)
    for t in range(trials):
        for i in range(n):
            parent[i] = i
            size[i] = 1
        for e in range(m):
            if open_mat[t, e]:
                ra = _find(parent, eu[e])
                rb = _find(parent, ev[e])
                if ra != rb:
                    if size[ra] < size[rb]:
                        ra, rb = rb, ra
                    parent[rb] = ra
                    size[ra] += size[rb]
        l1 = 0
        l2 = 0
        for j in range(k):
            cge_out[t, j] = 0
        for v in range(n):
            if _find(parent, v) == v:
                s = size[v]
                if s > l1:
                    l2 = l1
                    l1 = s
                elif s > l2:
                    l2 = s
                for j in range(k):
                    if s >= thresholds[j]:
                        cge_out[t, j] += 1
        l1_out[t] = l1
        l2_out[t] = l2


@njit(cache=True, nogil=True)
def root_labels_from_mask(n, eu, ev, open_mask, labels):
    """Fill labels[v] with the union-find root of v in the open subgraph."""
    parent = np.empty(n, np.int64)
    size = np.empty(n, np.int64)
    for i in range(n):
        parent[i] = i
        size[i] = 1
    m = eu.shape[0]
    for e in range(m):
        if open_mask[e]:
            ra = _find(parent, eu[e])
            rb = _find(parent, ev[e])
            if ra != rb:
                if size[ra] < size[rb]:
                    ra, rb = rb, ra
                parent[rb] = ra
                size[ra] += size[rb]
    for v in range(n):
        labels[v] = _find(parent, v)


@njit(cache=True, nogil=True)
def all_sources_eccentricity(n, offsets, neighbors):
    """Max BFS eccentricity over all sources (diameter when connected)."""
    dist = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    best = 0
    for src in range(n):
        for i in range(n):
            dist[i] = -1
        dist[src] = 0
        queue[0] = src
        head = 0
        tail = 1
        while head < tail:
            x = queue[head]
            head += 1
            dx = dist[x]
            for slot in range(offsets[x], offsets[x + 1]):
                y = neighbors[slot]
                if dist[y] < 0:
                    dist[y] = dx + 1
                    queue[tail] = y
                    tail += 1
        for i in range(n):
            if dist[i] > best:
                best = dist[i]
    return best
