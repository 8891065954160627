"""Exact greedy spanners.

path_greedy is the reference algorithm: scan all pairs in ascending distance
and add an edge whenever the current graph has no sufficiently short path.
fg_greedy produces the identical edge set but caches shortest-path upper
bounds in a dense weight matrix so that most pairs skip the SSSP recomputation
entirely; it is the production routine run inside quad-tree leaves.

The greedy comparison uses a relative slack: an edge is added when
dist > t*|uv| + GREEDY_SLACK*|uv|, keeping decisions stable against last-ulp
noise in path sums.
"""

from __future__ import annotations

import heapq
import math
from typing import Optional

import numpy as np
from numba import njit

from .geometry import Graph, PointSet

GREEDY_SLACK = 1e-12


def candidate_pairs(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All unordered pairs sorted by (length, min id, max id).

    Ties in length (common on integer grids) fall back to the id order, which
    is the canonical tie-break both greedy variants rely on.
    """
    n = len(coords)
    iu, iv = np.triu_indices(n, k=1)
    d = np.hypot(coords[iu, 0] - coords[iv, 0], coords[iu, 1] - coords[iv, 1])
    order = np.lexsort((iv, iu, d))
    return iu[order], iv[order], d[order]


def dijkstra_sssp(g: Graph, source: int, target: Optional[int] = None,
                  budget: Optional[float] = None):
    """Single-source shortest paths with optional early exit.

    Returns a numpy array of distances, or a single float when target is
    given. With a budget, the search stops once the frontier minimum exceeds
    it; vertices beyond the budget report +inf (so a +inf result means
    "unreachable or farther than the budget", which is all callers need).
    """
    if not (0 <= source < g.n):
        raise IndexError("source out of range")
    adj = g.adj
    dist: dict[int, float] = {source: 0.0}
    heap = [(0.0, source)]
    done: set[int] = set()
    while heap:
        du, u = heapq.heappop(heap)
        if u in done:
            continue
        if budget is not None and du > budget:
            break
        done.add(u)
        if target is not None and u == target:
            return du
        for v, w in adj[u]:
            nd = du + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    if target is not None:
        return dist[target] if target in done else math.inf
    out = np.full(g.n, np.inf)
    for u in done:
        out[u] = dist[u]
    return out


def path_greedy(p: PointSet | np.ndarray, t: float) -> Graph:
    """Reference greedy spanner; one bounded Dijkstra per candidate pair.

    Intended for oracle/testing use at small n.
    """
    if t <= 1:
        raise ValueError("t must exceed 1")
    coords = p.coords if isinstance(p, PointSet) else np.asarray(p, dtype=np.float64)
    g = Graph(coords)
    if g.n < 2:
        return g
    iu, iv, d = candidate_pairs(coords)
    adj = g.adj
    for idx in range(len(d)):
        u = int(iu[idx])
        v = int(iv[idx])
        duv = float(d[idx])
        thr = t * duv + GREEDY_SLACK * duv
        # bounded Dijkstra: settle v or certify every path is longer than thr
        dist = {u: 0.0}
        heap = [(0.0, u)]
        reached = math.inf
        while heap:
            du, x = heapq.heappop(heap)
            if du > thr:
                break
            if du > dist.get(x, math.inf):
                continue
            if x == v:
                reached = du
                break
            for y, w in adj[x]:
                nd = du + w
                if nd < dist.get(y, math.inf):
                    dist[y] = nd
                    heapq.heappush(heap, (nd, y))
        if reached > thr:
            g.add_edge(u, v)
    return g


@njit(cache=True)
def _fg_kernel(n, iu, iv, d, thr, max_edges):  # pragma: no cover - jitted
    """Full greedy loop over presorted pairs, compiled.

    Adjacency lives in linked-list arrays sized for max_edges; returns m = -1
    when that bound is hit so the caller can retry with a bigger buffer.
    """
    head = np.full(n, -1, dtype=np.int64)
    nxt = np.empty(2 * max_edges, dtype=np.int64)
    to = np.empty(2 * max_edges, dtype=np.int64)
    wt = np.empty(2 * max_edges, dtype=np.float64)
    eu = np.empty(max_edges, dtype=np.int64)
    ev = np.empty(max_edges, dtype=np.int64)
    m = 0

    weight = np.full((n, n), np.inf)
    for i in range(n):
        weight[i, i] = 0.0

    dist = np.empty(n, dtype=np.float64)
    stamp = np.full(n, -1, dtype=np.int64)
    gen = 0
    # binary heap keyed by (distance, vertex id); pushes <= 2*max_edges + 1
    cap = 4 * max_edges + 16
    hd = np.empty(cap, dtype=np.float64)
    hn = np.empty(cap, dtype=np.int64)
    events = 0

    for e in range(iu.shape[0]):
        u = iu[e]
        v = iv[e]
        th = thr[e]
        if weight[u, v] <= th:
            continue
        events += 1
        gen += 1
        dist[u] = 0.0
        stamp[u] = gen
        hd[0] = 0.0
        hn[0] = u
        hsize = 1
        while hsize > 0:
            d0 = hd[0]
            x = hn[0]
            hsize -= 1
            hd[0] = hd[hsize]
            hn[0] = hn[hsize]
            pos = 0
            while True:
                l = 2 * pos + 1
                if l >= hsize:
                    break
                c = l
                r = l + 1
                if r < hsize and (hd[r] < hd[l] or (hd[r] == hd[l] and hn[r] < hn[l])):
                    c = r
                if hd[c] < hd[pos] or (hd[c] == hd[pos] and hn[c] < hn[pos]):
                    hd[pos], hd[c] = hd[c], hd[pos]
                    hn[pos], hn[c] = hn[c], hn[pos]
                    pos = c
                else:
                    break
            if d0 > dist[x]:
                continue
            ptr = head[x]
            while ptr != -1:
                y = to[ptr]
                nd = d0 + wt[ptr]
                if stamp[y] != gen or nd < dist[y]:
                    dist[y] = nd
                    stamp[y] = gen
                    pos = hsize
                    hd[pos] = nd
                    hn[pos] = y
                    hsize += 1
                    while pos > 0:
                        par = (pos - 1) // 2
                        if hd[pos] < hd[par] or (hd[pos] == hd[par] and hn[pos] < hn[par]):
                            hd[pos], hd[par] = hd[par], hd[pos]
                            hn[pos], hn[par] = hn[par], hn[pos]
                            pos = par
                        else:
                            break
                ptr = nxt[ptr]
        for q in range(n):
            if stamp[q] == gen and dist[q] < weight[u, q]:
                weight[u, q] = dist[q]
                weight[q, u] = dist[q]
        if weight[u, v] > th:
            if m >= max_edges:
                return eu[:0], ev[:0], -1, events
            w = d[e]
            eu[m] = u
            ev[m] = v
            slot = 2 * m
            to[slot] = v
            wt[slot] = w
            nxt[slot] = head[u]
            head[u] = slot
            slot = 2 * m + 1
            to[slot] = u
            wt[slot] = w
            nxt[slot] = head[v]
            head[v] = slot
            m += 1
            weight[u, v] = w
            weight[v, u] = w
    return eu[:m], ev[:m], m, events


def fg_greedy(p: PointSet | np.ndarray, t: float) -> Graph:
    """Greedy spanner with the cached weight-matrix shortcut.

    Maintains an n x n matrix of shortest-path upper bounds (initialized to
    +inf, diagonal 0). A pair whose cached bound already certifies a t-path is
    skipped without any SSSP work; otherwise SSSP from the pair's first point
    refreshes that point's row and column (both directions), and the pair is
    re-tested against the exact value. Output is identical to path_greedy.

    Memory is Theta(n^2); intended for point sets up to a few thousand, which
    is the regime the partition-based pipeline feeds it.
    """
    if t <= 1:
        raise ValueError("t must exceed 1")
    coords = p.coords if isinstance(p, PointSet) else np.asarray(p, dtype=np.float64)
    g = Graph(coords)
    n = g.n
    if n < 2:
        return g
    iu, iv, d = candidate_pairs(coords)
    thr = t * d + GREEDY_SLACK * d
    max_edges = 24 * n + 64
    while True:
        eu, ev, m, _ = _fg_kernel(n, iu.astype(np.int64), iv.astype(np.int64),
                                  d, thr, max_edges)
        if m >= 0:
            break
        max_edges *= 4
    for k in range(m):
        g.add_edge(int(eu[k]), int(ev[k]))
    return g
