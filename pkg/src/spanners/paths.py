"""t-path finders used by merging and stretch measurement.

greedy_path is a cheap heuristic walk: from the current vertex it always steps
to the unvisited neighbor minimizing (edge length + straight-line distance to
the target). It either reaches the target or dead-ends; it never backtracks.
astar is the exact fallback: Euclidean straight-line heuristic (admissible and
consistent for Euclidean edge weights), early exit on target settle, optional
length budget for callers that only need t-path existence.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .geometry import Graph

T_PATH_SLACK = 1e-12


@dataclass
class PathResult:
    found: bool
    vertices: list[int] = field(default_factory=list)
    length: float = math.inf


class SearchScratch:
    """Generation-stamped per-search state, reused across calls.

    Avoids O(n) clearing per search; one instance per thread (searches sharing
    a scratch must not run concurrently).
    """

    __slots__ = ("n", "gen", "stamp", "dist", "parent")

    def __init__(self, n: int):
        self.n = n
        self.gen = 0
        self.stamp = [0] * n
        self.dist = [0.0] * n
        self.parent = [-1] * n


def greedy_path(g: Graph, u: int, v: int, scratch: SearchScratch | None = None) -> PathResult:
    """Greedy walk from u toward v; found=False on a dead end.

    Never revisits a vertex, so the result (when found) is a simple path.
    Neighbor ties are broken by lowest vertex id.
    """
    if u == v:
        raise ValueError("endpoints must differ")
    if scratch is None:
        scratch = SearchScratch(g.n)
    scratch.gen += 1
    gen = scratch.gen
    stamp = scratch.stamp
    adj = g.adj
    xs = g.xs
    ys = g.ys
    xv = xs[v]
    yv = ys[v]

    stamp[u] = gen
    path = [u]
    total = 0.0
    y = u
    while y != v:
        best = -1
        best_key = math.inf
        best_w = 0.0
        for x, w in adj[y]:
            if stamp[x] == gen:
                continue
            key = w + math.hypot(xs[x] - xv, ys[x] - yv)
            if key < best_key or (key == best_key and x < best):
                best = x
                best_key = key
                best_w = w
        if best < 0:
            return PathResult(False, path, total)
        stamp[best] = gen
        path.append(best)
        total += best_w
        y = best
    return PathResult(True, path, total)


def astar(g: Graph, u: int, v: int, budget: float | None = None,
          scratch: SearchScratch | None = None) -> PathResult:
    """Exact shortest path u -> v (straight-line heuristic, target early exit).

    With a budget, the search abandons once the settled minimum f-value
    exceeds it; the abandoned result (found=False) certifies that every u-v
    path is longer than the budget.
    """
    if u == v:
        raise ValueError("endpoints must differ")
    if scratch is None:
        scratch = SearchScratch(g.n)
    scratch.gen += 1
    gen = scratch.gen
    stamp = scratch.stamp
    dist = scratch.dist
    parent = scratch.parent
    adj = g.adj
    xs = g.xs
    ys = g.ys
    xv = xs[v]
    yv = ys[v]

    stamp[u] = gen
    dist[u] = 0.0
    parent[u] = -1
    heap = [(math.hypot(xs[u] - xv, ys[u] - yv), 0.0, u)]
    while heap:
        f, du, x = heapq.heappop(heap)
        if du > dist[x]:
            continue
        if budget is not None and f > budget:
            return PathResult(False)
        if x == v:
            path = [v]
            while parent[path[-1]] != -1:
                path.append(parent[path[-1]])
            path.reverse()
            return PathResult(True, path, du)
        for y, w in adj[x]:
            nd = du + w
            if stamp[y] != gen or nd < dist[y]:
                stamp[y] = gen
                dist[y] = nd
                parent[y] = x
                heapq.heappush(heap, (nd + math.hypot(xs[y] - xv, ys[y] - yv), nd, y))
    return PathResult(False)


def is_t_path(path: PathResult, u: int, v: int, t: float, g: Graph) -> bool:
    """Whether the path's length is at most t times |uv| (inclusive, with slack)."""
    if not path.found:
        raise ValueError("is_t_path requires a found path")
    duv = g.distance_between(u, v)
    return path.length <= t * duv + T_PATH_SLACK * duv
