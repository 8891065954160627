"""Stretch-factor measurement.

exact_stretch is the all-pairs oracle: Dijkstra from every vertex, worst ratio
of graph distance to Euclidean distance. fast_stretch_factor exploits the
construction record instead: pairs inside one leaf and pairs covered by a
merged leaf pair are already certified, so only cross pairs of unmerged leaf
pairs are scanned, read-only, with the same bridge machinery the merges use.
Its result equals max(t, exact stretch) whenever the record is honest; in
particular it returns exactly t when the graph beats its target.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse.csgraph import dijkstra as _csr_dijkstra

from .geometry import Graph, PointSet
from .greedy import dijkstra_sssp
from .hybrid import ConstructionRecord, StepStats, _scan_leaf_pair
from .paths import T_PATH_SLACK, SearchScratch

_SOURCE_BLOCK = 512


@dataclass
class StretchReport:
    """Outcome of a stretch measurement.

    stretch is the measured value (or the target t when every pair is
    certified within it); worst_pair is set only when a concrete pair attains
    the reported stretch.
    """

    stretch: float
    worst_pair: Optional[tuple[int, int]] = None
    pairs_examined: int = 0
    greedy_hits: int = 0
    astar_calls: int = 0


def exact_stretch(g: Graph, p: PointSet) -> StretchReport:
    """Worst-case ratio of graph distance to Euclidean distance, all pairs.

    Disconnected graphs report infinite stretch with an unreachable pair as
    witness; a graph with fewer than two vertices reports 1.
    """
    if g.n != len(p):
        raise ValueError("graph and pointset sizes differ")
    n = g.n
    if n < 2:
        return StretchReport(1.0)
    coords = p.coords
    csr = g.to_csr()
    cols = np.arange(n)
    best = 0.0
    best_pair = (0, 1)
    for s0 in range(0, n, _SOURCE_BLOCK):
        srcs = np.arange(s0, min(s0 + _SOURCE_BLOCK, n))
        dist = _csr_dijkstra(csr, directed=False, indices=srcs)
        dist = np.atleast_2d(dist)
        mask = cols[None, :] > srcs[:, None]
        euc = np.hypot(coords[srcs, 0][:, None] - coords[None, :, 0],
                       coords[srcs, 1][:, None] - coords[None, :, 1])
        ratio = np.where(mask, dist / np.where(mask, euc, 1.0), 0.0)
        flat = int(np.argmax(ratio))
        r = float(ratio.flat[flat])
        if r > best:
            best = r
            best_pair = (int(srcs[flat // n]), int(flat % n))
    return StretchReport(best, best_pair, pairs_examined=n * (n - 1) // 2)


def _spot_check_leaf_paths(rec: ConstructionRecord, sample_per_leaf: int = 5) -> None:
    """Assert the intra-leaf distance surrogate: points sharing a leaf are
    joined by a path of length at most t times their separation."""
    t = rec.params.t
    g = rec.graph
    coords = rec.points.coords
    for leaf in rec.non_empty_leaf_ids():
        ids = rec.leaf_points(int(leaf))
        if len(ids) < 2:
            continue
        step = max(1, len(ids) // (sample_per_leaf + 1))
        picks = ids[::step][:sample_per_leaf + 1]
        for a, b in zip(picks[:-1], picks[1:]):
            duv = math.hypot(coords[a, 0] - coords[b, 0], coords[a, 1] - coords[b, 1])
            got = dijkstra_sssp(g, int(a), target=int(b))
            if got > t * duv + T_PATH_SLACK * duv:
                raise AssertionError(
                    f"intra-leaf pair ({a}, {b}) has detour {got / duv:.6f} > t")


def fast_stretch_factor(rec: ConstructionRecord, *, threads: int = 1,
                        spot_check: bool = False) -> StretchReport:
    """Measure stretch from a construction record without touching the graph.

    Scans cross pairs of every unmerged non-empty leaf pair; uncertified pairs
    contribute their exact detour ratio. Thread count never changes the
    result (pure max-reduction over independent read-only scans).
    """
    rec.validate()
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if spot_check:
        _spot_check_leaf_paths(rec)
    t = rec.params.t
    g = rec.graph
    coords = rec.points.coords
    non_empty = [int(l) for l in rec.non_empty_leaf_ids()]
    pairs = [(a, b) for i, a in enumerate(non_empty) for b in non_empty[i + 1:]
             if (a, b) not in rec.merged]
    m_before = g.m

    def scan(pair: tuple[int, int],
             scratch: Optional[SearchScratch] = None) -> tuple[StepStats, float, tuple[int, int]]:
        a, b = pair
        st = StepStats()
        _, ratio, wpair = _scan_leaf_pair(
            g, coords, rec.leaf_points(a), rec.leaf_points(b),
            int(rec.leaders[a]), int(rec.leaders[b]), t,
            by_distance=False, mutate=False, stats=st, scratch=scratch)
        return st, ratio, wpair

    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(scan, pairs))
    else:
        scratch = SearchScratch(g.n)
        results = [scan(pair, scratch) for pair in pairs]

    total = StepStats()
    worst = 0.0
    worst_pair: Optional[tuple[int, int]] = None
    for st, ratio, wpair in results:
        total.add(st)
        if ratio > worst:
            worst = ratio
            worst_pair = wpair
    if g.m != m_before:
        raise AssertionError("stretch measurement must not mutate the graph")
    if worst <= t:
        return StretchReport(t, None, total.pairs, total.greedy_hits,
                             total.astar_calls)
    return StretchReport(worst, worst_pair, total.pairs, total.greedy_hits,
                         total.astar_calls)
