"""Partition-based spanner pipeline and its construction record.

fast_sparse_spanner composes five steps: (1) a region quad-tree splits the
points into leaves of at most k points; (2) an exact greedy spanner is built
inside every non-empty leaf; (3) a WSPD spanner over the leaf leader points
ties the leaves together globally; (4) every adjacent pair of non-empty
leaves is merged so all cross pairs gain t-paths; (5) leaf pairs at dual-graph
hop distance 2..h are merged with a lighter scan. The pairs merged in steps
4-5 are recorded in M; the fast stretch measurement later only has to examine
leaf pairs outside M.

Both merge routines share one scan engine. A bridge is a cached u-v path (or
edge) known to exist in the current graph; a candidate pair (u, v) is certified
when some bridge x~y satisfies t*|ux| + len(x~y) + t*|yv| <= t*|uv|, using
t*|ux| as an upper bound for the in-graph distance between two points of the
same leaf (valid because each leaf holds an exact greedy t-spanner).
Uncertified pairs fall back to a greedy walk, then A*, then an edge insertion.
"""

from __future__ import annotations

import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from numba import njit

from .geometry import Graph, PointSet
from .greedy import fg_greedy
from .paths import T_PATH_SLACK, SearchScratch, astar, greedy_path
from .quadtree import QuadTree, build_dual_graph, build_quadtree
from .wspd import build_wspd, separation_ratio

RECORD_MAGIC = b"SPGREC"
RECORD_VERSION = 1

# (stretch target, hop radius) table backing default_params
_H_BY_T = ((1.05, 6), (1.1, 5), (1.25, 3), (2.0, 1))


class Bridge(NamedTuple):
    """A u-v path of known length that exists in the graph when recorded.

    Edges are only ever added, so a bridge stays valid for the rest of the
    scan that recorded it.
    """

    x: int
    y: int
    length: float


@dataclass(frozen=True)
class Params:
    """Pipeline parameters: stretch target t, backbone stretch t_prime (>= t),
    leaf capacity k, and merge hop radius h."""

    t: float
    t_prime: float
    k: int
    h: int

    def __post_init__(self) -> None:
        if self.t <= 1:
            raise ValueError("t must exceed 1")
        if self.t_prime < self.t:
            raise ValueError("t_prime must be >= t")
        if self.k < 1:
            raise ValueError("leaf capacity k must be >= 1")
        if self.h < 1:
            raise ValueError("hop radius h must be >= 1")


def default_params(t: float, k: int = 2500) -> Params:
    """Tuned defaults: t_prime = 1.25 on 1.1 <= t <= 1.25 (else t), and the
    hop radius from the nearest tabulated stretch at or above t."""
    if t <= 1:
        raise ValueError("t must exceed 1")
    t_prime = 1.25 if 1.1 <= t <= 1.25 else t
    h = 1
    for bound, hops in _H_BY_T:
        if t <= bound:
            h = hops
            break
    return Params(t, t_prime, k, h)


@dataclass
class StepStats:
    """Counters from one or more cross-leaf scans."""

    pairs: int = 0
    pruned: int = 0
    greedy_hits: int = 0
    astar_calls: int = 0
    astar_hits: int = 0
    edges_added: int = 0

    @property
    def searched(self) -> int:
        return self.greedy_hits + self.astar_calls

    def add(self, other: "StepStats") -> None:
        self.pairs += other.pairs
        self.pruned += other.pruned
        self.greedy_hits += other.greedy_hits
        self.astar_calls += other.astar_calls
        self.astar_hits += other.astar_hits
        self.edges_added += other.edges_added


@dataclass
class BuildStats:
    """Per-step accounting for one fast_sparse_spanner run."""

    step_edges: list[int]
    step_seconds: list[float]
    merge: StepStats
    light: StepStats
    leaf_count: int = 0
    nonempty_leaves: int = 0


@dataclass
class ConstructionRecord:
    """Everything the fast stretch measurement needs about one build.

    The quad-tree itself is kept only when the record came from an in-process
    build; serialization stores the flat leaf data (boxes, leaders, partition)
    instead.
    """

    points: PointSet
    graph: Graph
    params: Params
    leaf_boxes: np.ndarray
    leaders: np.ndarray
    partition: np.ndarray
    merged: set[tuple[int, int]]
    recorded_m: int
    tree: Optional[QuadTree] = None
    build_stats: Optional[BuildStats] = None
    _groups: Optional[dict[int, np.ndarray]] = field(
        default=None, init=False, repr=False, compare=False)

    def non_empty_leaf_ids(self) -> np.ndarray:
        return np.nonzero(self.leaders >= 0)[0]

    def leaf_points(self, leaf_id: int) -> np.ndarray:
        """Ascending global point ids inside one leaf."""
        if self._groups is None:
            order = np.argsort(self.partition, kind="stable")
            part = self.partition[order]
            bounds = np.searchsorted(part, np.arange(len(self.leaders) + 1))
            self._groups = {
                l: order[bounds[l]:bounds[l + 1]]
                for l in range(len(self.leaders))
                if bounds[l + 1] > bounds[l]
            }
        return self._groups.get(leaf_id, np.empty(0, dtype=np.int64))

    def validate(self) -> None:
        """Reject a record that is inconsistent with its graph or partition."""
        n = len(self.points)
        if self.graph.n != n:
            raise ValueError("record: graph and pointset sizes differ")
        if self.graph.m != self.recorded_m:
            raise ValueError("record: graph edge count changed since recording")
        L = len(self.leaders)
        if self.leaf_boxes.shape != (L, 4):
            raise ValueError("record: leaf box table malformed")
        if self.partition.shape != (n,):
            raise ValueError("record: partition length mismatch")
        if L == 0 or self.partition.min() < 0 or self.partition.max() >= L:
            raise ValueError("record: partition refers to unknown leaves")
        occupied = np.zeros(L, dtype=bool)
        occupied[self.partition] = True
        if not np.array_equal(occupied, self.leaders >= 0):
            raise ValueError("record: leaders inconsistent with partition")
        for l in np.nonzero(occupied)[0]:
            leader = int(self.leaders[l])
            if not (0 <= leader < n) or self.partition[leader] != l:
                raise ValueError("record: leader outside its leaf")
        for a, b in self.merged:
            if not (0 <= a < b < L) or not occupied[a] or not occupied[b]:
                raise ValueError("record: merged pair refers to invalid leaves")


def _apply_bridge(coords: np.ndarray, t: float, bridge: Bridge,
                  a: np.ndarray, b: np.ndarray, d: np.ndarray,
                  stats: StepStats) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Drop every pending pair the bridge certifies; returns the survivors."""
    x, y, plen = bridge
    lhs = (t * np.hypot(coords[a, 0] - coords[x, 0], coords[a, 1] - coords[x, 1])
           + plen
           + t * np.hypot(coords[b, 0] - coords[y, 0], coords[b, 1] - coords[y, 1]))
    keep = lhs > t * d
    dropped = len(a) - int(np.count_nonzero(keep))
    if dropped:
        stats.pruned += dropped
        return a[keep], b[keep], d[keep]
    return a, b, d


@njit(cache=True)
def _next_uncovered(a, b, d, pos, cx, cy, bx, by, blen, nb, t):
    """Advance pos past every pending pair some bridge certifies.

    Returns (index of the first uncovered pair or len(a), pairs skipped).
    Each pair is judged against the bridges that exist when it surfaces, so
    the surviving pairs match what eager per-bridge filtering would keep.
    Newest bridges are tried first: the queue is sorted by pair length, so the
    pairs right behind the cursor tend to be certified by the bridge recorded
    moments ago, not by the short early ones.
    """
    skipped = 0
    while pos < a.shape[0]:
        u = a[pos]
        v = b[pos]
        rhs = t * d[pos]
        ux = cx[u]
        uy = cy[u]
        vx = cx[v]
        vy = cy[v]
        covered = False
        for i in range(nb - 1, -1, -1):
            xi = bx[i]
            yi = by[i]
            dx0 = ux - cx[xi]
            dy0 = uy - cy[xi]
            dx1 = cx[yi] - vx
            dy1 = cy[yi] - vy
            lhs = (t * math.sqrt(dx0 * dx0 + dy0 * dy0) + blen[i]
                   + t * math.sqrt(dx1 * dx1 + dy1 * dy1))
            if lhs <= rhs:
                covered = True
                break
        if not covered:
            break
        skipped += 1
        pos += 1
    return pos, skipped


def _scan_leaf_pair(g: Graph, coords: np.ndarray,
                    pi: np.ndarray, pj: np.ndarray, li: int, lj: int,
                    t: float, *, by_distance: bool, mutate: bool,
                    stats: StepStats, scratch: Optional[SearchScratch] = None,
                    lock: Optional[threading.Lock] = None,
                    ) -> tuple[int, float, tuple[int, int]]:
    """Certify or repair every pair in P_i x P_j.

    by_distance=True processes pairs in ascending Euclidean length (after the
    leader-edge prune); otherwise P_i is ordered by distance to the far leader
    and P_j likewise, and pairs run in that nested order. mutate=True adds an
    edge whenever no t-path is found; mutate=False leaves the graph untouched
    and reports the worst exact detour ratio among uncertified pairs.

    Returns (edges added, worst ratio, worst pair).
    """
    if scratch is None:
        scratch = SearchScratch(g.n)
    pi = np.asarray(pi, dtype=np.int64)
    pj = np.asarray(pj, dtype=np.int64)
    if not by_distance:
        di = np.hypot(coords[pi, 0] - coords[lj, 0], coords[pi, 1] - coords[lj, 1])
        pi = pi[np.lexsort((pi, di))]
        dj = np.hypot(coords[pj, 0] - coords[li, 0], coords[pj, 1] - coords[li, 1])
        pj = pj[np.lexsort((pj, dj))]
    a = np.repeat(pi, len(pj))
    b = np.tile(pj, len(pi))
    d = np.hypot(coords[a, 0] - coords[b, 0], coords[a, 1] - coords[b, 1])
    stats.pairs += len(d)

    if g.has_edge(li, lj):
        seed = Bridge(li, lj, g.distance_between(li, lj))
        a, b, d = _apply_bridge(coords, t, seed, a, b, d, stats)
    if by_distance and len(d):
        order = np.lexsort((b, a, d))
        a, b, d = a[order], b[order], d[order]

    added = 0
    worst_ratio = 0.0
    worst_pair = (-1, -1)
    cx = np.ascontiguousarray(coords[:, 0])
    cy = np.ascontiguousarray(coords[:, 1])
    bx = np.empty(64, dtype=np.int64)
    by = np.empty(64, dtype=np.int64)
    blen = np.empty(64, dtype=np.float64)
    nb = 0
    pos = 0
    while True:
        pos, skipped = _next_uncovered(a, b, d, pos, cx, cy, bx, by, blen, nb, t)
        stats.pruned += skipped
        if pos >= len(a):
            break
        u = int(a[pos])
        v = int(b[pos])
        duv = float(d[pos])
        pos += 1
        thr = t * duv + T_PATH_SLACK * duv
        bridge: Optional[Bridge] = None
        res = greedy_path(g, u, v, scratch)
        if res.found and res.length <= thr:
            stats.greedy_hits += 1
            bridge = Bridge(u, v, res.length)
        elif mutate:
            stats.astar_calls += 1
            res = astar(g, u, v, budget=thr, scratch=scratch)
            if res.found:
                stats.astar_hits += 1
                bridge = Bridge(u, v, res.length)
            else:
                if lock is None:
                    g.add_edge(u, v)
                else:
                    with lock:
                        g.add_edge(u, v)
                stats.edges_added += 1
                added += 1
                bridge = Bridge(u, v, duv)
        else:
            stats.astar_calls += 1
            res = astar(g, u, v, scratch=scratch)
            if res.found and res.length <= thr:
                stats.astar_hits += 1
                bridge = Bridge(u, v, res.length)
            else:
                ratio = res.length / duv if res.found else math.inf
                if ratio > worst_ratio:
                    worst_ratio = ratio
                    worst_pair = (u, v)
        if bridge is not None:
            if nb == len(bx):
                bx = np.concatenate((bx, np.empty_like(bx)))
                by = np.concatenate((by, np.empty_like(by)))
                blen = np.concatenate((blen, np.empty_like(blen)))
            bx[nb] = bridge.x
            by[nb] = bridge.y
            blen[nb] = bridge.length
            nb += 1
    return added, worst_ratio, worst_pair


def _checked_pair(rec: ConstructionRecord, leaf_i: int, leaf_j: int) -> tuple[int, int]:
    if leaf_i == leaf_j:
        raise ValueError("cannot merge a leaf with itself")
    if rec.leaders[leaf_i] < 0 or rec.leaders[leaf_j] < 0:
        raise ValueError("merge requires two non-empty leaves")
    key = (min(leaf_i, leaf_j), max(leaf_i, leaf_j))
    if key in rec.merged:
        raise ValueError("leaf pair already merged")
    return key


def greedy_merge(rec: ConstructionRecord, leaf_i: int, leaf_j: int, *,
                 stats: Optional[StepStats] = None,
                 scratch: Optional[SearchScratch] = None,
                 lock: Optional[threading.Lock] = None) -> int:
    """Merge two non-empty leaves, scanning cross pairs shortest-first.

    If the leader edge is present it prunes all pairs it certifies before the
    pair sort. Records the pair in the merged set; returns edges added.
    """
    key = _checked_pair(rec, leaf_i, leaf_j)
    if stats is None:
        stats = StepStats()
    added, _, _ = _scan_leaf_pair(
        rec.graph, rec.points.coords,
        rec.leaf_points(leaf_i), rec.leaf_points(leaf_j),
        int(rec.leaders[leaf_i]), int(rec.leaders[leaf_j]),
        rec.params.t, by_distance=True, mutate=True,
        stats=stats, scratch=scratch, lock=lock)
    if lock is None:
        rec.merged.add(key)
    else:
        with lock:
            rec.merged.add(key)
    return added


def greedy_merge_light(rec: ConstructionRecord, leaf_i: int, leaf_j: int, *,
                       stats: Optional[StepStats] = None,
                       scratch: Optional[SearchScratch] = None,
                       lock: Optional[threading.Lock] = None) -> int:
    """Merge like greedy_merge but without the quadratic pair sort.

    Points of each leaf are ordered by distance to the other leaf's leader and
    scanned in that nested order; the leader edge (when present) seeds the
    bridge cache instead of pre-pruning.
    """
    key = _checked_pair(rec, leaf_i, leaf_j)
    if stats is None:
        stats = StepStats()
    added, _, _ = _scan_leaf_pair(
        rec.graph, rec.points.coords,
        rec.leaf_points(leaf_i), rec.leaf_points(leaf_j),
        int(rec.leaders[leaf_i]), int(rec.leaders[leaf_j]),
        rec.params.t, by_distance=False, mutate=True,
        stats=stats, scratch=scratch, lock=lock)
    if lock is None:
        rec.merged.add(key)
    else:
        with lock:
            rec.merged.add(key)
    return added


def fast_sparse_spanner(p: PointSet, params: Params, *,
                        threads: int = 1) -> ConstructionRecord:
    """Run the five-step pipeline and return the construction record.

    threads=1 (the default) is fully deterministic. With more threads, leaf
    spanners and per-hop-level merges run concurrently; the edge set may then
    differ between thread counts, but every certified t-path guarantee still
    holds because edges are only ever added.
    """
    if not isinstance(p, PointSet):
        p = PointSet(p)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    coords = p.coords
    t = params.t
    step_edges = [0, 0, 0, 0, 0]
    step_seconds = [0.0, 0.0, 0.0, 0.0, 0.0]

    tick = time.perf_counter()
    tree = build_quadtree(p, params.k)
    dual = build_dual_graph(tree)
    nonempty = [leaf.id for leaf in tree.leaves if not leaf.is_empty]
    L = len(tree.leaves)
    leaf_boxes = np.array([[lf.box.min_x, lf.box.min_y, lf.box.max_x, lf.box.max_y]
                           for lf in tree.leaves], dtype=np.float64).reshape(L, 4)
    leaders = np.array([lf.leader if lf.leader is not None else -1
                        for lf in tree.leaves], dtype=np.int64)
    graph = Graph(p)
    rec = ConstructionRecord(points=p, graph=graph, params=params,
                             leaf_boxes=leaf_boxes, leaders=leaders,
                             partition=tree.point_leaf.copy(), merged=set(),
                             recorded_m=0, tree=tree)
    step_seconds[0] = time.perf_counter() - tick

    tick = time.perf_counter()
    busy = [tree.leaves[l] for l in nonempty if len(tree.leaves[l].point_ids) >= 2]

    def _local(leaf):
        return fg_greedy(coords[leaf.point_ids], t)

    if threads > 1 and len(busy) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            locals_ = list(pool.map(_local, busy))
    else:
        locals_ = [_local(leaf) for leaf in busy]
    for leaf, local in zip(busy, locals_):
        ids = leaf.point_ids
        for a, b, _ in local.edges():
            graph.add_edge(int(ids[a]), int(ids[b]))
    step_edges[1] = graph.m
    step_seconds[1] = time.perf_counter() - tick

    tick = time.perf_counter()
    leader_ids = leaders[nonempty]
    if len(leader_ids) >= 2:
        wspd = build_wspd(coords[leader_ids], separation_ratio(params.t_prime))
        for pair in wspd.pairs:
            graph.add_edge(int(leader_ids[pair.rep_a]), int(leader_ids[pair.rep_b]))
    step_edges[2] = graph.m - step_edges[1]
    step_seconds[2] = time.perf_counter() - tick

    merge_stats = StepStats()
    light_stats = StepStats()
    lock = threading.Lock() if threads > 1 else None

    tick = time.perf_counter()
    adjacent: list[tuple[int, int]] = []
    for l in nonempty:
        for nb in dual.adj[l]:
            if dual.non_empty[nb] and nb > l:
                adjacent.append((l, nb))
    if threads > 1 and len(adjacent) > 1:
        def _merge_task(pair):
            st = StepStats()
            greedy_merge(rec, pair[0], pair[1], stats=st, lock=lock)
            return st
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for st in pool.map(_merge_task, adjacent):
                merge_stats.add(st)
    else:
        scratch = SearchScratch(graph.n)
        for i, j in adjacent:
            greedy_merge(rec, i, j, stats=merge_stats, scratch=scratch)
    step_edges[3] = merge_stats.edges_added
    step_seconds[3] = time.perf_counter() - tick

    tick = time.perf_counter()
    if params.h >= 2 and len(nonempty) >= 2:
        hop_levels = {l: dual.bfs_levels(l, params.h) for l in nonempty}
        scratch = None if threads > 1 else SearchScratch(graph.n)
        for hop in range(2, params.h + 1):
            tasks: list[tuple[int, int]] = []
            for l in nonempty:
                for tgt in hop_levels[l][hop]:
                    if not dual.non_empty[tgt] or tgt <= l:
                        continue
                    if (l, tgt) not in rec.merged:
                        tasks.append((l, tgt))
            if threads > 1 and len(tasks) > 1:
                def _light_task(pair):
                    st = StepStats()
                    greedy_merge_light(rec, pair[0], pair[1], stats=st, lock=lock)
                    return st
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    for st in pool.map(_light_task, tasks):
                        light_stats.add(st)
            else:
                for i, j in tasks:
                    greedy_merge_light(rec, i, j, stats=light_stats, scratch=scratch)
    step_edges[4] = light_stats.edges_added
    step_seconds[4] = time.perf_counter() - tick

    rec.recorded_m = graph.m
    rec.build_stats = BuildStats(step_edges=step_edges, step_seconds=step_seconds,
                                 merge=merge_stats, light=light_stats,
                                 leaf_count=L, nonempty_leaves=len(nonempty))
    return rec


def _pack_array(arr: np.ndarray, dtype: str) -> bytes:
    return np.ascontiguousarray(arr, dtype=dtype).tobytes()


def save_record(rec: ConstructionRecord, path) -> None:
    """Serialize a record (including the points) to the versioned binary form."""
    import struct

    rec.validate()
    n = len(rec.points)
    L = len(rec.leaders)
    eu, ev, _ = rec.graph.edge_arrays()
    if n >= 2 ** 32 or L >= 2 ** 32:
        raise ValueError("record too large for the 32-bit id format")
    merged = sorted(rec.merged)
    out = bytearray()
    out += RECORD_MAGIC
    out += struct.pack("<B", RECORD_VERSION)
    out += struct.pack("<Q", n)
    out += _pack_array(rec.points.coords, "<f8")
    out += struct.pack("<Q", rec.graph.m)
    edges = np.empty((rec.graph.m, 2), dtype=np.uint32)
    edges[:, 0] = eu
    edges[:, 1] = ev
    out += edges.tobytes()
    out += struct.pack("<Q", L)
    out += _pack_array(rec.leaf_boxes, "<f8")
    out += _pack_array(rec.leaders, "<i4")
    out += _pack_array(rec.partition, "<i4")
    out += struct.pack("<ddii", rec.params.t, rec.params.t_prime,
                       rec.params.k, rec.params.h)
    out += struct.pack("<Q", len(merged))
    if merged:
        pairs = np.asarray(merged, dtype=np.uint32)
        out += _pack_array(pairs, "<u4")
    with open(path, "wb") as fh:
        fh.write(bytes(out))


def load_record(path) -> ConstructionRecord:
    """Read a serialized record back; validates magic, version, and layout."""
    import struct

    with open(path, "rb") as fh:
        buf = fh.read()
    pos = 0

    def take(count: int) -> bytes:
        nonlocal pos
        if pos + count > len(buf):
            raise ValueError(f"{path}: truncated record")
        chunk = buf[pos:pos + count]
        pos += count
        return chunk

    if take(len(RECORD_MAGIC)) != RECORD_MAGIC:
        raise ValueError(f"{path}: not a construction record")
    (version,) = struct.unpack("<B", take(1))
    if version != RECORD_VERSION:
        raise ValueError(f"{path}: unsupported record version {version}")
    (n,) = struct.unpack("<Q", take(8))
    coords = np.frombuffer(take(16 * n), dtype="<f8").reshape(n, 2)
    points = PointSet(coords)
    if len(points) != n:
        raise ValueError(f"{path}: duplicate points in record")
    (m,) = struct.unpack("<Q", take(8))
    edges = np.frombuffer(take(8 * m), dtype="<u4").reshape(m, 2)
    (L,) = struct.unpack("<Q", take(8))
    leaf_boxes = np.frombuffer(take(32 * L), dtype="<f8").reshape(L, 4).copy()
    leaders = np.frombuffer(take(4 * L), dtype="<i4").astype(np.int64)
    partition = np.frombuffer(take(4 * n), dtype="<i4").astype(np.int64)
    t, t_prime, k, h = struct.unpack("<ddii", take(24))
    params = Params(t, t_prime, k, h)
    (mcount,) = struct.unpack("<Q", take(8))
    pair_arr = np.frombuffer(take(8 * mcount), dtype="<u4").reshape(mcount, 2)
    if pos != len(buf):
        raise ValueError(f"{path}: trailing bytes after record")

    graph = Graph(points)
    for u, v in edges:
        graph.add_edge(int(u), int(v))
    merged = {(int(a), int(b)) for a, b in pair_arr}
    rec = ConstructionRecord(points=points, graph=graph, params=params,
                             leaf_boxes=leaf_boxes, leaders=leaders,
                             partition=partition, merged=merged,
                             recorded_m=graph.m)
    rec.validate()
    return rec
