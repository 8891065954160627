"""Region quad-tree over a pointset and the dual graph on its leaves.

The tree subdivides a square root box into equal quadrants until every leaf
holds at most k points. Every internal node has exactly four children, so
empty leaves exist and participate in the dual graph (two leaves are dual
neighbors when their boxes touch, corner contact included).

Quadrant order everywhere is NW, NE, SW, SE with north = +y; leaf ids are
assigned in that pre-order, which makes construction and merging reproducible.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .geometry import BoundingBox, PointSet

NEIGHBOR_EPS_FACTOR = 1e-9


class Leaf:
    __slots__ = ("id", "box", "point_ids", "leader")

    def __init__(self, id: int, box: BoundingBox, point_ids: np.ndarray,
                 leader: Optional[int]):
        self.id = id
        self.box = box
        self.point_ids = point_ids
        self.leader = leader

    @property
    def is_empty(self) -> bool:
        return len(self.point_ids) == 0


class _Node:
    __slots__ = ("x0", "y0", "x1", "y1", "children", "leaf_id")

    def __init__(self, x0: float, y0: float, x1: float, y1: float):
        self.x0 = x0
        self.y0 = y0
        self.x1 = x1
        self.y1 = y1
        self.children: Optional[list["_Node"]] = None
        self.leaf_id: int = -1


class QuadTree:
    """Immutable after construction; safe for concurrent reads."""

    __slots__ = ("root", "root_box", "leaves", "depth", "point_leaf", "capacity")

    def __init__(self, root: _Node, root_box: BoundingBox, leaves: list[Leaf],
                 depth: int, point_leaf: np.ndarray, capacity: int):
        self.root = root
        self.root_box = root_box
        self.leaves = leaves
        self.depth = depth
        self.point_leaf = point_leaf  # leaf id per point id
        self.capacity = capacity

    def non_empty_leaves(self) -> list[Leaf]:
        return [leaf for leaf in self.leaves if not leaf.is_empty]


def _leader_of(coords: np.ndarray, ids: np.ndarray) -> int:
    """Point of the leaf closest to the bounding-box center of the leaf's points."""
    pts = coords[ids]
    center = (pts.min(axis=0) + pts.max(axis=0)) / 2.0
    d2 = np.square(pts[:, 0] - center[0]) + np.square(pts[:, 1] - center[1])
    # ids are ascending, so argmin's first hit is the lowest-id tie-break
    return int(ids[int(np.argmin(d2))])


def build_quadtree(p: PointSet, k: int) -> QuadTree:
    if k < 1:
        raise ValueError("leaf capacity k must be >= 1")
    coords = p.coords
    n = len(coords)

    bb = p.bounding_box()
    cx = (bb.min_x + bb.max_x) / 2.0
    cy = (bb.min_y + bb.max_y) / 2.0
    half = max(bb.max_x - bb.min_x, bb.max_y - bb.min_y) / 2.0
    root_box = BoundingBox(cx - half, cy - half, cx + half, cy + half)

    root = _Node(root_box.min_x, root_box.min_y, root_box.max_x, root_box.max_y)
    leaves: list[Leaf] = []
    point_leaf = np.empty(n, dtype=np.int64)
    depth = 0

    all_ids = np.arange(n, dtype=np.int64)
    stack: list[tuple[_Node, np.ndarray, int]] = [(root, all_ids, 0)]
    while stack:
        node, ids, d = stack.pop()
        mx = (node.x0 + node.x1) / 2.0
        my = (node.y0 + node.y1) / 2.0
        # fp degeneracy guard: a box too small to split becomes a leaf
        splittable = (node.x0 < mx < node.x1) or (node.y0 < my < node.y1)
        if len(ids) <= k or not splittable:
            leaf_id = len(leaves)
            node.leaf_id = leaf_id
            box = BoundingBox(node.x0, node.y0, node.x1, node.y1)
            leader = _leader_of(coords, ids) if len(ids) else None
            leaves.append(Leaf(leaf_id, box, ids, leader))
            point_leaf[ids] = leaf_id
            depth = max(depth, d)
            continue
        xs = coords[ids, 0]
        ys = coords[ids, 1]
        west = xs < mx
        north = ys >= my
        quads = [
            (_Node(node.x0, my, mx, node.y1), ids[west & north]),    # NW
            (_Node(mx, my, node.x1, node.y1), ids[~west & north]),   # NE
            (_Node(node.x0, node.y0, mx, my), ids[west & ~north]),   # SW
            (_Node(mx, node.y0, node.x1, my), ids[~west & ~north]),  # SE
        ]
        node.children = [child for child, _ in quads]
        for child, child_ids in reversed(quads):
            stack.append((child, child_ids, d + 1))

    return QuadTree(root, root_box, leaves, depth, point_leaf, k)


def _boxes_touch(n: _Node, qx0: float, qy0: float, qx1: float, qy1: float) -> bool:
    return n.x0 <= qx1 and qx0 <= n.x1 and n.y0 <= qy1 and qy0 <= n.y1


def leaf_neighbors(tree: QuadTree, leaf_id: int) -> list[int]:
    """Leaves whose boxes intersect the epsilon-dilated box of the given leaf.

    Includes diagonal (corner-touching) neighbors; excludes the leaf itself.
    """
    box = tree.leaves[leaf_id].box
    eps = NEIGHBOR_EPS_FACTOR * tree.root_box.diagonal
    qx0, qy0 = box.min_x - eps, box.min_y - eps
    qx1, qy1 = box.max_x + eps, box.max_y + eps
    found: list[int] = []
    stack = [tree.root]
    while stack:
        node = stack.pop()
        if not _boxes_touch(node, qx0, qy0, qx1, qy1):
            continue
        if node.children is None:
            if node.leaf_id != leaf_id:
                found.append(node.leaf_id)
        else:
            stack.extend(node.children)
    found.sort()
    return found


class DualGraph:
    """Adjacency over quad-tree leaves; vertices include empty leaves."""

    __slots__ = ("adj", "non_empty")

    def __init__(self, adj: list[list[int]], non_empty: list[bool]):
        self.adj = adj
        self.non_empty = non_empty

    def __len__(self) -> int:
        return len(self.adj)

    def neighbors(self, leaf_id: int) -> list[int]:
        return self.adj[leaf_id]

    def bfs_levels(self, source: int, max_hops: int) -> list[list[int]]:
        """Leaf ids grouped by BFS distance 0..max_hops (empty leaves traversed)."""
        dist = [-1] * len(self.adj)
        dist[source] = 0
        levels: list[list[int]] = [[source]]
        frontier = [source]
        for hop in range(1, max_hops + 1):
            nxt: list[int] = []
            for u in frontier:
                for v in self.adj[u]:
                    if dist[v] < 0:
                        dist[v] = hop
                        nxt.append(v)
            nxt.sort()
            levels.append(nxt)
            frontier = nxt
            if not frontier:
                break
        while len(levels) <= max_hops:
            levels.append([])
        return levels

    def is_connected(self) -> bool:
        if not self.adj:
            return True
        seen = [False] * len(self.adj)
        seen[0] = True
        frontier = [0]
        count = 1
        while frontier:
            nxt = []
            for u in frontier:
                for v in self.adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        count += 1
                        nxt.append(v)
            frontier = nxt
        return count == len(self.adj)

    def diameter(self) -> int:
        """Hop diameter of the leaf graph (leaves are few; all-sources BFS)."""
        best = 0
        for s in range(len(self.adj)):
            dist = [-1] * len(self.adj)
            dist[s] = 0
            frontier = [s]
            while frontier:
                nxt = []
                for u in frontier:
                    for v in self.adj[u]:
                        if dist[v] < 0:
                            dist[v] = dist[u] + 1
                            nxt.append(v)
                frontier = nxt
            best = max(best, max(dist))
        return best


def build_dual_graph(tree: QuadTree) -> DualGraph:
    adj = [leaf_neighbors(tree, leaf.id) for leaf in tree.leaves]
    non_empty = [not leaf.is_empty for leaf in tree.leaves]
    return DualGraph(adj, non_empty)


def leaves_within_hops(g: DualGraph, leaf_id: int, hops: int) -> list[int]:
    """Non-empty leaves at BFS distance exactly `hops` from leaf_id."""
    if hops < 1:
        raise ValueError("hop count must be >= 1")
    levels = g.bfs_levels(leaf_id, hops)
    return [l for l in levels[hops] if g.non_empty[l]]


def leaves_to_csv(tree: QuadTree, path) -> None:
    """Debug dump: one row per leaf."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["leaf_id", "min_x", "min_y", "max_x", "max_y",
                    "point_count", "leader_id"])
        for leaf in tree.leaves:
            w.writerow([leaf.id, leaf.box.min_x, leaf.box.min_y,
                        leaf.box.max_x, leaf.box.max_y, len(leaf.point_ids),
                        leaf.leader if leaf.leader is not None else ""])
