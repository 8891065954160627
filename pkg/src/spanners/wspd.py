"""Well-separated pair decomposition and the WSPD spanner.

Built on a fair-split tree: each node owns a contiguous slice of a permuted
index array, splitting on the axis of greater box extent at the box midpoint.
Two nodes are well-separated w.r.t. s when congruent disks enclosing their
boxes (center = box center, radius = half diagonal, common radius = the larger
of the two) can be placed at distance >= s times the radius; we test the
standard conservative surrogate: center distance >= (s+2) * radius.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import Graph, PointSet


def separation_ratio(t: float) -> float:
    """s = 4(t+1)/(t-1): the separation that makes one edge per pair a t-spanner."""
    if t <= 1:
        raise ValueError("t must exceed 1")
    return 4.0 * (t + 1.0) / (t - 1.0)


class SplitNode:
    __slots__ = ("lo", "hi", "cx", "cy", "radius", "rep", "left", "right")

    def __init__(self, lo: int, hi: int, box: tuple[float, float, float, float],
                 rep: int):
        self.lo = lo
        self.hi = hi
        x0, y0, x1, y1 = box
        self.cx = (x0 + x1) / 2.0
        self.cy = (y0 + y1) / 2.0
        self.radius = math.hypot(x1 - x0, y1 - y0) / 2.0
        self.rep = rep
        self.left: SplitNode | None = None
        self.right: SplitNode | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def size(self) -> int:
        return self.hi - self.lo


class SplitTree:
    __slots__ = ("root", "idx")

    def __init__(self, root: SplitNode, idx: np.ndarray):
        self.root = root
        self.idx = idx

    def subset(self, node: SplitNode) -> np.ndarray:
        """Point ids owned by a node (a view into the permuted index array)."""
        return self.idx[node.lo:node.hi]


def build_split_tree(coords: np.ndarray) -> SplitTree:
    n = len(coords)
    idx = np.arange(n, dtype=np.int64)

    def make_node(lo: int, hi: int) -> SplitNode:
        sub = coords[idx[lo:hi]]
        mn = sub.min(axis=0)
        mx = sub.max(axis=0)
        return SplitNode(lo, hi, (float(mn[0]), float(mn[1]), float(mx[0]), float(mx[1])),
                         int(idx[lo:hi].min()))

    root = make_node(0, n)
    stack = [root]
    while stack:
        node = stack.pop()
        lo, hi = node.lo, node.hi
        if hi - lo <= 1:
            continue
        sub = coords[idx[lo:hi]]
        ext = sub.max(axis=0) - sub.min(axis=0)
        axis = 0 if ext[0] >= ext[1] else 1
        vals = sub[:, axis]
        mid = (vals.min() + vals.max()) / 2.0
        mask = vals < mid
        nl = int(mask.sum())
        if nl == 0 or nl == hi - lo:
            # fp-degenerate extent: fall back to a median split by (value, id)
            order = np.lexsort((idx[lo:hi], vals))
            idx[lo:hi] = idx[lo:hi][order]
            nl = (hi - lo) // 2
        else:
            part = idx[lo:hi]
            idx[lo:hi] = np.concatenate((part[mask], part[~mask]))
        node.left = make_node(lo, lo + nl)
        node.right = make_node(lo + nl, hi)
        stack.append(node.left)
        stack.append(node.right)
    return SplitTree(root, idx)


class WspdPair:
    __slots__ = ("a", "b")

    def __init__(self, a: SplitNode, b: SplitNode):
        self.a = a
        self.b = b

    @property
    def rep_a(self) -> int:
        return self.a.rep

    @property
    def rep_b(self) -> int:
        return self.b.rep


class Wspd:
    __slots__ = ("tree", "pairs", "s")

    def __init__(self, tree: SplitTree | None, pairs: list[WspdPair], s: float):
        self.tree = tree
        self.pairs = pairs
        self.s = s

    def __len__(self) -> int:
        return len(self.pairs)


def _well_separated(a: SplitNode, b: SplitNode, s: float) -> bool:
    r = max(a.radius, b.radius)
    return math.hypot(a.cx - b.cx, a.cy - b.cy) >= (s + 2.0) * r


def build_wspd(p: PointSet | np.ndarray, s: float) -> Wspd:
    """Decompose all point pairs into well-separated node pairs.

    Every unordered pair of distinct points lands in exactly one emitted pair.
    n < 2 yields an empty decomposition.
    """
    if s <= 0:
        raise ValueError("separation ratio must be positive")
    coords = p.coords if isinstance(p, PointSet) else np.asarray(p, dtype=np.float64)
    if len(coords) < 2:
        return Wspd(None, [], s)
    tree = build_split_tree(coords)
    pairs: list[WspdPair] = []

    internal = [tree.root]
    while internal:
        node = internal.pop()
        if node.is_leaf:
            continue
        internal.append(node.left)
        internal.append(node.right)
        work = [(node.left, node.right)]
        while work:
            a, b = work.pop()
            if _well_separated(a, b, s):
                pairs.append(WspdPair(a, b))
                continue
            # split the node with the larger enclosing disk (leaves never split:
            # two singletons are always well-separated)
            if b.is_leaf or (not a.is_leaf and a.radius >= b.radius):
                work.append((a.left, b))
                work.append((a.right, b))
            else:
                work.append((a, b.left))
                work.append((a, b.right))
    return Wspd(tree, pairs, s)


def wspd_spanner(p: PointSet | np.ndarray, t_prime: float) -> Graph:
    """One edge per WSPD pair between subset representatives (lowest ids).

    With s = 4(t'+1)/(t'-1) the result is a t'-spanner.
    """
    if t_prime <= 1:
        raise ValueError("t' must exceed 1")
    coords = p.coords if isinstance(p, PointSet) else np.asarray(p, dtype=np.float64)
    g = Graph(coords)
    w = build_wspd(coords, separation_ratio(t_prime))
    for pair in w.pairs:
        g.add_edge(pair.rep_a, pair.rep_b)
    return g
