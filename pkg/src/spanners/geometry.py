"""Planar points, bounding boxes, and the Euclidean-weighted graph container.

Everything downstream (quad-tree, greedy spanners, WSPD, merging, stretch
measurement) works on the two types defined here: an immutable ``PointSet``
holding an (n, 2) float64 coordinate array, and a mutable undirected ``Graph``
whose edges carry their Euclidean lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np


class Point(NamedTuple):
    x: float
    y: float


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Euclidean distance between two points (anything indexable as x, y)."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class BoundingBox:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def __post_init__(self) -> None:
        if self.min_x > self.max_x or self.min_y > self.max_y:
            raise ValueError("inverted bounding box")

    @property
    def min_corner(self) -> Point:
        return Point(self.min_x, self.min_y)

    @property
    def max_corner(self) -> Point:
        return Point(self.max_x, self.max_y)

    @property
    def diagonal(self) -> float:
        return math.hypot(self.max_x - self.min_x, self.max_y - self.min_y)

    @classmethod
    def of_coords(cls, coords: np.ndarray) -> "BoundingBox":
        mn = coords.min(axis=0)
        mx = coords.max(axis=0)
        return cls(float(mn[0]), float(mn[1]), float(mx[0]), float(mx[1]))


def dedup_coords(coords: np.ndarray) -> np.ndarray:
    """Drop exact-duplicate rows, keeping the first occurrence order."""
    if len(coords) == 0:
        return coords
    _, first = np.unique(coords, axis=0, return_index=True)
    if len(first) == len(coords):
        return coords
    return coords[np.sort(first)]


class PointSet:
    """Indexed, duplicate-free collection of 2-D points.

    Ids are positions 0..n-1 in the deduplicated first-occurrence order.
    """

    __slots__ = ("coords",)

    def __init__(self, coords, dedup: bool = True):
        arr = np.ascontiguousarray(np.asarray(coords, dtype=np.float64))
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("expected an (n, 2) coordinate array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite coordinate")
        if dedup:
            arr = dedup_coords(arr)
        if len(arr) < 1:
            raise ValueError("pointset must hold at least one point")
        self.coords = arr
        self.coords.setflags(write=False)

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, i: int) -> Point:
        return Point(float(self.coords[i, 0]), float(self.coords[i, 1]))

    def __iter__(self) -> Iterator[Point]:
        for i in range(len(self)):
            yield self[i]

    def bounding_box(self) -> BoundingBox:
        return BoundingBox.of_coords(self.coords)


class Graph:
    """Undirected graph over the ids of a fixed pointset.

    Edge lengths are computed once at insertion (math.hypot of the endpoint
    coordinates) and cached in the adjacency lists. Membership is O(1) expected
    through a set of canonicalized (min id, max id) keys. Mutation must be
    externally serialized; all read-only queries are safe concurrently.
    """

    __slots__ = ("n", "xs", "ys", "adj", "m", "_keys", "_eu", "_ev", "_ew",
                 "_csr", "_csr_m")

    def __init__(self, points: PointSet | np.ndarray):
        coords = points.coords if isinstance(points, PointSet) else np.asarray(points, dtype=np.float64)
        self.n: int = len(coords)
        self.xs: list[float] = coords[:, 0].tolist()
        self.ys: list[float] = coords[:, 1].tolist()
        self.adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        self.m: int = 0
        self._keys: set[int] = set()
        self._eu: list[int] = []
        self._ev: list[int] = []
        self._ew: list[float] = []
        self._csr = None
        self._csr_m = -1

    def _key(self, u: int, v: int) -> int:
        return u * self.n + v if u < v else v * self.n + u

    def add_edge(self, u: int, v: int) -> bool:
        """Insert edge {u, v}; returns False if it was already present."""
        if u == v:
            raise ValueError("self-loop rejected")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise IndexError("vertex id out of range")
        key = self._key(u, v)
        if key in self._keys:
            return False
        w = math.hypot(self.xs[u] - self.xs[v], self.ys[u] - self.ys[v])
        self._keys.add(key)
        self.adj[u].append((v, w))
        self.adj[v].append((u, w))
        self._eu.append(u)
        self._ev.append(v)
        self._ew.append(w)
        self.m += 1
        return True

    def has_edge(self, u: int, v: int) -> bool:
        return self._key(u, v) in self._keys

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Edges in insertion order as (u, v, length)."""
        return zip(self._eu, self._ev, self._ew)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (np.asarray(self._eu, dtype=np.int64),
                np.asarray(self._ev, dtype=np.int64),
                np.asarray(self._ew, dtype=np.float64))

    def to_csr(self):
        """Sparse upper-triangular CSR of the current edges (lazily rebuilt).

        Intended for scipy.sparse.csgraph calls with directed=False.
        """
        from scipy.sparse import csr_matrix

        if self._csr is None or self._csr_m != self.m:
            eu, ev, ew = self.edge_arrays()
            self._csr = csr_matrix((ew, (eu, ev)), shape=(self.n, self.n))
            self._csr_m = self.m
        return self._csr

    def distance_between(self, u: int, v: int) -> float:
        return math.hypot(self.xs[u] - self.xs[v], self.ys[u] - self.ys[v])


def average_degree(g: Graph) -> float:
    """2|E| / |V|."""
    return 2.0 * g.m / g.n


def save_graph(g: Graph, path) -> None:
    """Write the text format: first line ``n m``, then one ``u v`` line per edge."""
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v, _ in g.edges():
            a, b = (u, v) if u < v else (v, u)
            fh.write(f"{a} {b}\n")


def load_graph(path, points: PointSet) -> Graph:
    """Read the text format back; edge lengths recomputed from the pointset."""
    g = Graph(points)
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: malformed header")
        n, m = int(header[0]), int(header[1])
        if n != g.n:
            raise ValueError(f"{path}: graph has {n} vertices, pointset has {g.n}")
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: malformed edge line")
            g.add_edge(int(parts[0]), int(parts[1]))
    if g.m != m:
        raise ValueError(f"{path}: header claims {m} edges, found {g.m}")
    return g
