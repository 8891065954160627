"""Shared test helpers: small independent oracles and input builders.

The shortest-path oracles here are deliberately different code from the
library (dense Floyd-Warshall instead of heap Dijkstra / scipy csgraph) so
library bugs cannot hide behind a shared implementation.
"""

from __future__ import annotations

import numpy as np

from spanners.geometry import Graph


def fw_weights(g: Graph) -> np.ndarray:
    """All-pairs shortest path lengths by Floyd-Warshall. O(n^3), tests only."""
    n = g.n
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for u, v, w in g.edges():
        if w < d[u, v]:
            d[u, v] = d[v, u] = w
    for k in range(n):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    return d


def fw_hops(g: Graph) -> np.ndarray:
    """All-pairs hop counts by Floyd-Warshall over unit weights."""
    n = g.n
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for u, v, _ in g.edges():
        d[u, v] = d[v, u] = 1.0
    for k in range(n):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    return d


def euclid_matrix(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def stretch_oracle(g: Graph, coords: np.ndarray) -> tuple[float, tuple[int, int]]:
    """Worst distance ratio over all pairs, via the Floyd-Warshall oracle."""
    n = len(coords)
    if n < 2:
        return 1.0, (0, 0)
    sp = fw_weights(g)
    eu = euclid_matrix(coords)
    iu, iv = np.triu_indices(n, k=1)
    ratios = sp[iu, iv] / eu[iu, iv]
    worst = int(np.argmax(ratios))
    return float(ratios[worst]), (int(iu[worst]), int(iv[worst]))


def uniform_points(n: int, seed: int, side: float = 1000.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, side, size=(n, 2))


def cluster_points(n_per: int, centers, seed: int, sigma: float = 5.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    parts = [rng.normal(c, sigma, size=(n_per, 2)) for c in centers]
    return np.vstack(parts)


def ring_points(n: int, seed: int, radius: float = 100.0) -> np.ndarray:
    """Jittered circle; forces near-complete greedy spanners for tiny t."""
    rng = np.random.default_rng(seed)
    theta = np.sort(rng.uniform(0.0, 2.0 * np.pi, n))
    r = radius * (1.0 + rng.uniform(-0.01, 0.01, n))
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])
