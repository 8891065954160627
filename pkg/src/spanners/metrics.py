"""Graph quality metrics: average degree, hop diameter, degree and weight
summaries.

The hop diameter is the longest unweighted shortest path. It is computed
exactly (BFS from every vertex) up to a size threshold; beyond that, BFS runs
from a deterministic evenly spaced sample of sources and the result is a
lower bound flagged as approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import dijkstra as _csr_dijkstra

from .geometry import Graph, PointSet, average_degree

EXACT_DIAMETER_LIMIT = 20000
SAMPLE_SOURCES = 512
_BLOCK = 512


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    average_degree: float
    max_degree: int
    diameter: float
    diameter_exact: bool
    total_weight: float


def _eccentricities(g: Graph, sources: np.ndarray):
    """Per-source eccentricity plus the first unreachable (source, target)."""
    csr = g.to_csr()
    out = np.empty(len(sources))
    witness = None
    for i in range(0, len(sources), _BLOCK):
        batch = sources[i:i + _BLOCK]
        hops = np.atleast_2d(_csr_dijkstra(csr, directed=False, indices=batch,
                                           unweighted=True))
        out[i:i + _BLOCK] = hops.max(axis=1)
        if witness is None and math.isinf(out[i:i + _BLOCK].max()):
            r, c = np.argwhere(np.isinf(hops))[0]
            witness = (int(batch[r]), int(c))
    return out, witness


def _diameter(g: Graph, exact_limit: int, sample_sources: int):
    if g.n <= 1:
        return 0.0, True, None
    exact = g.n <= exact_limit
    if exact:
        sources = np.arange(g.n)
    else:
        sources = np.unique(np.linspace(0, g.n - 1, sample_sources).astype(np.int64))
    ecc, witness = _eccentricities(g, sources)
    worst = float(ecc.max())
    if math.isinf(worst):
        return math.inf, True, witness
    return worst, exact, None


def hop_diameter(g: Graph, *, exact_limit: int = EXACT_DIAMETER_LIMIT,
                 sample_sources: int = SAMPLE_SOURCES,
                 with_witness: bool = False):
    """Longest shortest path in hops; inf when disconnected.

    Above exact_limit vertices the value is a sampled lower bound; use
    stats() when the exact/approximate distinction matters. With
    with_witness=True the return is a (value, witness) tuple where witness
    is a vertex pair from different components, or None when connected.
    """
    value, _, witness = _diameter(g, exact_limit, sample_sources)
    return (value, witness) if with_witness else value


def stats(g: Graph, p: PointSet, *, exact_diameter: bool = False) -> GraphStats:
    """All metrics in one pass; exact_diameter forces full-BFS diameter."""
    if g.n != len(p):
        raise ValueError("graph and pointset sizes differ")
    limit = g.n if exact_diameter else EXACT_DIAMETER_LIMIT
    diameter, exact, _ = _diameter(g, limit, SAMPLE_SOURCES)
    max_degree = max((len(nbrs) for nbrs in g.adj), default=0)
    total_weight = float(sum(w for _, _, w in g.edges()))
    return GraphStats(n=g.n, m=g.m, average_degree=average_degree(g),
                      max_degree=max_degree, diameter=diameter,
                      diameter_exact=exact, total_weight=total_weight)
