"""Sparse low-stretch geometric graphs: construction and verification."""

from .geometry import (BoundingBox, Graph, Point, PointSet, average_degree,
                       distance, load_graph, save_graph)
from .greedy import fg_greedy, path_greedy
from .hybrid import (Bridge, ConstructionRecord, Params, default_params,
                     fast_sparse_spanner, greedy_merge, greedy_merge_light,
                     load_record, save_record)
from .metrics import GraphStats, hop_diameter, stats
from .pointgen import (DISTRIBUTIONS, DistributionSpec, generate,
                       load_pointset, save_pointset)
from .quadtree import DualGraph, QuadTree, build_dual_graph, build_quadtree
from .stretch import StretchReport, exact_stretch, fast_stretch_factor
from .wspd import Wspd, build_wspd, separation_ratio, wspd_spanner

__all__ = [
    "BoundingBox",
    "Bridge",
    "ConstructionRecord",
    "DISTRIBUTIONS",
    "DistributionSpec",
    "DualGraph",
    "Graph",
    "GraphStats",
    "Params",
    "Point",
    "PointSet",
    "QuadTree",
    "StretchReport",
    "Wspd",
    "average_degree",
    "build_dual_graph",
    "build_quadtree",
    "build_wspd",
    "default_params",
    "distance",
    "exact_stretch",
    "fast_sparse_spanner",
    "fast_stretch_factor",
    "fg_greedy",
    "generate",
    "greedy_merge",
    "greedy_merge_light",
    "hop_diameter",
    "load_graph",
    "load_pointset",
    "load_record",
    "path_greedy",
    "save_graph",
    "save_pointset",
    "save_record",
    "separation_ratio",
    "stats",
    "wspd_spanner",
]

__version__ = "0.1.0"
