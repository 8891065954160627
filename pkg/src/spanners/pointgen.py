"""Synthetic pointset generators and file ingestion.

Seven named distributions cover the benchmark shapes: uniform square, normal
clusters, random grid points, annulus, spiral galaxy, convex position, and
five spokes. Generation is deterministic per (name, n, seed) via numpy's
seeded PCG64 generator; exact duplicate coordinates are resampled so every
pointset holds exactly n distinct points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import PointSet, dedup_coords

_FIVE = 5
_SQUARE_SIDE = 1000.0
_ANNULUS_INNER = 400.0
_ANNULUS_OUTER = 500.0
_SPOKE_LENGTH = 500.0
_GALAXY_BASE = 5.0
_GALAXY_WIND = 0.4887
_GALAXY_SWEEP = 3.0 * math.pi

# Expected gap between neighboring cluster centers. Centers land uniformly in
# a square sized so that sqrt(n) clusters keep this average spacing at any n.
# With sigma = 2.0 point scatter the lumps stay visible as density peaks while
# their tails overlap, so the union has no wide interior voids.
_CLUSTER_SPACING = 6.0


@dataclass(frozen=True)
class DistributionSpec:
    name: str
    n: int
    seed: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.name not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.name!r}; "
                             f"expected one of {', '.join(sorted(DISTRIBUTIONS))}")


def _uni_square(count: int, rng: np.random.Generator, n_total: int) -> np.ndarray:
    return rng.uniform(0.0, _SQUARE_SIDE, size=(count, 2))


def _normal_clustered(count: int, rng: np.random.Generator, n_total: int) -> np.ndarray:
    clusters = math.isqrt(n_total)
    if clusters * clusters < n_total:
        clusters += 1
    per = clusters
    side = _CLUSTER_SPACING * math.sqrt(clusters)
    centers = rng.uniform(0.0, side, size=(clusters, 2))
    pts = np.repeat(centers, per, axis=0)
    pts = pts + rng.normal(2.0, 2.0, size=pts.shape)
    return pts[:count]


def _grid_random(count: int, rng: np.random.Generator, n_total: int) -> np.ndarray:
    side = math.ceil(0.7 * n_total)
    capacity = side * side
    if capacity < n_total:
        raise ValueError(f"grid of side {side} cannot hold {n_total} points")
    cells = rng.integers(0, capacity, size=count)
    return np.column_stack((cells // side, cells % side)).astype(np.float64)


def _annulus(count: int, rng: np.random.Generator, n_total: int) -> np.ndarray:
    r = np.sqrt(rng.uniform(_ANNULUS_INNER ** 2, _ANNULUS_OUTER ** 2, size=count))
    theta = rng.uniform(0.0, 2.0 * math.pi, size=count)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def _galaxy(count: int, rng: np.random.Generator, n_total: int) -> np.ndarray:
    arm = rng.integers(0, _FIVE, size=count)
    theta = rng.uniform(0.0, _GALAXY_SWEEP, size=count)
    radius = _GALAXY_BASE * np.exp(_GALAXY_WIND * theta)
    radius = radius * (1.0 + rng.normal(0.0, 0.03, size=count))
    angle = theta + arm * (2.0 * math.pi / _FIVE) + rng.normal(0.0, 0.25, size=count)
    return np.column_stack((radius * np.cos(angle), radius * np.sin(angle)))


def _spokes(count: int, rng: np.random.Generator, n_total: int) -> np.ndarray:
    arm = rng.integers(0, _FIVE, size=count)
    pos = rng.uniform(0.0, _SPOKE_LENGTH, size=count)
    off = rng.normal(0.0, 0.005 * _SPOKE_LENGTH, size=count)
    angle = arm * (2.0 * math.pi / _FIVE)
    ca = np.cos(angle)
    sa = np.sin(angle)
    return np.column_stack((pos * ca - off * sa, pos * sa + off * ca))


def _convex_polygon(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random n points in convex position (Valtr's construction)."""
    if n == 1:
        return rng.uniform(0.0, _SQUARE_SIDE, size=(1, 2))
    if n == 2:
        return rng.uniform(0.0, _SQUARE_SIDE, size=(2, 2))

    def _deltas(vals: np.ndarray) -> np.ndarray:
        vals = np.sort(vals)
        lo, hi = vals[0], vals[-1]
        interior = vals[1:-1]
        pick = rng.integers(0, 2, size=len(interior)).astype(bool)
        up = np.concatenate(([lo], interior[pick], [hi]))
        down = np.concatenate(([lo], interior[~pick], [hi]))
        return np.concatenate((np.diff(up), -np.diff(down)))

    dx = _deltas(rng.uniform(0.0, _SQUARE_SIDE, size=n))
    dy = _deltas(rng.uniform(0.0, _SQUARE_SIDE, size=n))
    rng.shuffle(dy)
    order = np.argsort(np.arctan2(dy, dx))
    pts = np.column_stack((np.cumsum(dx[order]), np.cumsum(dy[order])))
    return pts - pts.min(axis=0)


def _generate_convex(spec: DistributionSpec) -> PointSet:
    # topping up would break convex position, so regenerate whole sets until
    # the (measure-zero) duplicate or collinearity cases disappear
    rng = np.random.default_rng(spec.seed)
    while True:
        pts = _convex_polygon(spec.n, rng)
        if len(dedup_coords(pts)) < spec.n:
            continue
        if spec.n >= 3 and not _strictly_convex(pts):
            continue
        return PointSet(pts)


def _strictly_convex(pts: np.ndarray) -> bool:
    nxt = np.roll(pts, -1, axis=0)
    prv = np.roll(pts, 1, axis=0)
    cross = ((pts[:, 0] - prv[:, 0]) * (nxt[:, 1] - pts[:, 1])
             - (pts[:, 1] - prv[:, 1]) * (nxt[:, 0] - pts[:, 0]))
    return bool(np.all(cross > 0.0) or np.all(cross < 0.0))


DISTRIBUTIONS = {
    "uni-square": _uni_square,
    "normal-clustered": _normal_clustered,
    "grid-random": _grid_random,
    "annulus": _annulus,
    "galaxy": _galaxy,
    "convex": _convex_polygon,  # handled specially in generate()
    "spokes": _spokes,
}


def generate(spec: DistributionSpec) -> PointSet:
    """Exactly spec.n distinct points, deterministic for a given spec."""
    if spec.name == "convex":
        return _generate_convex(spec)
    sampler = DISTRIBUTIONS[spec.name]
    rng = np.random.default_rng(spec.seed)
    pts = dedup_coords(sampler(spec.n, rng, spec.n))
    while len(pts) < spec.n:
        extra = sampler(spec.n - len(pts), rng, spec.n)
        pts = dedup_coords(np.vstack((pts, extra)))
    return PointSet(pts[:spec.n])


def save_pointset(p: PointSet, path) -> None:
    """One `x y` line per point, full float precision."""
    with open(path, "w") as fh:
        for x, y in p.coords:
            fh.write(f"{float(x)!r} {float(y)!r}\n")


def _parse_plain(path, lines) -> np.ndarray:
    coords: list[tuple[float, float]] = []
    for lineno, line in enumerate(lines, start=1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'x y'")
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: malformed coordinate") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"{path}:{lineno}: non-finite coordinate")
        coords.append((x, y))
    if not coords:
        raise ValueError(f"{path}: no points found")
    return np.asarray(coords, dtype=np.float64)


def _parse_tsplib(path, lines) -> np.ndarray:
    coords: list[tuple[float, float]] = []
    in_section = False
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not in_section:
            if stripped.upper().startswith("NODE_COORD_SECTION"):
                in_section = True
            continue
        if not stripped or stripped.upper() == "EOF":
            break
        parts = stripped.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'id x y'")
        try:
            x, y = float(parts[1]), float(parts[2])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: malformed coordinate") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"{path}:{lineno}: non-finite coordinate")
        coords.append((x, y))
    if not in_section:
        raise ValueError(f"{path}: NODE_COORD_SECTION not found")
    if not coords:
        raise ValueError(f"{path}: no points found")
    return np.asarray(coords, dtype=np.float64)


def load_pointset(path, fmt: str = "auto") -> PointSet:
    """Read a pointset file; duplicates dropped keeping first occurrence.

    plain: whitespace-separated `x y` lines (# comments allowed).
    tsplib: NODE_COORD_SECTION with `id x y` rows.
    auto: tsplib when the file mentions NODE_COORD_SECTION, else plain.
    """
    if fmt not in ("auto", "plain", "tsplib"):
        raise ValueError(f"unknown pointset format {fmt!r}")
    text = Path(path).read_text()
    lines = text.splitlines()
    if fmt == "auto":
        fmt = "tsplib" if any("NODE_COORD_SECTION" in ln for ln in lines[:200]) else "plain"
    coords = _parse_tsplib(path, lines) if fmt == "tsplib" else _parse_plain(path, lines)
    return PointSet(coords)
