"""Benchmark sweeps over (distribution, n, t, seed, threads) grids.

Each cell generates a pointset, times the spanner build (construction only;
generation and measurement excluded), measures the stretch from the record,
and emits one CSV row. A cell failure becomes a row with the error column set
and the sweep continues. Rows whose measured stretch exceeds the target are
reported loudly on stderr; they indicate the hop radius was too small for the
shape, which is expected behavior worth surfacing rather than hiding.

The config file is plain `key = value` lines with comma-separated lists, for
example:

    dists = uni-square, annulus
    ns = 1000, 2000
    ts = 1.1, 2
    seeds = 1, 2, 3
    threads = 1
    k = 2500
"""

from __future__ import annotations

import csv
import math
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from .geometry import average_degree
from .hybrid import Params, default_params, fast_sparse_spanner
from .metrics import hop_diameter
from .pointgen import DistributionSpec, generate
from .stretch import fast_stretch_factor

CSV_HEADER = ["dist", "n", "seed", "t", "t_prime", "k", "h", "threads",
              "build_ms", "t_h", "avg_degree", "diameter",
              "edges_step2", "edges_step3", "edges_step4", "edges_step5",
              "greedy_rate", "astar_calls", "error"]


@dataclass
class BenchConfig:
    dists: list[str] = field(default_factory=lambda: ["uni-square"])
    ns: list[int] = field(default_factory=lambda: [1000])
    ts: list[float] = field(default_factory=lambda: [1.1])
    seeds: list[int] = field(default_factory=lambda: [1])
    threads: list[int] = field(default_factory=lambda: [1])
    k: Optional[int] = None
    h: Optional[int] = None
    t_prime: Optional[float] = None

    def cells(self):
        for dist in self.dists:
            for n in self.ns:
                for t in self.ts:
                    for seed in self.seeds:
                        for workers in self.threads:
                            yield dist, n, t, seed, workers


@dataclass
class BenchRow:
    dist: str
    n: int
    seed: int
    t: float
    t_prime: float = math.nan
    k: int = 0
    h: int = 0
    threads: int = 1
    build_ms: float = math.nan
    t_h: float = math.nan
    avg_degree: float = math.nan
    diameter: float = math.nan
    edges_step2: int = 0
    edges_step3: int = 0
    edges_step4: int = 0
    edges_step5: int = 0
    greedy_rate: float = math.nan
    astar_calls: int = 0
    error: str = ""

    def as_list(self) -> list:
        return [getattr(self, f.name) for f in fields(self)]


_LIST_KEYS = {"dists": str, "ns": int, "ts": float, "seeds": int, "threads": int}
_SCALAR_KEYS = {"k": int, "h": int, "t_prime": float}


def parse_config(path) -> BenchConfig:
    """Parse the key = value sweep file; unknown keys are rejected."""
    cfg = BenchConfig()
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key in _LIST_KEYS:
                conv = _LIST_KEYS[key]
                items = [conv(item.strip()) for item in value.split(",") if item.strip()]
                if not items:
                    raise ValueError("empty list")
                setattr(cfg, key, items)
            elif key in _SCALAR_KEYS:
                setattr(cfg, key, _SCALAR_KEYS[key](value))
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    return cfg


def _cell_params(cfg: BenchConfig, t: float) -> Params:
    base = default_params(t) if cfg.k is None else default_params(t, cfg.k)
    h = cfg.h if cfg.h is not None else base.h
    t_prime = cfg.t_prime if cfg.t_prime is not None else base.t_prime
    return Params(base.t, t_prime, base.k, h)


def run_cell(dist: str, n: int, t: float, seed: int, workers: int,
             cfg: BenchConfig) -> BenchRow:
    row = BenchRow(dist=dist, n=n, seed=seed, t=t, threads=workers)
    try:
        params = _cell_params(cfg, t)
        row.t_prime, row.k, row.h = params.t_prime, params.k, params.h
        points = generate(DistributionSpec(dist, n, seed))
        tick = time.perf_counter()
        rec = fast_sparse_spanner(points, params, threads=workers)
        row.build_ms = (time.perf_counter() - tick) * 1000.0
        report = fast_stretch_factor(rec, threads=workers)
        row.t_h = report.stretch
        row.avg_degree = average_degree(rec.graph)
        row.diameter = hop_diameter(rec.graph)
        bs = rec.build_stats
        row.edges_step2, row.edges_step3, row.edges_step4, row.edges_step5 = \
            bs.step_edges[1], bs.step_edges[2], bs.step_edges[3], bs.step_edges[4]
        searched = bs.merge.searched + bs.light.searched
        hits = bs.merge.greedy_hits + bs.light.greedy_hits
        row.greedy_rate = hits / searched if searched else math.nan
        row.astar_calls = bs.merge.astar_calls + bs.light.astar_calls
        if row.t_h > t:
            print(f"WARNING: {dist} n={n} seed={seed} t={t}: measured stretch "
                  f"{row.t_h:.6f} exceeds the target", file=sys.stderr)
    except Exception as exc:
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def run_sweep(cfg: BenchConfig, out_csv=None, plots_dir=None) -> list[BenchRow]:
    """One row per cell; CSV written when out_csv given, SVGs when plots_dir."""
    rows = [run_cell(dist, n, t, seed, workers, cfg)
            for dist, n, t, seed, workers in cfg.cells()]
    if out_csv is not None:
        write_csv(rows, out_csv)
    if plots_dir is not None:
        write_plots(rows, plots_dir)
    return rows


def write_csv(rows: list[BenchRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.as_list())


def _svg_line_chart(series: dict[str, list[tuple[float, float]]],
                    title: str, x_label: str, y_label: str) -> str:
    width, height, pad = 640, 420, 60
    pts = [p for s in series.values() for p in s]
    if not pts:
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
                f'height="{height}"><text x="20" y="40">{title}: no data</text></svg>')
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x: float) -> float:
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y: float) -> float:
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
               "#8c564b", "#17becf"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<text x="{width/2:.0f}" y="24" text-anchor="middle" '
             f'font-size="16">{title}</text>',
             f'<line x1="{pad}" y1="{height-pad}" x2="{width-pad}" '
             f'y2="{height-pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height-pad}" '
             f'stroke="black"/>',
             f'<text x="{width/2:.0f}" y="{height-16}" text-anchor="middle" '
             f'font-size="12">{x_label}</text>',
             f'<text x="18" y="{height/2:.0f}" font-size="12" '
             f'transform="rotate(-90 18 {height/2:.0f})" '
             f'text-anchor="middle">{y_label}</text>']
    for i, (name, data) in enumerate(sorted(series.items())):
        color = palette[i % len(palette)]
        data = sorted(data)
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in data)
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        for x, y in data:
            parts.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" '
                         f'fill="{color}"/>')
        parts.append(f'<text x="{width-pad+6}" y="{pad + 16*i}" font-size="11" '
                     f'fill="{color}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def write_plots(rows: list[BenchRow], plots_dir) -> None:
    """time-vs-n and degree-vs-n charts, one series per (dist, t)."""
    out = Path(plots_dir)
    out.mkdir(parents=True, exist_ok=True)
    ok_rows = [r for r in rows if not r.error]
    times: dict[str, list[tuple[float, float]]] = {}
    degrees: dict[str, list[tuple[float, float]]] = {}
    for r in ok_rows:
        key = f"{r.dist} t={r.t:g}"
        times.setdefault(key, []).append((r.n, r.build_ms))
        degrees.setdefault(key, []).append((r.n, r.avg_degree))
    (out / "build_time.svg").write_text(
        _svg_line_chart(times, "Build time", "points", "milliseconds"))
    (out / "avg_degree.svg").write_text(
        _svg_line_chart(degrees, "Average degree", "points", "degree"))
