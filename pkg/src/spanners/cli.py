"""Command-line entry point with gen / build / measure / stats / bench.

Exit codes: 0 success, 1 usage error (bad flags or parameter values),
2 runtime error (unreadable files, malformed records, failed runs).
"""

from __future__ import annotations

import argparse
import sys
import time

from . import bench as bench_mod
from .geometry import average_degree, load_graph, save_graph
from .hybrid import Params, default_params, fast_sparse_spanner, load_record, save_record
from .metrics import stats as graph_stats
from .pointgen import (DISTRIBUTIONS, DistributionSpec, generate,
                       load_pointset, save_pointset)
from .stretch import exact_stretch, fast_stretch_factor


class UsageError(ValueError):
    """Bad flag values; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _load_points(args):
    if args.input is not None:
        if args.dist is not None:
            raise UsageError("--input and --dist are mutually exclusive")
        return load_pointset(args.input)
    if args.dist is None:
        raise UsageError("either --input or --dist/--n is required")
    if args.n is None:
        raise UsageError("--dist requires --n")
    try:
        spec = DistributionSpec(args.dist, args.n, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return generate(spec)


def _build_params(args) -> Params:
    try:
        base = default_params(args.t, args.k) if args.k is not None else default_params(args.t)
        h = args.h if args.h is not None else base.h
        t_prime = args.tprime if args.tprime is not None else base.t_prime
        return Params(base.t, t_prime, base.k, h)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cmd_gen(args) -> int:
    try:
        spec = DistributionSpec(args.dist, args.n, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    points = generate(spec)
    save_pointset(points, args.output)
    print(f"wrote {len(points)} points to {args.output}")
    return 0


def _cmd_build(args) -> int:
    params = _build_params(args)
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    points = _load_points(args)
    tick = time.perf_counter()
    rec = fast_sparse_spanner(points, params, threads=args.threads)
    elapsed = time.perf_counter() - tick
    if args.output is not None:
        save_graph(rec.graph, args.output)
    if args.record is not None:
        save_record(rec, args.record)
    print(f"n={rec.graph.n} m={rec.graph.m} "
          f"avg_degree={average_degree(rec.graph):.3f} "
          f"t={params.t:g} t_prime={params.t_prime:g} k={params.k} h={params.h} "
          f"build_s={elapsed:.3f}")
    return 0


def _cmd_measure(args) -> int:
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    tick = time.perf_counter()
    if args.record is not None:
        if args.graph is not None or args.points is not None:
            raise UsageError("--record and --graph/--points are mutually exclusive")
        rec = load_record(args.record)
        report = fast_stretch_factor(rec, threads=args.threads)
    else:
        if args.graph is None or args.points is None:
            raise UsageError("measure needs --record, or --graph and --points")
        points = load_pointset(args.points)
        graph = load_graph(args.graph, points)
        report = exact_stretch(graph, points)
    elapsed = time.perf_counter() - tick
    worst = f"{report.worst_pair[0]} {report.worst_pair[1]}" if report.worst_pair else "-"
    print(f"t_h={report.stretch:.9f} worst_pair={worst} "
          f"pairs={report.pairs_examined} seconds={elapsed:.3f}")
    return 0


def _cmd_stats(args) -> int:
    points = load_pointset(args.points)
    graph = load_graph(args.graph, points)
    st = graph_stats(graph, points, exact_diameter=args.exact_diameter)
    print("n,m,avg_degree,max_degree,diameter,diameter_exact,total_weight")
    print(f"{st.n},{st.m},{st.average_degree:.6f},{st.max_degree},"
          f"{st.diameter:g},{st.diameter_exact},{st.total_weight:.6f}")
    dia = f"{st.diameter:g}" + ("" if st.diameter_exact else " (sampled lower bound)")
    print(f"{st.n} vertices, {st.m} edges, average degree "
          f"{st.average_degree:.3f}, max degree {st.max_degree}, "
          f"hop diameter {dia}, total edge weight {st.total_weight:.3f}")
    return 0


def _cmd_bench(args) -> int:
    if args.config is not None:
        cfg = bench_mod.parse_config(args.config)
    else:
        cfg = bench_mod.BenchConfig()
    if args.dists is not None:
        cfg.dists = [d.strip() for d in args.dists.split(",") if d.strip()]
    if args.ns is not None:
        cfg.ns = [int(v) for v in args.ns.split(",")]
    if args.ts is not None:
        cfg.ts = [float(v) for v in args.ts.split(",")]
    if args.seeds is not None:
        cfg.seeds = [int(v) for v in args.seeds.split(",")]
    if args.threads is not None:
        cfg.threads = [int(v) for v in args.threads.split(",")]
    for dist in cfg.dists:
        if dist not in DISTRIBUTIONS:
            raise UsageError(f"unknown distribution {dist!r}")
    rows = bench_mod.run_sweep(cfg, out_csv=args.out, plots_dir=args.plots)
    failures = sum(1 for r in rows if r.error)
    print(f"{len(rows)} rows ({failures} failed) -> {args.out}")
    return 0 if failures == 0 else 2


def build_parser() -> _Parser:
    parser = _Parser(prog="spanners",
                     description="Euclidean t-spanner construction and measurement")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a synthetic pointset")
    p.add_argument("--dist", required=True, choices=sorted(DISTRIBUTIONS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("build", help="build a spanner")
    p.add_argument("--input", help="pointset file (plain or tsplib)")
    p.add_argument("--dist", choices=sorted(DISTRIBUTIONS))
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t", type=float, required=True, help="stretch target (> 1)")
    p.add_argument("--k", type=int, help="leaf capacity (default 2500)")
    p.add_argument("--h", type=int, help="merge hop radius (default from t)")
    p.add_argument("--tprime", type=float, help="backbone stretch (default from t)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output", help="write the edge list here")
    p.add_argument("--record", help="write the construction record here")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("measure", help="measure stretch")
    p.add_argument("--record", help="construction record (fast path)")
    p.add_argument("--graph", help="edge list (exact oracle path)")
    p.add_argument("--points", help="pointset for --graph")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("stats", help="graph metrics")
    p.add_argument("--graph", required=True)
    p.add_argument("--points", required=True)
    p.add_argument("--exact-diameter", action="store_true")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("bench", help="run a benchmark sweep")
    p.add_argument("--config", help="key = value sweep file")
    p.add_argument("--dists", help="comma list overriding the config")
    p.add_argument("--ns", help="comma list overriding the config")
    p.add_argument("--ts", help="comma list overriding the config")
    p.add_argument("--seeds", help="comma list overriding the config")
    p.add_argument("--threads", help="comma list overriding the config")
    p.add_argument("--out", default="results.csv")
    p.add_argument("--plots", help="directory for SVG charts")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else int(exc.code)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    console_main()
