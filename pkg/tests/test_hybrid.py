import math

import numpy as np
import pytest

from spanners.geometry import Graph, PointSet
from spanners.greedy import fg_greedy
from spanners.hybrid import (Bridge, ConstructionRecord, Params,
                             default_params, fast_sparse_spanner,
                             greedy_merge, greedy_merge_light, load_record,
                             save_record)
from spanners.stretch import fast_stretch_factor

from helpers import cluster_points, fw_weights, stretch_oracle, uniform_points


def build(coords, t, k, h=None, t_prime=None, threads=1):
    base = default_params(t, k)
    params = Params(t, t_prime or base.t_prime, k, h or base.h)
    return fast_sparse_spanner(PointSet(coords), params, threads=threads)


# ---------------------------------------------------------------- parameters


def test_default_params_table():
    assert default_params(1.05) == Params(1.05, 1.05, 2500, 6)
    assert default_params(1.1) == Params(1.1, 1.25, 2500, 5)
    assert default_params(1.25) == Params(1.25, 1.25, 2500, 3)
    assert default_params(2.0) == Params(2.0, 2.0, 2500, 1)


def test_default_params_between_table_rows():
    assert default_params(1.07) == Params(1.07, 1.07, 2500, 5)
    assert default_params(1.2) == Params(1.2, 1.25, 2500, 3)
    assert default_params(1.5) == Params(1.5, 1.5, 2500, 1)
    assert default_params(4.0) == Params(4.0, 4.0, 2500, 1)
    assert default_params(1.1, k=800).k == 800


def test_params_validation():
    with pytest.raises(ValueError):
        Params(1.0, 1.5, 100, 1)
    with pytest.raises(ValueError):
        Params(1.5, 1.4, 100, 1)
    with pytest.raises(ValueError):
        Params(1.5, 1.5, 0, 1)
    with pytest.raises(ValueError):
        Params(1.5, 1.5, 100, 0)
    with pytest.raises(ValueError):
        default_params(0.9)


def test_bridge_fields():
    b = Bridge(3, 7, 2.5)
    assert (b.x, b.y, b.length) == (3, 7, 2.5)


# ---------------------------------------------------------------- full builds


def test_single_point_build():
    rec = build(np.array([[5.0, 5.0]]), t=1.5, k=10)
    assert rec.graph.m == 0
    assert len(rec.merged) == 0
    rec.validate()


def test_single_leaf_degenerates_to_greedy():
    coords = uniform_points(80, 0)
    rec = build(coords, t=1.25, k=200)
    ref = fg_greedy(coords, 1.25)
    assert [(u, v) for u, v, _ in rec.graph.edges()] == \
        [(u, v) for u, v, _ in ref.edges()]
    assert len(rec.merged) == 0
    worst, _ = stretch_oracle(rec.graph, coords)
    assert worst <= 1.25 + 1e-9


def test_build_output_is_t_spanner_small():
    for t, seed in [(1.1, 0), (1.5, 1), (2.0, 2)]:
        coords = uniform_points(250, seed)
        rec = build(coords, t=t, k=40)
        worst, pair = stretch_oracle(rec.graph, coords)
        assert worst <= t + 1e-9, (t, seed, worst, pair)
        rec.validate()


def test_build_step_edges_sum_to_m():
    rec = build(uniform_points(400, 5), t=1.25, k=60)
    bs = rec.build_stats
    assert sum(bs.step_edges) == rec.graph.m
    assert bs.step_edges[0] == 0
    assert len(bs.step_edges) == 5
    assert bs.leaf_count >= bs.nonempty_leaves >= 2


def test_merged_pairs_are_unique_and_valid():
    rec = build(uniform_points(500, 6), t=1.25, k=50)
    assert all(a < b for a, b in rec.merged)
    for a, b in rec.merged:
        assert rec.leaders[a] >= 0 and rec.leaders[b] >= 0
    with pytest.raises(ValueError):
        a, b = next(iter(rec.merged))
        greedy_merge(rec, a, b)


def test_h_one_skips_light_merges():
    rec = build(uniform_points(300, 7), t=2.0, k=50, h=1)
    assert rec.build_stats.light.pairs == 0
    assert rec.build_stats.step_edges[4] == 0


def test_larger_h_only_adds_coverage():
    coords = uniform_points(300, 8)
    rec1 = build(coords, t=1.25, k=40, h=1)
    rec3 = build(coords, t=1.25, k=40, h=3)
    assert len(rec3.merged) >= len(rec1.merged)


def test_merge_gives_cross_pairs_t_paths():
    rec = build(uniform_points(350, 9), t=1.2, k=50)
    sp = fw_weights(rec.graph)
    coords = rec.points.coords
    for a, b in sorted(rec.merged):
        pa = rec.leaf_points(a)
        pb = rec.leaf_points(b)
        du = sp[np.ix_(pa, pb)]
        eu = np.hypot(coords[pa, 0][:, None] - coords[pb, 0][None, :],
                      coords[pa, 1][:, None] - coords[pb, 1][None, :])
        assert np.all(du <= 1.2 * eu + 1e-9)


def test_deterministic_across_runs():
    coords = uniform_points(300, 10)
    rec1 = build(coords, t=1.25, k=40)
    rec2 = build(coords, t=1.25, k=40)
    assert [(u, v) for u, v, _ in rec1.graph.edges()] == \
        [(u, v) for u, v, _ in rec2.graph.edges()]
    assert rec1.merged == rec2.merged


def test_parallel_build_keeps_invariants():
    coords = uniform_points(400, 11)
    rec = build(coords, t=1.25, k=50, threads=3)
    rec.validate()
    worst, _ = stretch_oracle(rec.graph, coords)
    assert worst <= 1.25 + 1e-9
    with pytest.raises(ValueError):
        fast_sparse_spanner(PointSet(coords), default_params(1.25), threads=0)


# ------------------------------------------------------- direct merge driving


def singleton_record(coords, t=1.5):
    """Hand-built record: every point its own leaf, empty graph."""
    n = len(coords)
    p = PointSet(coords)
    boxes = np.array([[x - 0.5, y - 0.5, x + 0.5, y + 0.5] for x, y in coords])
    return ConstructionRecord(
        points=p, graph=Graph(p), params=Params(t, t, 1, 1),
        leaf_boxes=boxes, leaders=np.arange(n, dtype=np.int64),
        partition=np.arange(n, dtype=np.int64), merged=set(), recorded_m=0)


def test_merge_two_singletons_adds_the_edge():
    for merge in (greedy_merge, greedy_merge_light):
        rec = singleton_record(np.array([[0.0, 0.0], [10.0, 0.0]]))
        added = merge(rec, 0, 1)
        assert added == 1
        assert rec.graph.has_edge(0, 1)
        assert rec.merged == {(0, 1)}


def test_merge_skips_work_when_leader_edge_covers():
    # leaf 0 = {0}, leaf 1 = {1}; direct edge already present
    rec = singleton_record(np.array([[0.0, 0.0], [10.0, 0.0]]))
    rec.graph.add_edge(0, 1)
    rec.recorded_m = 1
    from spanners.hybrid import StepStats
    stats = StepStats()
    added = greedy_merge(rec, 0, 1, stats=stats)
    assert added == 0
    assert stats.pruned == 1
    assert stats.searched == 0


def test_merge_rejects_bad_pairs():
    rec = singleton_record(np.array([[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]]))
    with pytest.raises(ValueError):
        greedy_merge(rec, 1, 1)
    rec.leaders[2] = -1
    rec.partition[2] = 0  # keep partition pointing at a live leaf
    with pytest.raises(ValueError):
        greedy_merge(rec, 0, 2)


def test_merge_variants_agree_on_coverage():
    # same two clusters, both orders: edge sets may differ but both certify
    coords = cluster_points(30, [(0.0, 0.0), (60.0, 0.0)], seed=12)
    t = 1.1
    for merge in (greedy_merge, greedy_merge_light):
        p = PointSet(coords)
        g = Graph(p)
        left = fg_greedy(coords[:30], t)
        right = fg_greedy(coords[30:], t)
        for u, v, _ in left.edges():
            g.add_edge(u, v)
        for u, v, _ in right.edges():
            g.add_edge(u + 30, v + 30)
        boxes = np.array([[-20.0, -20.0, 20.0, 20.0], [40.0, -20.0, 80.0, 20.0]])
        leaders = np.array([0, 30], dtype=np.int64)
        partition = np.array([0] * 30 + [1] * 30, dtype=np.int64)
        rec = ConstructionRecord(points=p, graph=g, params=Params(t, t, 30, 1),
                                 leaf_boxes=boxes, leaders=leaders,
                                 partition=partition, merged=set(),
                                 recorded_m=g.m)
        merge(rec, 0, 1)
        sp = fw_weights(g)
        eu = np.hypot(coords[:30, 0][:, None] - coords[30:, 0][None, :],
                      coords[:30, 1][:, None] - coords[30:, 1][None, :])
        assert np.all(sp[:30, 30:] <= t * eu + 1e-9), merge.__name__


# ----------------------------------------------------------- record storage


def test_record_roundtrip(tmp_path):
    rec = build(uniform_points(300, 13), t=1.25, k=40)
    path = tmp_path / "rec.bin"
    save_record(rec, path)
    back = load_record(path)
    assert np.array_equal(back.points.coords, rec.points.coords)
    assert [(u, v) for u, v, _ in back.graph.edges()] == \
        [(u, v) for u, v, _ in rec.graph.edges()]
    assert back.params == rec.params
    assert np.array_equal(back.leaf_boxes, rec.leaf_boxes)
    assert np.array_equal(back.leaders, rec.leaders)
    assert np.array_equal(back.partition, rec.partition)
    assert back.merged == rec.merged
    fast_new = fast_stretch_factor(back)
    fast_old = fast_stretch_factor(rec)
    assert fast_new.stretch == fast_old.stretch
    assert fast_new.worst_pair == fast_old.worst_pair


def test_save_rejects_inconsistent_record(tmp_path):
    rec = build(uniform_points(100, 14), t=1.5, k=30)
    rec.graph.add_edge(0, 99)  # record now stale
    with pytest.raises(ValueError):
        save_record(rec, tmp_path / "bad.bin")


def test_load_rejects_corruption(tmp_path):
    rec = build(uniform_points(120, 15), t=1.5, k=30)
    path = tmp_path / "rec.bin"
    save_record(rec, path)
    blob = path.read_bytes()

    truncated = tmp_path / "trunc.bin"
    for cut in (3, 7, 20, len(blob) // 2, len(blob) - 1):
        truncated.write_bytes(blob[:cut])
        with pytest.raises(ValueError):
            load_record(truncated)

    bad_magic = tmp_path / "magic.bin"
    bad_magic.write_bytes(b"NOTREC" + blob[6:])
    with pytest.raises(ValueError, match="magic"):
        load_record(bad_magic)

    bad_version = tmp_path / "ver.bin"
    bad_version.write_bytes(blob[:6] + bytes([250]) + blob[7:])
    with pytest.raises(ValueError, match="version"):
        load_record(bad_version)

    trailing = tmp_path / "tail.bin"
    trailing.write_bytes(blob + b"x")
    with pytest.raises(ValueError, match="trailing"):
        load_record(trailing)


def test_save_files_are_byte_identical_for_same_build(tmp_path):
    coords = uniform_points(200, 16)
    a = tmp_path / "a.bin"
    b = tmp_path / "b.bin"
    save_record(build(coords, t=1.25, k=40), a)
    save_record(build(coords, t=1.25, k=40), b)
    assert a.read_bytes() == b.read_bytes()
