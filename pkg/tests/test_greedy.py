import math

import numpy as np
import pytest

from spanners.geometry import Graph, PointSet
from spanners.greedy import (GREEDY_SLACK, candidate_pairs, dijkstra_sssp,
                             fg_greedy, path_greedy)

from helpers import fw_weights, ring_points, stretch_oracle, uniform_points


def edge_list(g: Graph):
    return [(u, v) for u, v, _ in g.edges()]


def test_candidate_pairs_order_and_ties():
    # unit square: four side pairs tie at length 1, diagonals at sqrt(2)
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    iu, iv, d = candidate_pairs(coords)
    got = list(zip(iu.tolist(), iv.tolist()))
    assert got[:4] == [(0, 1), (0, 2), (1, 3), (2, 3)]
    assert sorted(got[4:]) == [(0, 3), (1, 2)]
    assert np.all(np.diff(d) >= 0)


def test_rejects_t_not_above_one():
    pts = uniform_points(10, 0)
    for t in (1.0, 0.5, -2.0):
        with pytest.raises(ValueError):
            path_greedy(pts, t)
        with pytest.raises(ValueError):
            fg_greedy(pts, t)


def test_degenerate_sizes():
    single = np.array([[3.0, 4.0]])
    assert path_greedy(single, 1.5).m == 0
    assert fg_greedy(single, 1.5).m == 0
    two = np.array([[0.0, 0.0], [1.0, 1.0]])
    for build in (path_greedy, fg_greedy):
        g = build(two, 1.5)
        assert edge_list(g) == [(0, 1)]


def test_collinear_midpoint_blocks_long_edge():
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    for build in (path_greedy, fg_greedy):
        g = build(coords, 1.000001)
        assert set(edge_list(g)) == {(0, 1), (1, 2)}


def test_fg_matches_path_greedy_exactly():
    cases = [(uniform_points(n, seed), t)
             for n, seed, t in [(40, 0, 1.1), (40, 1, 2.0), (90, 2, 1.5),
                                (90, 3, 1.05), (150, 4, 1.25), (63, 5, 3.0)]]
    # integer grids stress the tie-break rules
    rng = np.random.default_rng(6)
    grid = rng.integers(0, 15, size=(80, 2)).astype(float)
    grid = np.unique(grid, axis=0)
    cases.append((grid, 1.2))
    for coords, t in cases:
        ref = path_greedy(coords, t)
        fast = fg_greedy(coords, t)
        assert edge_list(ref) == edge_list(fast), (len(coords), t)


def test_greedy_output_is_a_t_spanner():
    for seed, t in [(0, 1.1), (1, 1.5), (2, 2.0)]:
        coords = uniform_points(120, seed)
        g = fg_greedy(coords, t)
        worst, _ = stretch_oracle(g, coords)
        assert worst <= t + 1e-9, (seed, t, worst)


def test_greedy_edges_are_all_needed():
    # removing any single edge must push its endpoint pair above t
    coords = uniform_points(60, 8)
    t = 1.4
    g = fg_greedy(coords, t)
    full = fw_weights(g)
    for u, v, w in g.edges():
        pruned = Graph(coords)
        for a, b, _ in g.edges():
            if (a, b) != (u, v):
                pruned.add_edge(a, b)
        alt = fw_weights(pruned)
        assert alt[u, v] > t * w + GREEDY_SLACK * w, (u, v)
        assert full[u, v] == pytest.approx(w)


def test_sparser_for_larger_t():
    coords = uniform_points(150, 9)
    m_by_t = [fg_greedy(coords, t).m for t in (1.05, 1.25, 1.5, 2.0)]
    assert m_by_t == sorted(m_by_t, reverse=True)
    assert m_by_t[-1] >= len(coords) - 1


def test_near_one_t_forces_near_complete_graph_and_retry_path():
    # dense enough to overflow the first edge-array allocation inside the
    # compiled kernel (24n + 64), exercising the grow-and-retry wrapper
    coords = ring_points(60, 3)
    t = 1.0 + 1e-9
    g = fg_greedy(coords, t)
    assert g.m > 24 * 60 + 64
    ref = path_greedy(coords, t)
    assert edge_list(ref) == edge_list(g)


def test_dijkstra_against_matrix_oracle():
    coords = uniform_points(80, 10)
    g = fg_greedy(coords, 1.3)
    want = fw_weights(g)
    for s in (0, 17, 79):
        got = dijkstra_sssp(g, s)
        assert np.allclose(got, want[s], atol=1e-9)


def test_dijkstra_target_and_budget():
    coords = uniform_points(50, 11)
    g = fg_greedy(coords, 1.5)
    want = fw_weights(g)
    assert dijkstra_sssp(g, 3, target=20) == pytest.approx(want[3, 20])
    far = float(want[3].max())
    assert dijkstra_sssp(g, 3, target=int(np.argmax(want[3])),
                         budget=far / 2) == math.inf
    row = dijkstra_sssp(g, 3, budget=far / 2)
    settled = np.isfinite(row)
    assert np.allclose(row[settled], want[3][settled], atol=1e-9)
    with pytest.raises(IndexError):
        dijkstra_sssp(g, 50)
