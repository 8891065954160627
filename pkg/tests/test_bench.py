import csv
import math

import pytest

from spanners import bench
from spanners.bench import (CSV_HEADER, BenchConfig, BenchRow, parse_config,
                            run_cell, run_sweep, write_csv, write_plots)
from spanners.stretch import StretchReport


def small_cfg(**overrides):
    cfg = BenchConfig(dists=["uni-square"], ns=[200], ts=[1.5], seeds=[0],
                      threads=[1], k=60)
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


def test_parse_config_full(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text(
        "# sweep over two shapes\n"
        "dists = uni-square , annulus\n"
        "ns = 500, 1000\n"
        "ts = 1.1, 2\n"
        "seeds = 3\n"
        "threads = 1, 2\n"
        "k = 250\n"
        "h = 2  # override\n"
        "t_prime = 1.6\n"
        "\n")
    cfg = parse_config(path)
    assert cfg.dists == ["uni-square", "annulus"]
    assert cfg.ns == [500, 1000]
    assert cfg.ts == [1.1, 2.0]
    assert cfg.seeds == [3]
    assert cfg.threads == [1, 2]
    assert (cfg.k, cfg.h, cfg.t_prime) == (250, 2, 1.6)
    assert len(list(cfg.cells())) == 2 * 2 * 2 * 1 * 2


def test_parse_config_errors(tmp_path):
    cases = [
        ("wat = 3\n", "unknown key"),
        ("ns\n", "key = value"),
        ("ns = ,\n", "empty list"),
        ("ns = five\n", "five"),
    ]
    for body, needle in cases:
        path = tmp_path / "bad.cfg"
        path.write_text(body)
        with pytest.raises(ValueError, match=needle):
            parse_config(path)
        with pytest.raises(ValueError, match=":1:"):
            parse_config(path)


def test_cells_iterate_dist_major():
    cfg = BenchConfig(dists=["a", "b"], ns=[1, 2], ts=[1.5], seeds=[0],
                      threads=[1])
    got = list(cfg.cells())
    assert got == [("a", 1, 1.5, 0, 1), ("a", 2, 1.5, 0, 1),
                   ("b", 1, 1.5, 0, 1), ("b", 2, 1.5, 0, 1)]


def test_run_cell_success_row():
    cfg = small_cfg()
    row = run_cell("uni-square", 200, 1.5, 0, 1, cfg)
    assert row.error == ""
    assert row.t_h <= 1.5 + 1e-9
    assert row.build_ms > 0
    total = (row.edges_step2 + row.edges_step3 + row.edges_step4
             + row.edges_step5)
    assert total == round(row.avg_degree * row.n / 2)
    assert math.isnan(row.greedy_rate) or 0.0 <= row.greedy_rate <= 1.0
    assert row.k == 60 and row.threads == 1


def test_run_cell_failure_is_captured_not_raised():
    cfg = small_cfg()
    row = run_cell("nosuch-shape", 200, 1.5, 0, 1, cfg)
    assert row.error != ""
    assert "nosuch-shape" in row.error or "distribution" in row.error
    assert math.isnan(row.build_ms)


def test_sweep_continues_past_failures(tmp_path):
    cfg = small_cfg(dists=["nosuch-shape", "uni-square"], ns=[150])
    out = tmp_path / "res.csv"
    rows = run_sweep(cfg, out_csv=out, plots_dir=tmp_path / "plots")
    assert len(rows) == 2
    assert rows[0].error and not rows[1].error
    with open(out) as fh:
        table = list(csv.reader(fh))
    assert table[0] == CSV_HEADER
    assert len(table) == 3
    assert (tmp_path / "plots" / "build_time.svg").exists()
    assert (tmp_path / "plots" / "avg_degree.svg").exists()


def test_stretch_overrun_is_loud(monkeypatch, capsys):
    cfg = small_cfg(ns=[120])

    def fake_measure(rec, threads=1):
        return StretchReport(stretch=9.9)

    monkeypatch.setattr(bench, "fast_stretch_factor", fake_measure)
    row = run_cell("uni-square", 120, 1.5, 0, 1, cfg)
    assert row.t_h == 9.9
    assert row.error == ""
    assert "exceeds the target" in capsys.readouterr().err


def test_write_csv_roundtrips_values(tmp_path):
    row = BenchRow(dist="annulus", n=12, seed=4, t=1.25)
    path = tmp_path / "one.csv"
    write_csv([row], path)
    with open(path) as fh:
        table = list(csv.reader(fh))
    assert table[1][0] == "annulus"
    assert table[1][:4] == ["annulus", "12", "4", "1.25"]
    assert len(table[1]) == len(CSV_HEADER)


def test_plots_with_no_usable_rows(tmp_path):
    rows = [BenchRow(dist="x", n=1, seed=0, t=1.5, error="boom")]
    write_plots(rows, tmp_path)
    body = (tmp_path / "build_time.svg").read_text()
    assert "no data" in body


def test_cell_params_respect_overrides():
    cfg = small_cfg(h=4, t_prime=1.9)
    row = run_cell("uni-square", 50, 1.5, 1, 1, cfg)
    assert row.h == 4
    assert row.t_prime == 1.9
    bad = small_cfg(t_prime=1.2)  # below t, must surface as a cell error
    row = run_cell("uni-square", 50, 1.5, 1, 1, bad)
    assert row.error != ""
