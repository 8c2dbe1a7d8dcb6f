from __future__ import annotations

import csv
import json

import pytest

from meshsched.cli import RUN_COLUMNS, main


@pytest.fixture
def graph_file(tmp_path):
    net = tmp_path / "net.json"
    paths = tmp_path / "paths.json"
    graph = tmp_path / "g.json"
    assert main(["gen", "--n", "20", "--delta", "4", "--count", "2", "--seed", "5", "--out", str(net)]) == 0
    assert main(["paths", "--net", str(net), "--index", "1", "--groups", "2", "--seed", "5", "--out", str(paths)]) == 0
    assert main(["build", "--net", str(net), "--index", "1", "--paths", str(paths), "--group", "1",
                 "--P", "3", "--out", str(graph)]) == 0
    return graph


def test_pipeline_and_run_rows(graph_file, tmp_path, capsys):
    out = tmp_path / "runs.csv"
    assert main(["run", "--graph", str(graph_file), "--alg", "ser", "--out", str(out)]) == 0
    assert main(["run", "--graph", str(graph_file), "--alg", "sera", "--buffers", "2", "--out", str(out)]) == 0
    assert main(["run", "--graph", str(graph_file), "--mode", "estimate", "--out", str(out)]) == 0
    assert "T = " in capsys.readouterr().out
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == RUN_COLUMNS
    assert [r["alg"] for r in rows] == ["ser", "sera", "ser"]
    assert rows[1]["B"] == "2" and json.loads(rows[1]["m_i"])
    assert rows[2]["t_plus"] and not rows[2]["p"]


def test_run_reports_missing_period(graph_file, capsys):
    assert main(["run", "--graph", str(graph_file), "--max-iters", "1"]) == 2
    assert "PeriodNotFound" in capsys.readouterr().err


def test_oracle_command(tmp_path, capsys):
    from .conftest import chain

    g, _ = chain(3)
    path = tmp_path / "chain.json"
    g.save(path)
    assert main(["oracle", "--graph", str(path), "--lmax", "4"]) == 0
    assert "best T = 1/3" in capsys.readouterr().out


def test_sweep_stats_and_dist(tmp_path):
    cfg = tmp_path / "cfg.json"
    out = tmp_path / "sweep"
    cfg.write_text(json.dumps({
        "n_values": [20], "delta_values": [4], "networks_per_cell": 2, "groups_per_network": 2,
        "p_primes": [0.5, 1.0], "mode": "period",
    }))
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    stats = tmp_path / "stats.csv"
    assert main(["stats", "--in", str(out / "results.csv"), "--group-by", "alg,P", "--out", str(stats)]) == 0
    with open(stats, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [(r["alg"], r["P"]) for r in rows] == [("ser", "5"), ("ser", "10"), ("sera", "5"), ("sera", "10")]
    assert all(r["count"] == "4" for r in rows)
    assert main(["dist", "--dir", str(out)]) == 0
    assert (out / "degree_hist.csv").exists()


def test_dist_without_sweep(tmp_path, capsys):
    assert main(["dist", "--dir", str(tmp_path)]) == 2
    assert "missing artifacts" in capsys.readouterr().err


def test_sweep_needs_output(capsys):
    assert main(["sweep", "--preset", "desk"]) == 2


def test_bad_arguments():
    with pytest.raises(SystemExit):
        main(["run", "--graph", "x.json", "--alg", "tdma"])
