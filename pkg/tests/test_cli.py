import csv
import json

import numpy as np
import pytest

from demonscatter.cli import main

PAPER_FLAGS = [
    "--b", "165.874", "--c", "103.876", "--x0", "0.16455", "--delta", "91.211",
]


def run(argv):
    return main(argv)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_scatter_free_particle(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc = run(["scatter", "--b", "0", "--c", "0", "--delta", "1",
              "--n", "501", "--v", "8"])
    assert rc == 0
    rows = read_csv(tmp_path / "demon_report.csv")
    assert abs(float(rows[0]["D"])) < 1e-8


def test_scatter_paper_model(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc = run(["scatter"] + PAPER_FLAGS + ["--v", "8"])
    assert rc == 0
    rows = read_csv(tmp_path / "demon_report.csv")
    assert float(rows[0]["D"]) == pytest.approx(0.5, abs=0.02)
    doc = json.loads((tmp_path / "smatrix.json").read_text())
    assert doc["n_open"] == 2


def test_scatter_missing_model(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(["scatter", "--model", "nope.json"]) == 2


def test_unknown_config_key(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"resolution": 11, "bogus": 1}')
    assert run(["regions", "--config", str(cfg)]) == 2


def test_kernel_paper_peak_location(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc = run(["kernel"] + PAPER_FLAGS + ["--v", "8", "--n", "241"])
    assert rc == 0
    rows = read_csv(tmp_path / "kernel.csv")
    best = max(rows, key=lambda r: float(r["absK"]))
    assert float(best["x"]) == pytest.approx(0.16455, abs=0.05)
    assert float(best["y"]) == pytest.approx(0.16455, abs=0.05)


def test_kernel_zero_profile(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc = run(["kernel", "--b", "0", "--c", "0", "--delta", "1", "--n", "41"])
    assert rc == 0
    rows = read_csv(tmp_path / "kernel.csv")
    assert all(float(r["absK"]) == 0.0 for r in rows)


def test_kernel_q_zero_exit_code(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc = run(["kernel"] + PAPER_FLAGS[:6] + ["--delta", "-32", "--v", "8",
              "--n", "41"])
    assert rc == 3


def test_regions(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc = run(["regions", "--resolution", "21"])
    assert rc == 0
    rows = read_csv(tmp_path / "regions.csv")
    for r in rows:
        assert float(r["rt2"]) <= 1.0 - float(r["t2"]) + 1e-12
    pts = {(float(r["t2"]), float(r["rt2"])): r for r in rows}
    assert float(pts[(1.0, 0.0)]["lower"]) == 1.0
    assert float(pts[(1.0, 0.0)]["upper"]) == 1.0
    assert float(pts[(0.0, 1.0)]["lower"]) == 0.0
    assert float(pts[(0.0, 1.0)]["upper"]) == 0.0


def test_regions_bad_resolution(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(["regions", "--resolution", "1"]) == 2


def test_classify_paper_kernel(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc = run(["classify"] + PAPER_FLAGS + ["--n", "601"])
    assert rc == 0
    doc = json.loads((tmp_path / "symmetry.json").read_text())
    assert doc["trivial_only"]
    satisfied = [n for n, v in doc["classes"].items() if v["verdict"]]
    assert satisfied == ["Trivial"]


def test_sweep_free_particle(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc = run(["sweep", "--b", "0", "--c", "0", "--delta", "1", "--n", "501",
              "--vmin", "1", "--vmax", "10", "--nv", "10"])
    assert rc == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert len(rows) == 10
    assert all(abs(float(r["D"])) < 1e-8 for r in rows)


def test_sweep_reproducible(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    args = ["sweep", "--b", "50", "--c", "40", "--x0", "0.1", "--delta", "20",
            "--n", "501", "--vmin", "2", "--vmax", "6", "--nv", "3"]
    run(args + ["--out", "a.csv"])
    run(args + ["--out", "b.csv"])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_refine_paper_cli(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc = run(["refine-paper", "--budget", "300"])
    assert rc == 0
    doc = json.loads((tmp_path / "refine.json").read_text())
    assert doc["initial_cost"] <= 4 * 0.02**2
    assert doc["converged"]


def test_optimize_cli_small_budget(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc = run(["optimize", "--target", "half-demon", "--seed", "1",
              "--budget", "150", "--restarts", "1", "--n", "501",
              "--log", "log.csv"])
    assert rc == 0
    doc = json.loads((tmp_path / "optimize.json").read_text())
    assert doc["evaluations"] <= 150
    log_rows = read_csv(tmp_path / "log.csv")
    assert len(log_rows) == doc["evaluations"]
