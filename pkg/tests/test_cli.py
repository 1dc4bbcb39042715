import json

import numpy as np
import pytest

from macwtap.cli import main, read_csv_rows


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_region_bundled_contains_identity_vertex(tmp_path):
    out = tmp_path / "r"
    code = run_cli("region", "--bundled", "noiseless_pair", "--model", "model3",
                   "--alpha", "0.5", "--budget", "400", "--seed", "1", "--out", out)
    assert code == 0
    rows = read_csv_rows(out / "region.csv")
    pts = [(float(r[2]), float(r[3])) for r in rows]
    assert any(abs(x - 0.5) < 1e-9 and abs(y - 0.5) < 1e-9 for x, y in pts)
    doc = json.loads((out / "region.json").read_text())
    assert doc["hulls"][0]["model"] == "model3"
    assert (out / "manifest.json").exists()


def test_region_alpha_zero_generalized_matches_direct(tmp_path, gen_spec):
    out = tmp_path / "r0"
    assert run_cli("region", "--bundled", "generalized_v", "--alpha", "0.0",
                   "--budget", "50", "--seed", "9", "--out", out) == 0
    doc = json.loads((out / "region.json").read_text())
    got = {(round(v["R1"], 12), round(v["R2"], 12)) for v in doc["hulls"][0]["vertices"]}

    from macwtap.rate_regions import optimize_hull

    hull = optimize_hull(gen_spec.with_alpha(0.0), budget=50, seed=9)
    want = {(round(v.r1, 12), round(v.r2, 12)) for v in hull.vertices}
    assert got == want


def test_region_empty_alpha_usage_error(tmp_path, capsys):
    code = run_cli("region", "--bundled", "noiseless_pair", "--out", tmp_path / "x")
    assert code != 0
    err = json.loads(capsys.readouterr().out)
    assert "alpha" in err["message"]


def test_region_rejects_bad_spec_path(tmp_path, capsys):
    code = run_cli("region", "--spec", tmp_path / "missing.json", "--alpha", "0.5",
                   "--out", tmp_path / "y")
    assert code != 0


def test_sim_strategy_rows(tmp_path):
    out = tmp_path / "s"
    assert run_cli("sim", "--bundled", "bsc_pair", "--n", "4", "--mu", "2",
                   "--trials", "50", "--seed", "2", "--out", out) == 0
    rows = read_csv_rows(out / "leakage.csv")
    assert len(rows) == 24
    run = json.loads((out / "run.json").read_text())
    assert run["mu"] == 2
    assert len(run["leakage_by_strategy"]) == 24
    kls = [float(r[2]) for r in rows]
    assert max(kls) == pytest.approx(run["max_leakage_bits"], abs=1e-12)


def test_sweep_single_point_matches_sim(tmp_path):
    sim_out = tmp_path / "sim"
    sweep_out = tmp_path / "sweep"
    args = ["--bundled", "noiseless_pair", "--trials", "40", "--seed", "5",
            "--rates", "0.25", "0.25", "0.25", "0.25"]
    assert run_cli("sim", "--n", "4", *args, "--out", sim_out) == 0
    assert run_cli("sweep", "--n", "4", *args, "--out", sweep_out) == 0
    point = sweep_out / "point_000"
    assert (point / "run.json").read_bytes() == (sim_out / "run.json").read_bytes()
    assert (point / "leakage.csv").read_bytes() == (sim_out / "leakage.csv").read_bytes()
    rows = read_csv_rows(sweep_out / "summary.csv")
    assert len(rows) == 1


def test_verify_lemma1_satisfied(tmp_path):
    out = tmp_path / "v"
    assert run_cli("verify", "lemma1", "--bundled", "noiseless_pair", "--n", "8",
                   "--rates", "0.15", "0.15", "0.15", "0.15",
                   "--draws", "1000", "--seed", "3", "--out", out) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["satisfied"] is True
    assert not rep["vacuous"]


def test_verify_chernoff(tmp_path):
    out = tmp_path / "c"
    assert run_cli("verify", "chernoff", "--bound", "0.02", "--eps", "0.5",
                   "--trials", "20000", "--seed", "4", "--out", out) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["satisfied"] is True


def test_verify_entropies(tmp_path):
    out = tmp_path / "e"
    assert run_cli("verify", "entropies", "--bundled", "generalized_v", "--n", "4",
                   "--mu", "2", "--out", out) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["satisfied"] is True
    assert rep["max_gap"] < 1e-9


def test_replay_byte_identical_any_jobs(tmp_path):
    first = tmp_path / "a"
    assert run_cli("sim", "--bundled", "bsc_pair", "--n", "4", "--mu", "2",
                   "--trials", "60", "--seed", "7", "--out", first) == 0
    second = tmp_path / "b"
    assert run_cli("replay", first / "manifest.json", "--out", second, "--jobs", "4") == 0
    for name in ("run.json", "leakage.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_region_jobs_flag_does_not_change_output(tmp_path):
    a, b = tmp_path / "j1", tmp_path / "j2"
    for out, jobs in ((a, "1"), (b, "3")):
        assert run_cli("region", "--bundled", "adder_superposition", "--alpha", "0.3",
                       "--budget", "100", "--seed", "11", "--jobs", jobs, "--out", out) == 0
    assert (a / "region.csv").read_bytes() == (b / "region.csv").read_bytes()
