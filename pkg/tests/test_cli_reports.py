from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest

from holonomy_lab import dynamics as dyn
from holonomy_lab.cli import ConfigError, main, read_config
from holonomy_lab.reports import Report, dumps, emit_report, export_trajectory, report_body, to_jsonable
from holonomy_lab.rep_core import RepSpec


def run_cli(tmp_path, *args):
    out = tmp_path / "report.json"
    status = main([*args, "--out", str(out)])
    return status, (json.loads(out.read_text()) if out.exists() else None)


def test_dims_report(tmp_path):
    status, rep = run_cli(tmp_path, "dims", "--family", "tensor-real", "--p", "3", "--q", "0")
    assert status == 0
    assert {"command", "spec", "dim_g", "dim_V", "dim_K", "dim_K1", "dim_J2", "berger_proper"} <= rep.keys()
    assert (rep["dim_K"], rep["dim_K1"], rep["dim_J2"]) == (6, 6, 1)
    assert rep["schema_version"] == 1
    assert rep["provenance"]["seed"] == 0
    assert "basis_ordering" in rep["provenance"]


def test_jacobi_passes(tmp_path):
    status, rep = run_cli(tmp_path, "jacobi", "--family", "tensor-real", "--p", "2", "--q", "1", "--c", "1")
    assert status == 0
    assert rep["nonzero"] == 0
    assert rep["c"] == "1/1"


def test_failing_check_exits_one(tmp_path):
    # with the center included every curvature value misses the center
    status, rep = run_cli(tmp_path, "berger", "--family", "tensor-complex", "--n", "3", "--center")
    assert status == 1
    assert rep["berger_proper"] is True
    (failure,) = [f for f in rep["failures"] if f["name"] == "curvature span = g"]
    assert failure["witness"] == {"span_dim": 6}


def test_empty_config_exits_two(tmp_path):
    cfg = tmp_path / "empty.cfg"
    cfg.write_text("# nothing here\n\n")
    assert main(["dims", "--config", str(cfg)]) == 2


@pytest.mark.parametrize("args", [
    ["dims", "--family", "tensor-real", "--p", "1", "--q", "0"],
    ["dims", "--family", "tensor-complex"],
    ["dims", "--family", "sym-power"],
    ["witness", "--family", "tensor-real", "--p", "3", "--q", "0"],
    ["dims", "--family", "banana"],
    ["all", "--criteria", "99"],
    [],
])
def test_config_errors_exit_two(tmp_path, args):
    assert main([*args, "--out", str(tmp_path / "r.json")] if args else args) == 2


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("family = tensor-real\np = 2\nq = 1\nc = -2  # comment\nseed = 7\n")
    values = read_config(cfg)
    assert values == {"family": "tensor-real", "p": 2, "q": 1, "c": -2.0, "seed": 7}
    status, rep = run_cli(tmp_path, "jacobi", "--config", str(cfg), "--c", "0")
    assert status == 0
    assert rep["c"] == "0/1"
    assert rep["provenance"]["seed"] == 7


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    with pytest.raises(ConfigError):
        read_config(cfg)


def test_seed_environment_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("HOLONOMY_LAB_SEED", "11")
    _, rep = run_cli(tmp_path, "lemma-reps", "--family", "binary-cubic")
    assert rep["provenance"]["seed"] == 11
    _, rep = run_cli(tmp_path, "lemma-reps", "--family", "binary-cubic", "--seed", "3")
    assert rep["provenance"]["seed"] == 3


def test_reports_are_deterministic(tmp_path):
    texts = []
    for k in range(2):
        out = tmp_path / f"w{k}.json"
        assert main(["witness", "--family", "tensor-real", "--p", "2", "--q", "1", "--seed", "4",
                     "--out", str(out)]) == 0
        texts.append(out.read_text())
    assert report_body(texts[0]) == report_body(texts[1])
    rep = json.loads(texts[0])
    assert "blow_up_time" in rep and "conserved_drift" in rep
    assert set(rep["identity_residuals"]) == set(dyn.IDENTITY_NAMES)


def test_exact_and_float_serialization():
    data = to_jsonable({"x": Fraction(-3, 4), "y": 0.1, "z": float("inf"), "w": np.int64(3),
                        "v": np.array([1.5, 2.0]), "c": 1 + 2j})
    assert data == {"x": "-3/4", "y": 0.1, "z": "inf", "w": 3, "v": [1.5, 2.0], "c": [1.0, 2.0]}


def test_emit_report_is_atomic(tmp_path):
    r = Report("dims", RepSpec.tensor_real(2, 1), {"dim_K": 6})
    r.check("ok", True)
    path = emit_report(r, tmp_path / "sub" / "r.json")
    assert json.loads(path.read_text())["dim_K"] == 6
    assert [p.name for p in path.parent.iterdir()] == ["r.json"]
    body = dumps(r)
    assert body.index('"checks"') < body.index('"command"')     # sorted keys


def _traj(reason, n):
    spec = RepSpec.tensor_real(2, 1)
    t = np.linspace(0, 1, n)
    return dyn.Trajectory(spec, t, np.ones((n, 12)), np.zeros(n), reason,
                          {"max_norm": np.ones(n)}, None, seed=5)


def test_csv_blown_up_trajectory(tmp_path):
    path = export_trajectory(_traj("blow-up", 4), tmp_path / "t.csv")
    lines = path.read_text().splitlines()
    assert "# termination: blow-up" in lines
    assert "# seed: 5" in lines
    header = lines[3]
    assert header.startswith("t,a[") and header.endswith("max_norm,flag")
    assert lines[-1].endswith(",blow-up")
    assert not lines[-2].endswith("blow-up")


def test_csv_empty_trajectory_is_header_only(tmp_path):
    path = export_trajectory(_traj("time-limit", 0), tmp_path / "e.csv")
    lines = path.read_text().splitlines()
    assert all(l.startswith("#") for l in lines[:-1])
    assert lines[-1].startswith("t,")


def test_geodesic_csv_row_count(tmp_path):
    csv_path = tmp_path / "g.csv"
    status, rep = run_cli(tmp_path, "geodesic", "--family", "tensor-real", "--p", "2", "--q", "1",
                          "--t-max", "1", "--csv", str(csv_path))
    assert status == 0
    rows = [l for l in csv_path.read_text().splitlines() if not l.startswith("#")][1:]
    assert 10 <= len(rows) <= 10 ** 6
    assert len(rows) == rep["samples"]


def test_ode_scan_command(tmp_path):
    status, rep = run_cli(tmp_path, "ode-scan", "--grid", "5")
    assert status == 0
    assert set(rep["scan"]) == {"-1.0", "0.0", "1.0"}


def test_all_subset(tmp_path, capsys):
    status, rep = run_cli(tmp_path, "all", "--criteria", "5,8")
    assert status == 0
    assert "[PASS]  5." in capsys.readouterr().out
    assert "timing" in rep
