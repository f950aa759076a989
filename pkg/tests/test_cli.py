import json
import math
import re

import numpy as np
import pytest

from epdyn.cli import SvgScene, emit_records_json, read_trajectory_csv, run, to_jsonable


def test_classical_ep_output(capsys):
    assert run(["classical-ep", "--E", "-1"]) == 0
    out = capsys.readouterr().out
    assert "g* = 0.03286335" in out and "1.82574" in out


def test_usage_errors_exit_2(capsys):
    assert run(["no-such-command"]) == 2
    assert run(["spectrum", "--problem", "Three"]) == 2
    assert run(["trajectory", "--stem", "1"]) == 2


def test_domain_errors_exit_1(capsys):
    assert run(["spectrum", "--problem", "Two", "--g", "0.0001"]) == 1
    assert run(["trajectory", "--stem", "0,9"]) == 1
    assert run(["periods", "--family", "cubic", "--g", "0.5", "--closed-form"]) == 1
    assert "error" in capsys.readouterr().err


def test_help_exits_0(capsys):
    assert run(["--help"]) == 0


def test_trajectory_csv_roundtrip(tmp_path, capsys):
    path = tmp_path / "w.csv"
    assert run(["weierstrass", "--samples", "200", "--csv", str(path)]) == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "t,z_re,z_im,zdot_re,zdot_im,energy_residual"
    assert len(lines) == 201
    d = read_trajectory_csv(path)
    assert np.max(np.abs(d["zdot"] ** 2 / 2 + 1j * d["z"] ** 3 - 1)) < 1e-8
    # %.17g round-trips doubles exactly
    assert float(lines[1].split(",")[1]) == d["z"][0].real


def test_json_schema(tmp_path, capsys):
    path = tmp_path / "g2.json"
    assert run(["g2-demo", "--lam", "0.5", "--json", str(path)]) == 0
    doc = json.loads(path.read_text())
    assert doc["tool"] == "epdyn" and doc["command"] == "g2-demo"
    assert "workers" not in doc["config"] and doc["config"]["m"] == 1.0
    assert doc["records"][0]["lambda2"] == pytest.approx(2 / (3 * math.sqrt(3)), rel=1e-9)
    assert set(doc["records"][1]["vacua"][0]) == {"re", "im"}


def test_to_jsonable():
    assert to_jsonable(1 + 2j) == {"re": 1.0, "im": 2.0}
    assert to_jsonable(float("nan")) == "nan"
    assert to_jsonable(np.arange(2)) == [0, 1]
    assert to_jsonable(np.bool_(True)) is True
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_json_rejects_nonfinite_complex(tmp_path):
    with pytest.raises(ValueError):
        emit_records_json([{"E": complex(math.inf, 0)}], tmp_path / "x.json")


def test_svg_turning_points(tmp_path, capsys):
    path = tmp_path / "tp.svg"
    assert run(["turning-points", "--E", "-1", "--g", "0.06", "--svg", str(path)]) == 0
    svg = path.read_text()
    assert svg.startswith("<svg") and svg.count('class="turning-point"') == 5


def test_svg_markers_stay_inside():
    sc = SvgScene((-1, 1, -1, 1))
    sc.add_marker(3 + 0j, "far")
    x0, x1, _, _ = sc.bounds
    assert x0 < 3 < x1
    sc.add_path([0, 1e9])  # clipped rather than stretching the view
    assert "e+" not in sc.render()


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# defaults\nE = -1\ng = 0.06\n")
    assert run(["turning-points", "--config", str(cfg)]) == 0
    assert len(re.findall(r"x1", capsys.readouterr().out)) == 5
    cfg.write_text("E = -1\nbogus = 3\n")
    assert run(["turning-points", "--config", str(cfg)]) == 2
    assert "bogus" in capsys.readouterr().err


def test_workers_env(monkeypatch, capsys):
    monkeypatch.setenv("EPDYN_WORKERS", "0")
    assert run(["g2-demo"]) == 2
    monkeypatch.setenv("EPDYN_WORKERS", "2")
    assert run(["g2-demo"]) == 0


def test_periods_monodromy(capsys):
    assert run(["periods", "--monodromy", "1"]) == 0
    assert "T1 ->" in capsys.readouterr().out


def test_spectrum_deterministic_across_workers(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["spectrum", "--g", "0.1", "0.5", "--count", "3"]
    assert run(args + ["--json", str(a), "--workers", "1"]) == 0
    assert run(args + ["--json", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_scan_below_problem_two_floor(capsys):
    assert run(["scan-ep", "--g-grid", "0.0005,0.03,0.045", "--tol", "5e-3"]) == 0
    out = capsys.readouterr().out
    assert "not resolved" in out and "quantum EP pair1" in out
