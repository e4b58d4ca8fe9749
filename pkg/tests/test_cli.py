import json

import numpy as np
import pytest

from connod.cli import main

BASE = {
    "graph": {"kind": "complete", "n": 6},
    "constraints": {"options": 3, "default": [1, 1, 1]},
    "params": {"d": 0.3, "u": 0.14, "alpha": 1.0, "gamma": 0.5},
    "bias": {"2": [1, 1, -1]},
    "initial": {"mode": "zero"},
    "integrator": {"dt": 0.01, "horizon": 100.0, "sample_every": 100},
}


def write_config(tmp_path, extra=None, name="scenario.json"):
    cfg = json.loads(json.dumps(BASE))
    cfg.update(extra or {})
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_simulate_homogeneous_positive(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "run"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["effective_bias"][1] == pytest.approx(1 / np.sqrt(3), abs=1e-3)
    assert all(s == "positive" for s in summary["decision_signs"])
    assert summary["max_constraint_drift"] <= 1e-8
    header = (out / "trajectory.csv").read_text().splitlines()
    assert header[0].startswith("# scenario_hash=")
    assert header[1] == "# seed=0"


def test_simulate_heterogeneous_negative(tmp_path):
    cfg = write_config(
        tmp_path,
        {"constraints": {"options": 3, "default": [1, 1, 1], "vectors": {"2": [1, 1, 3]}}},
    )
    out = tmp_path / "run"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["effective_bias"][1] == pytest.approx(-1 / np.sqrt(11), abs=1e-3)
    assert all(s == "negative" for s in summary["decision_signs"])


def test_simulate_subcritical_neutral(tmp_path):
    cfg = write_config(tmp_path, {"bias": None, "params": {"d": 0.3, "u": 0.05},
                                  "initial": {"mode": "seeded", "seed": 1, "epsilon": 0.01},
                                  "integrator": {"dt": 0.01, "horizon": 200.0,
                                                 "sample_every": 100}})
    out = tmp_path / "run"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert all(s == "neutral" for s in summary["decision_signs"])
    assert np.max(np.abs(summary["final_y"])) <= 1e-6


def test_simulate_deterministic_outputs(tmp_path):
    cfg = write_config(tmp_path, {"initial": {"mode": "seeded", "seed": 7, "epsilon": 0.01}})
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
    csv1 = (out1 / "trajectory.csv").read_bytes()
    csv2 = (out2 / "trajectory.csv").read_bytes()
    assert csv1 == csv2


def test_bifurcate_pitchfork_location(tmp_path, capsys):
    cfg = write_config(tmp_path, {"bias": None,
                                  "sweep": {"u_min": 0.02, "u_max": 0.2, "u_steps": 37}})
    out = tmp_path / "run"
    assert main(["bifurcate", "--config", cfg, "--out", str(out)]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["u_star"] == pytest.approx(0.3 / 3.5, abs=1e-12)
    lines = (out / "diagram.csv").read_text().splitlines()
    rows = [ln.split(",") for ln in lines if not ln.startswith("#")][1:]
    sweep_counts = {}
    for row in rows:
        if row[1] == "sweep":
            sweep_counts[float(row[0])] = sweep_counts.get(float(row[0]), 0) + 1
    us = sorted(sweep_counts)
    step = us[1] - us[0]
    for u in us:
        expected = 1 if u <= result["u_star"] else (3 if u > result["u_star"] + step else None)
        if expected is not None:
            assert sweep_counts[u] == expected
    assert any(row[1] == "unfolding" for row in rows)


def test_bifurcate_unfold_signs(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["bifurcate", "--config", cfg, "--out", str(tmp_path / "p")]) == 0
    assert json.loads(capsys.readouterr().out)["unfold"] > 0
    cfg2 = write_config(
        tmp_path,
        {"constraints": {"options": 3, "default": [1, 1, 1], "vectors": {"2": [1, 1, 3]}}},
        name="het.json",
    )
    assert main(["bifurcate", "--config", cfg2, "--out", str(tmp_path / "n")]) == 0
    assert json.loads(capsys.readouterr().out)["unfold"] < 0


def test_centrality_ring_fixture(tmp_path, capsys):
    cfg = {
        "graph": {"kind": "ring", "n": 6},
        "constraints": {"options": 2, "default": [1, 0],
                        "vectors": {"1": [0.9, np.sqrt(1 - 0.81)]}},
    }
    path = tmp_path / "ring.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "run"
    assert main(["centrality", "--config", str(path), "--out", str(out)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["delta"] == pytest.approx(-0.1, abs=1e-12)
    rows = [ln.split(",") for ln in (out / "centrality.csv").read_text().splitlines()
            if not ln.startswith("#")][1:]
    approx = [float(r[2]) for r in rows]
    assert int(rows[int(np.argmin(approx))][0]) == 1


def test_centrality_star_fixture(tmp_path, capsys):
    cfg = {
        "graph": {"kind": "star", "n": 5},
        "constraints": {"options": 2, "default": [1, 0]},
    }
    path = tmp_path / "star.json"
    path.write_text(json.dumps(cfg))
    assert main(["centrality", "--config", str(path), "--out", str(tmp_path / "o")]) == 0
    rows = [ln.split(",") for ln in (tmp_path / "o" / "centrality.csv").read_text().splitlines()
            if not ln.startswith("#")][1:]
    exact = [float(r[1]) for r in rows]
    assert exact[0] == pytest.approx(2 * exact[1], rel=1e-9)


def test_verify_passes(tmp_path):
    cfg = write_config(tmp_path, {"integrator": {"dt": 0.01, "horizon": 10.0,
                                                 "sample_every": 10}})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "v")]) == 0
    checks = json.loads((tmp_path / "v" / "verify.json").read_text())
    assert all(ch["status"] in ("PASS", "SKIP") for ch in checks)
    assert any(ch["check"] == "full_reduced_equivalence" and ch["status"] == "PASS"
               for ch in checks)


def test_verify_rank2_skips_reduced(tmp_path):
    cfg = write_config(
        tmp_path,
        {"constraints": {"options": 3, "default": [1, 1, 1],
                         "vectors": {"2": [[1, 0], [0, 1], [0, 0]]}},
         "bias": None,
         "integrator": {"dt": 0.01, "horizon": 5.0, "sample_every": 10}},
    )
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "v")]) == 0
    checks = {ch["check"]: ch["status"] for ch in
              json.loads((tmp_path / "v" / "verify.json").read_text())}
    assert checks["full_reduced_equivalence"] == "SKIP"
    assert checks["invariance_drift"] == "PASS"


def test_validation_error_exit_code(tmp_path):
    cfg = {
        "graph": {"kind": "custom", "matrix": [[0, 1], [0.5, 0]]},  # asymmetric
        "constraints": {"options": 2, "default": [1, 0]},
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(path)]) == 2


def test_missing_section_exit_code(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("{}")
    assert main(["simulate", "--config", str(path)]) == 2


def test_print_config_resolves_defaults(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["simulate", "--config", cfg, "--print-config"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["integrator"]["sample_every"] == 100
    assert doc["sweep"]["u_steps"] == 37


def test_sweep_command(tmp_path):
    cfg = write_config(tmp_path, {
        "bias": None,
        "initial": {"mode": "seeded", "seed": 5, "epsilon": 0.01},
        "integrator": {"dt": 0.01, "horizon": 60.0, "sample_every": 100},
        "sweep": {"u_min": 0.05, "u_max": 0.14, "u_steps": 4},
    })
    out = tmp_path / "run"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    rows = [ln.split(",") for ln in (out / "sweep.csv").read_text().splitlines()
            if not ln.startswith("#")]
    assert rows[0][:2] == ["u", "y_1"]
    first, last = rows[1], rows[-1]
    assert all(s == "neutral" for s in first[7:])
    assert all(s != "neutral" for s in last[7:])
