import json

import pytest

from connod.cli import main as connod_main

HOMOGENEOUS = {
    "graph": {"kind": "complete", "n": 6},
    "constraints": {"options": 3, "default": [1, 1, 1]},
    "params": {"d": 0.3, "u": 0.14, "alpha": 1.0, "gamma": 0.5},
    "bias": {"2": [1, 1, -1]},
    "initial": {"mode": "zero"},
    "integrator": {"dt": 0.01, "horizon": 100.0, "sample_every": 100},
    "sweep": {"u_min": 0.02, "u_max": 0.2, "u_steps": 37},
}

HETEROGENEOUS = json.loads(json.dumps(HOMOGENEOUS))
HETEROGENEOUS["constraints"]["vectors"] = {"2": [1, 1, 3]}

RING = {
    "graph": {"kind": "ring", "n": 6},
    "constraints": {"options": 2, "default": [1, 0],
                    "vectors": {"1": [0.9, 0.43588989435406733]}},
}


@pytest.fixture(scope="session")
def outputs(tmp_path_factory):
    """Upstream CSVs for the renderer, produced by the simulator CLI."""
    root = tmp_path_factory.mktemp("upstream")

    def run(command, cfg, name):
        path = root / f"{name}.json"
        path.write_text(json.dumps(cfg))
        out = root / name
        assert connod_main([command, "--config", str(path), "--out", str(out)]) == 0
        return out

    return {
        "hom": run("simulate", HOMOGENEOUS, "hom"),
        "het": run("simulate", HETEROGENEOUS, "het"),
        "diagram_zero_bias": run("bifurcate", {**HOMOGENEOUS, "bias": None}, "dia0"),
        "diagram_biased": run("bifurcate", HOMOGENEOUS, "diab"),
        "ring_centrality": run("centrality", RING, "ring"),
    }
