"""Scenario configs: one JSON document describing a reproducible run.

A scenario resolves to a graph, a constraint set, model parameters, a
bias matrix, an initial condition, integrator settings, and a u sweep
grid. Every output file carries the scenario hash and seed in a comment
header so runs are byte-reproducible.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass

import numpy as np

from . import graphs
from .constraints import ConstraintSet, effective_bias
from .dynamics import NodParams, initial_state
from .errors import ValidationError

DEFAULTS = {
    "params": {"d": 0.3, "u": 0.14, "alpha": 1.0, "gamma": 0.5, "sigmoid": "tanh"},
    "initial": {"mode": "seeded", "seed": 0, "epsilon": 0.01},
    "integrator": {"dt": 0.01, "horizon": 100.0, "sample_every": 10},
    "sweep": {"u_min": 0.02, "u_max": 0.2, "u_steps": 37},
    "out": "out",
}


def _merged(raw: dict) -> dict:
    cfg = copy.deepcopy(raw)
    for key, defaults in DEFAULTS.items():
        if isinstance(defaults, dict):
            section = dict(defaults)
            section.update(cfg.get(key) or {})
            cfg[key] = section
        else:
            cfg.setdefault(key, defaults)
    return cfg


@dataclass
class Scenario:
    config: dict
    graph: graphs.Graph
    constraints: ConstraintSet
    params: NodParams
    bias: np.ndarray

    @classmethod
    def load(cls, path_or_dict, overrides: dict | None = None) -> "Scenario":
        if isinstance(path_or_dict, (str,)):
            try:
                with open(path_or_dict) as fh:
                    raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"config is not valid JSON: {exc}") from exc
        else:
            raw = copy.deepcopy(path_or_dict)
        cfg = _merged(raw)
        for dotted, value in (overrides or {}).items():
            section, _, key = dotted.partition(".")
            if key:
                cfg.setdefault(section, {})[key] = value
            else:
                cfg[section] = value
        if "graph" not in cfg:
            raise ValidationError("scenario: missing 'graph' section")
        g = graphs.build_graph(cfg["graph"])
        if "constraints" not in cfg:
            raise ValidationError("scenario: missing 'constraints' section")
        c = ConstraintSet.from_json(cfg["constraints"], g.n)
        p = NodParams(**cfg["params"])
        bias = np.zeros((g.n, c.n_options))
        spec = cfg.get("bias")
        if isinstance(spec, dict):
            for key, row in spec.items():
                i = int(key)
                if not 1 <= i <= g.n:
                    raise ValidationError(f"bias: agent {i} out of range")
                bias[i - 1] = np.asarray(row, dtype=float)
        elif spec is not None:
            bias = np.asarray(spec, dtype=float)
            if bias.shape != (g.n, c.n_options):
                raise ValidationError(f"bias: expected shape ({g.n}, {c.n_options})")
        return cls(cfg, g, c, p, bias)

    @property
    def seed(self) -> int:
        return int(self.config["initial"].get("seed", 0))

    def scenario_hash(self) -> str:
        # the output directory is a run location, not part of the scenario
        canon = json.dumps(
            {k: v for k, v in self.config.items() if k != "out"},
            sort_keys=True, separators=(",", ":"),
        )
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def header_comments(self) -> list:
        return [f"scenario_hash={self.scenario_hash()}", f"seed={self.seed}"]

    def initial_full_state(self) -> np.ndarray:
        init = self.config["initial"]
        if init["mode"] == "explicit":
            z0 = np.asarray(init["state"], dtype=float)
            if z0.shape != (self.graph.n, self.constraints.n_options):
                raise ValidationError("initial state has wrong shape")
            return z0
        if init["mode"] == "seeded":
            return initial_state(
                self.graph.n, self.constraints.n_options,
                seed=self.seed, eps=float(init.get("epsilon", 0.01)),
            )
        if init["mode"] == "zero":
            return np.zeros((self.graph.n, self.constraints.n_options))
        raise ValidationError(f"unknown initial mode {init['mode']!r}")

    def integrator(self) -> dict:
        cfg = self.config["integrator"]
        return {
            "dt": float(cfg["dt"]),
            "horizon": float(cfg["horizon"]),
            "sample_every": int(cfg["sample_every"]),
        }

    def u_grid(self) -> np.ndarray:
        cfg = self.config["sweep"]
        return np.linspace(float(cfg["u_min"]), float(cfg["u_max"]), int(cfg["u_steps"]))

    def effective_biases(self) -> np.ndarray:
        return effective_bias(self.constraints, self.bias).b_e
