"""Figure specs: one JSON document per figure.

Schema:

```json
{
  "kind": "trajectory" | "diagram" | "graph-coloring",
  "inputs": [
    {"csv": "out/trajectory.csv", "label": "homogeneous",
     "linestyle": "solid", "color": "tab:blue"}
  ],
  "graph": {"kind": "ring", "n": 6},
  "style": {"title": "...", "cmap": "viridis", "column": "exact",
            "layout_seed": 0},
  "out": "figure.png"
}
```

`inputs` takes one or more CSVs for trajectories (overlaid, default style
cycle solid blue then dashed red) and exactly one CSV for the other kinds.
`graph` is required for graph-coloring only and mirrors the simulator's
graph config vocabulary (ring, star, complete, circulant, custom matrix,
edge list).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .errors import SpecError

KINDS = ("trajectory", "diagram", "graph-coloring")
_DEFAULT_CYCLE = (("solid", "tab:blue"), ("dashed", "tab:red"),
                  ("dashdot", "tab:green"), ("dotted", "tab:purple"))


@dataclass(frozen=True)
class InputSpec:
    csv: str
    label: str
    linestyle: str
    color: str


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple
    out: str
    graph: dict | None = None
    style: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path_or_dict) -> "FigureSpec":
        if isinstance(path_or_dict, str):
            try:
                with open(path_or_dict) as fh:
                    raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SpecError(f"figure spec is not valid JSON: {exc}") from exc
        else:
            raw = dict(path_or_dict)
        kind = raw.get("kind")
        if kind not in KINDS:
            raise SpecError(f"kind must be one of {KINDS}, got {kind!r}")
        entries = raw.get("inputs")
        if not entries:
            raise SpecError("spec needs at least one entry in 'inputs'")
        if isinstance(entries, (str, dict)):
            entries = [entries]
        cycle = itertools.cycle(_DEFAULT_CYCLE)
        inputs = []
        for i, entry in enumerate(entries):
            if isinstance(entry, str):
                entry = {"csv": entry}
            if "csv" not in entry:
                raise SpecError(f"inputs[{i}]: missing 'csv' path")
            style, color = next(cycle)
            inputs.append(InputSpec(
                csv=entry["csv"],
                label=entry.get("label", f"input {i + 1}"),
                linestyle=entry.get("linestyle", style),
                color=entry.get("color", color),
            ))
        if kind != "trajectory" and len(inputs) != 1:
            raise SpecError(f"{kind} figures take exactly one input CSV")
        if kind == "graph-coloring" and not raw.get("graph"):
            raise SpecError("graph-coloring figures need a 'graph' section")
        if "out" not in raw:
            raise SpecError("spec needs an 'out' image path")
        return cls(kind=kind, inputs=tuple(inputs), out=raw["out"],
                   graph=raw.get("graph"), style=raw.get("style") or {})
