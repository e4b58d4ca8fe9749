"""Build matplotlib figures from simulator CSV outputs.

`build_figure` returns the Figure so tests and callers can inspect the
drawn artists; `render` wraps it and writes the image file. Diagram
branches are drawn one artist per constant-stability run, with the artist
gid `"<method>:branch<id>:<stability>"`, so the branch structure is
recoverable from the figure's data layer.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import networkx as nx
import numpy as np

from .csvio import read_table
from .errors import SpecError
from .spec import FigureSpec

STABLE_STYLE = {"stable": "solid", "unstable": "dashed"}


def _trajectory(spec: FigureSpec, ax):
    for inp in spec.inputs:
        table = read_table(inp.csv)
        table.require("t")
        t = table.column("t")
        if "y_1" in table.header:
            names = [h for h in table.header if h.startswith("y_")]
        else:
            # rank>1 runs have no effective-opinion columns; fall back to raw z
            names = [h for h in table.header if h.startswith("z_")]
        if not names:
            raise SpecError(f"{inp.csv}: no y_* or z_* columns to plot")
        for i, name in enumerate(names):
            ax.plot(t, table.column(name), linestyle=inp.linestyle,
                    color=inp.color, linewidth=1.2, gid=f"{inp.label}:{name}",
                    label=inp.label if i == 0 else None)
    ax.set_xlabel("t")
    ax.set_ylabel("effective opinion y_i")
    ax.axhline(0.0, color="0.7", linewidth=0.6, zorder=0)
    ax.legend(loc="best")


def _diagram(spec: FigureSpec, ax):
    table = read_table(spec.inputs[0].csv)
    table.require("u", "method", "branch_id", "stability", "x_ls")
    u = table.column("u")
    x = table.column("x_ls")
    method = table.column("method", numeric=False)
    branch = table.column("branch_id", numeric=False)
    stability = table.column("stability", numeric=False)
    colors = {"sweep": "tab:blue", "unfolding": "tab:orange"}
    seen = set()
    for key in sorted(set(zip(method, branch))):
        m, b = key
        idx = [i for i in range(len(u)) if method[i] == m and branch[i] == b]
        idx.sort(key=lambda i: u[i])
        # one artist per maximal run of constant stability
        run = [idx[0]]
        for i in idx[1:]:
            if stability[i] == stability[run[-1]]:
                run.append(i)
            else:
                _draw_run(ax, u, x, stability, run, m, b, colors, seen)
                run = [run[-1], i]
        _draw_run(ax, u, x, stability, run, m, b, colors, seen)
    ax.set_xlabel("attention u")
    ax.set_ylabel("branch amplitude x")
    ax.axhline(0.0, color="0.8", linewidth=0.6, zorder=0)
    ax.legend(loc="best")


def _draw_run(ax, u, x, stability, run, m, b, colors, seen):
    # runs bridge with the previous run's last point, so the run's own
    # stability is that of its final point
    st = stability[run[-1]]
    label = f"{m} ({st})"
    ax.plot(u[run], x[run], linestyle=STABLE_STYLE.get(st, "dotted"),
            color=colors.get(m, "tab:gray"), linewidth=1.4,
            marker="." if len(run) == 1 else None,
            gid=f"{m}:branch{b}:{st}",
            label=None if label in seen else label)
    seen.add(label)


def _graph_from_spec(obj: dict):
    kind = obj.get("kind")
    n = int(obj.get("n", 0))
    g = nx.Graph()
    if kind == "ring":
        g = nx.cycle_graph(n)
    elif kind == "complete":
        g = nx.complete_graph(n)
    elif kind == "star":
        g = nx.star_graph(n - 1)  # node 0 is the hub
    elif kind == "circulant":
        g = nx.circulant_graph(n, [int(o) for o in obj["offsets"]])
    elif kind == "custom":
        a = np.asarray(obj["matrix"], dtype=float)
        g = nx.from_numpy_array(a)
    elif kind == "edges":
        g.add_nodes_from(range(n))
        for i, j, *w in obj["edges"]:
            g.add_edge(int(i) - 1, int(j) - 1, weight=float(w[0]) if w else 1.0)
    else:
        raise SpecError(f"unknown graph kind {kind!r}")
    return kind, g


def _layout(kind, g, seed):
    if kind == "ring" or (kind == "circulant"):
        return nx.circular_layout(g)
    if kind == "star":
        pos = {0: np.zeros(2)}
        leaves = [node for node in g if node != 0]
        angles = np.linspace(0, 2 * np.pi, len(leaves), endpoint=False)
        for node, th in zip(leaves, angles):
            pos[node] = np.array([np.cos(th), np.sin(th)])
        return pos
    return nx.spring_layout(g, seed=seed)


def _graph_coloring(spec: FigureSpec, ax, fig):
    table = read_table(spec.inputs[0].csv)
    column = spec.style.get("column", "exact")
    table.require("node", column)
    nodes = table.column("node").astype(int)
    values = table.column(column)
    kind, g = _graph_from_spec(spec.graph)
    if g.number_of_nodes() != len(nodes):
        raise SpecError(
            f"graph has {g.number_of_nodes()} nodes, CSV has {len(nodes)} rows"
        )
    order = np.argsort(nodes)
    colors = values[order]
    pos = _layout(kind, g, int(spec.style.get("layout_seed", 0)))
    cmap = plt.get_cmap(spec.style.get("cmap", "viridis"))
    nx.draw_networkx_edges(g, pos, ax=ax, edge_color="0.6")
    scatter = nx.draw_networkx_nodes(
        g, pos, ax=ax, node_color=colors, cmap=cmap, node_size=400,
    )
    scatter.set_gid("centrality-nodes")
    nx.draw_networkx_labels(
        g, pos, ax=ax, labels={node: str(node + 1) for node in g}, font_size=8,
    )
    fig.colorbar(scatter, ax=ax, label=f"{column} centrality")
    ax.set_axis_off()


def build_figure(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=tuple(spec.style.get("figsize", (6.0, 4.0))))
    if spec.kind == "trajectory":
        _trajectory(spec, ax)
    elif spec.kind == "diagram":
        _diagram(spec, ax)
    else:
        _graph_coloring(spec, ax, fig)
    if spec.style.get("title"):
        ax.set_title(spec.style["title"])
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> str:
    fig = build_figure(spec)
    try:
        fig.savefig(spec.out, dpi=int(spec.style.get("dpi", 150)),
                    metadata=_strip_metadata(spec.out))
    finally:
        plt.close(fig)
    return spec.out


def _strip_metadata(path: str):
    # drop encoder timestamps so reruns are byte-identical
    if path.endswith(".png"):
        return {"Software": None}
    if path.endswith(".svg"):
        return {"Date": None}
    return None
