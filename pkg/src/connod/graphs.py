"""Undirected weighted signed graphs and their spectral properties.

Adjacency matrices are dense numpy arrays: symmetric, zero diagonal,
finite entries. Node indices are 0-based internally; the JSON interchange
format uses 1-based indices.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, ValidationError

_SYM_TOL = 1e-12


@dataclass(frozen=True)
class Graph:
    """Symmetric weighted signed adjacency with no self-loops."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError(f"adjacency must be square, got shape {a.shape}")
        if a.shape[0] < 2:
            raise ValidationError("graph needs at least 2 nodes")
        if not np.all(np.isfinite(a)):
            raise ValidationError("adjacency has non-finite entries")
        if np.max(np.abs(a - a.T)) > _SYM_TOL:
            raise ValidationError("adjacency is not symmetric")
        if np.max(np.abs(np.diag(a))) > 0:
            raise ValidationError("adjacency has a nonzero diagonal (self-loop)")
        object.__setattr__(self, "adjacency", a)
        self.adjacency.setflags(write=False)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def degree(self) -> np.ndarray:
        """Row sums of the adjacency (weighted degree)."""
        return self.adjacency.sum(axis=1)

    def is_regular(self, tol: float = 1e-10) -> bool:
        deg = self.degree()
        return bool(np.max(np.abs(deg - deg[0])) <= tol)


@dataclass(frozen=True)
class Eigenpair:
    """Eigenvalue with a unit-norm eigenvector; `simple` flags the gap check."""

    value: float
    vector: np.ndarray
    simple: bool = True


# ---------------------------------------------------------------------------
# constructors

def ring(n: int) -> Graph:
    """Cycle graph: node i adjacent to i +/- 1 (mod n)."""
    if n < 3:
        raise ValidationError("ring needs n >= 3")
    a = np.zeros((n, n))
    idx = np.arange(n)
    a[idx, (idx + 1) % n] = 1.0
    a[(idx + 1) % n, idx] = 1.0
    return Graph(a)


def star(n: int, hub_weights=None) -> Graph:
    """Star with node 1 (index 0) as the hub.

    `hub_weights` optionally gives the n-1 spoke weights (default all 1).
    """
    if n < 2:
        raise ValidationError("star needs n >= 2")
    w = np.ones(n - 1) if hub_weights is None else np.asarray(hub_weights, dtype=float)
    if w.shape != (n - 1,):
        raise ValidationError("hub_weights must have length n-1")
    a = np.zeros((n, n))
    a[0, 1:] = w
    a[1:, 0] = w
    return Graph(a)


def complete(n: int) -> Graph:
    if n < 2:
        raise ValidationError("complete needs n >= 2")
    a = np.ones((n, n)) - np.eye(n)
    return Graph(a)


def circulant_regular(n: int, offsets) -> Graph:
    """Circulant graph with edges i ~ i +/- o for each offset o."""
    if n < 2:
        raise ValidationError("circulant needs n >= 2")
    a = np.zeros((n, n))
    idx = np.arange(n)
    for o in offsets:
        o = int(o) % n
        if o == 0:
            raise ValidationError("circulant offsets must be nonzero mod n")
        a[idx, (idx + o) % n] = 1.0
        a[(idx + o) % n, idx] = 1.0
    return Graph(a)


def custom(matrix) -> Graph:
    """Graph from an explicit adjacency matrix (validated)."""
    return Graph(np.asarray(matrix, dtype=float))


def from_json(obj) -> Graph:
    """Load `{"n": int, "edges": [[i, j, w], ...]}` with 1-based indices."""
    if isinstance(obj, str):
        with open(obj) as fh:
            obj = json.load(fh)
    n = int(obj["n"])
    if n < 2:
        raise ValidationError("graph JSON needs n >= 2")
    a = np.zeros((n, n))
    for edge in obj["edges"]:
        i, j, w = int(edge[0]), int(edge[1]), float(edge[2])
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValidationError(f"edge ({i},{j}) out of range for n={n}")
        if i == j:
            raise ValidationError(f"self-loop on node {i}")
        a[i - 1, j - 1] = w
        a[j - 1, i - 1] = w
    return Graph(a)


def build_graph(spec: dict) -> Graph:
    """Dispatch on `{"kind": ..., ...}` (used by scenario configs)."""
    kind = spec.get("kind")
    if kind == "ring":
        return ring(int(spec["n"]))
    if kind == "star":
        return star(int(spec["n"]), spec.get("hub_weights"))
    if kind == "complete":
        return complete(int(spec["n"]))
    if kind == "circulant":
        return circulant_regular(int(spec["n"]), spec["offsets"])
    if kind == "custom":
        if "matrix" in spec:
            return custom(spec["matrix"])
        return from_json(spec)
    raise ValidationError(f"unknown graph kind {kind!r}")


# ---------------------------------------------------------------------------
# analysis

def is_connected(g: Graph) -> bool:
    """True iff every node pair is joined by nonzero-weight edges (sign ignored)."""
    return len(_component(g.adjacency, 0)) == g.n


def _component(a: np.ndarray, start: int) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        i = queue.popleft()
        for j in np.nonzero(a[i])[0]:
            if j not in seen:
                seen.add(int(j))
                queue.append(int(j))
    return seen


def components(g: Graph) -> list:
    """Connected components as sorted 0-based index lists."""
    out, left = [], set(range(g.n))
    while left:
        comp = _component(g.adjacency, min(left))
        out.append(sorted(comp))
        left -= comp
    return out


def is_structurally_balanced(g: Graph):
    """Sign-consistent two-coloring of a connected signed graph.

    Returns (True, (set1, set2)) with positive intra-set and negative
    inter-set edges, or (False, None). Unsigned graphs are balanced with
    an empty second set.
    """
    if not is_connected(g):
        raise ValidationError("structural balance is defined for connected graphs")
    a = g.adjacency
    color = np.zeros(g.n, dtype=int)
    color[0] = 1
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.nonzero(a[i])[0]:
            want = color[i] if a[i, j] > 0 else -color[i]
            if color[j] == 0:
                color[j] = want
                queue.append(int(j))
            elif color[j] != want:
                return False, None
    side1 = {int(i) for i in np.nonzero(color == 1)[0]}
    side2 = {int(i) for i in np.nonzero(color == -1)[0]}
    return True, (side1, side2)


def dominant_eigenpair(g: Graph, gap_rtol: float = 1e-8) -> Eigenpair:
    """Largest (signed) eigenvalue of the adjacency with unit eigenvector.

    Sign convention: Perron-positive when the vector can be made
    nonnegative, otherwise flipped so the largest-magnitude entry is
    positive. `simple=False` when the spectral gap is below `gap_rtol`
    relative to the spectral radius.
    """
    if not is_connected(g):
        raise ValidationError("dominant eigenpair requires a connected graph")
    try:
        w, vecs = np.linalg.eigh(g.adjacency)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericError(f"eigensolver failed: {exc}") from exc
    lam = float(w[-1])
    v = vecs[:, -1]
    scale = max(np.max(np.abs(w)), 1.0)
    simple = bool((w[-1] - w[-2]) > gap_rtol * scale)
    v = _fix_sign(v)
    resid = float(np.linalg.norm(g.adjacency @ v - lam * v))
    if resid > 1e-8:
        raise NumericError(f"eigenpair residual {resid:.3e} too large")
    return Eigenpair(lam, v, simple)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    if np.all(v >= -1e-12):
        return v
    if np.all(v <= 1e-12):
        return -v
    k = int(np.argmax(np.abs(v)))
    return v if v[k] > 0 else -v
