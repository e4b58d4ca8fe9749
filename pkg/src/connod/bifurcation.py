"""Pitchfork analysis of the reduced system: thresholds, cubic reduction,
unfolding-polynomial root curves, and Newton-continued equilibrium sweeps.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .constraints import BiasField, ConstraintSet, effective_adjacency, effective_bias
from .dynamics import NodParams, get_sigmoid, reduced_jacobian, reduced_rhs
from .errors import DegenerateThresholdError, NumericError, ValidationError
from .graphs import Graph

RESIDUAL_TOL = 1e-10


def critical_attention(p: NodParams, lam: float) -> float:
    """u* = d / (alpha + lambda * gamma); positive u* means supercritical."""
    denom = p.alpha + lam * p.gamma
    if abs(denom) < 1e-12:
        raise DegenerateThresholdError(f"alpha + lambda*gamma = {denom:.3e} is degenerate")
    return p.d / denom


def jacobian_origin(p: NodParams, en, u: float) -> np.ndarray:
    """Closed-form Jacobian at y = 0: (u*alpha - d) I + u*gamma A'."""
    a_prime = en.graph_prime.adjacency
    return (u * p.alpha - p.d) * np.eye(a_prime.shape[0]) + u * p.gamma * a_prime


@dataclass(frozen=True)
class LsReduction:
    """Cubic reduction h(x, u) = a (u - u*) x + b_cubic x^3 + unfold."""

    u_star: float
    a: float
    b_cubic: float
    unfold: float
    v: np.ndarray
    lam: float

    def evaluate(self, x: float, u: float) -> float:
        return self.a * (u - self.u_star) * x + self.b_cubic * x**3 + self.unfold


def _select_mode(a_prime: np.ndarray, mode: int):
    w, vecs = np.linalg.eigh(a_prime)
    order = np.argsort(w)[::-1]  # descending by signed value
    idx = order[mode]
    lam = float(w[idx])
    gaps = np.abs(w - lam)
    gaps[idx] = np.inf
    scale = max(np.max(np.abs(w)), 1.0)
    if np.min(gaps) <= 1e-8 * scale:
        raise ValidationError(f"selected eigenvalue {lam:.6g} is not simple")
    v = vecs[:, idx]
    if np.all(v <= 1e-12):
        v = -v
    elif not np.all(v >= -1e-12):
        k = int(np.argmax(np.abs(v)))
        if v[k] < 0:
            v = -v
    return lam, v


def third_derivative_at_zero(sigmoid_name: str) -> float:
    """S'''(0); analytic for tanh, fourth-order finite difference otherwise."""
    if sigmoid_name == "tanh":
        return -2.0
    fn = get_sigmoid(sigmoid_name).fn
    h = 1e-3
    return float((fn(2 * h) - 2 * fn(h) + 2 * fn(-h) - fn(-2 * h)) / (2 * h**3))


def ls_coefficients(
    p: NodParams, g: Graph, c: ConstraintSet, b, mode: int = 0
) -> LsReduction:
    """Exact cubic Lyapunov-Schmidt data for the chosen eigenmode of A'.

    The cubic coefficient is the x^3 Taylor coefficient of the reduced
    field along the kernel eigenvector at (0, u*), i.e. one sixth of the
    third directional derivative:
    b = (1/6) S'''(0) (u*)^3 sum_i v_i sum_j p_ij (alpha v_i p_ij
        + gamma sum_k A_ik v_k p_kj)^3.
    With this normalization the roots of a (u-u*) x + b x^3 + unfold
    approximate the equilibria near the singularity.
    """
    en = effective_adjacency(g, c)
    lam, v = _select_mode(en.graph_prime.adjacency, mode)
    u_star = critical_attention(p, lam)
    a = p.alpha + lam * p.gamma
    phat = c.unit_vectors()
    lifted = v[:, None] * phat
    inner = p.alpha * lifted + p.gamma * (g.adjacency @ lifted)
    s3 = third_derivative_at_zero(p.sigmoid)
    b_cubic = s3 / 6.0 * u_star**3 * float(np.sum(v[:, None] * phat * inner**3))
    unfold = float(v @ effective_bias(c, b).b_e)
    return LsReduction(u_star, a, b_cubic, unfold, v, lam)


# ---------------------------------------------------------------------------
# diagrams

@dataclass(frozen=True)
class DiagramPoint:
    u: float
    branch_id: int
    stable: bool
    x_ls: float
    y: np.ndarray


@dataclass
class BifurcationDiagram:
    """Equilibrium branches over a u grid, from either method."""

    points: list
    method: str  # "unfolding" | "sweep"
    gaps: list = field(default_factory=list)

    def at(self, u: float, atol: float = 1e-9) -> list:
        return [pt for pt in self.points if abs(pt.u - u) <= atol]

    def branch_counts(self) -> dict:
        counts = {}
        for pt in self.points:
            counts[pt.u] = counts.get(pt.u, 0) + 1
        return counts

    def to_csv(self, path, header_comments=()):
        n = self.points[0].y.shape[0] if self.points else 0
        with open(path, "w", newline="") as fh:
            for line in header_comments:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh)
            writer.writerow(
                ["u", "branch_id", "stability", "x_ls"] + [f"y_{i + 1}" for i in range(n)]
            )
            gap_set = set(self.gaps)
            for u in sorted({pt.u for pt in self.points} | gap_set):
                if u in gap_set:
                    fh.write(f"# gap: no converged equilibria at u = {u:.12g}\n")
                for pt in sorted(self.at(u), key=lambda q: q.branch_id):
                    writer.writerow(
                        [f"{pt.u:.12g}", pt.branch_id,
                         "stable" if pt.stable else "unstable", f"{pt.x_ls:.12g}"]
                        + [f"{yy:.12g}" for yy in pt.y]
                    )


def _real_cubic_roots(b3: float, lin: float, const: float) -> np.ndarray:
    """Real roots of b3 x^3 + lin x + const = 0, Newton-polished."""
    roots = np.roots([b3, 0.0, lin, const])
    real = []
    for r in roots:
        if abs(r.imag) < 1e-7 * max(1.0, abs(r)):
            x = float(r.real)
            for _ in range(30):  # polish on the real line
                fx = b3 * x**3 + lin * x + const
                dfx = 3 * b3 * x**2 + lin
                if abs(dfx) < 1e-14:
                    break
                step = fx / dfx
                x -= step
                if abs(step) < 1e-15:
                    break
            real.append(x)
    real.sort()
    # collapse numerically repeated roots
    out = []
    for x in real:
        if not out or abs(x - out[-1]) > 1e-9:
            out.append(x)
    return np.asarray(out)


def unfolding_roots(ls: LsReduction, u_range, resolution: int = 101) -> BifurcationDiagram:
    """Root curves of the unfolding polynomial over a u grid.

    Stability is the sign of dh/dx; equilibria are lifted to y = x v for
    the diagram's vector columns.
    """
    if ls.b_cubic == 0:
        raise ValidationError("vanishing cubic coefficient: unfolding is degenerate")
    u_grid = np.linspace(u_range[0], u_range[1], resolution)
    points = []
    prev: list = []
    next_id = 0
    for u in u_grid:
        lin = ls.a * (u - ls.u_star)
        xs = _real_cubic_roots(ls.b_cubic, lin, ls.unfold)
        ids = _link_ids([np.array([x]) for x in xs], prev, next_id)
        next_id = max([next_id] + [i + 1 for i in ids])
        prev = [(np.array([x]), i) for x, i in zip(xs, ids)]
        for x, bid in zip(xs, ids):
            stable = (lin + 3 * ls.b_cubic * x**2) < 0
            points.append(DiagramPoint(float(u), bid, bool(stable), float(x), x * ls.v))
    return BifurcationDiagram(points, "unfolding")


def _link_ids(states: list, prev: list, next_id: int) -> list:
    """Greedy nearest-neighbor branch continuation across adjacent u samples."""
    ids = [-1] * len(states)
    used = set()
    order = sorted(
        ((float(np.linalg.norm(s - ps)), i, j)
         for i, s in enumerate(states)
         for j, (ps, _) in enumerate(prev)),
        key=lambda t: t[0],
    )
    for _, i, j in order:
        if ids[i] == -1 and j not in used:
            ids[i] = prev[j][1]
            used.add(j)
    for i in range(len(states)):
        if ids[i] == -1:
            ids[i] = next_id
            next_id += 1
    return ids


def _newton(y0: np.ndarray, g, c, p, bf: BiasField, tol: float = 1e-12, max_iter: int = 100):
    y = y0.astype(float).copy()
    for _ in range(max_iter):
        res = reduced_rhs(y, g, c, p, bf)
        if np.linalg.norm(res) <= tol:
            return y
        try:
            step = np.linalg.solve(reduced_jacobian(y, g, c, p), res)
        except np.linalg.LinAlgError:
            return None
        y = y - step
        if not np.all(np.isfinite(y)):
            return None
    res = reduced_rhs(y, g, c, p, bf)
    return y if np.linalg.norm(res) <= tol else None


def equilibrium_sweep(
    g: Graph,
    c: ConstraintSet,
    p: NodParams,
    b,
    u_range,
    resolution: int = 41,
    seeds=None,
) -> BifurcationDiagram:
    """Newton continuation of reduced equilibria over a u grid.

    Seeds per u: the origin, +/- the predicted pitchfork amplitude along
    the kernel eigenvector (and a 0.1x version), user seeds, and every
    equilibrium found at the previous grid point. Duplicates within 1e-6
    are merged; a u with no converged seed is recorded as a gap.
    """
    ls = ls_coefficients(p, g, c, b)
    bf = effective_bias(c, b)
    u_grid = np.linspace(u_range[0], u_range[1], resolution)
    user_seeds = [np.asarray(s, dtype=float) for s in (seeds or [])]
    points = []
    gaps = []
    prev: list = []
    next_id = 0
    for u in u_grid:
        pu = p.with_u(float(u))
        trial = [np.zeros(g.n)] + [s.copy() for s in user_seeds]
        if ls.b_cubic < 0 and u > ls.u_star:
            # LS amplitude underestimates the branch once tanh saturates,
            # so seed several multiples of it along the kernel direction
            amp = np.sqrt(ls.a * (u - ls.u_star) / -ls.b_cubic)
            for scale in (0.1, 0.5, 1.0, 2.0, 4.0):
                trial += [scale * amp * ls.v, -scale * amp * ls.v]
        trial += [eq.copy() for eq, _ in prev]
        found = []
        for y0 in trial:
            y = _newton(y0, g, c, pu, bf)
            if y is None:
                continue
            if any(np.linalg.norm(y - q) <= 1e-6 for q in found):
                continue
            if np.linalg.norm(reduced_rhs(y, g, c, pu, bf), np.inf) > RESIDUAL_TOL:
                continue
            found.append(y)
        if not found:
            gaps.append(float(u))
            prev = []
            continue
        ids = _link_ids(found, prev, next_id)
        next_id = max([next_id] + [i + 1 for i in ids])
        prev = list(zip(found, ids))
        for y, bid in zip(found, ids):
            eigs = np.linalg.eigvals(reduced_jacobian(y, g, c, pu))
            stable = bool(np.max(eigs.real) < 0)
            points.append(DiagramPoint(float(u), bid, stable, float(ls.v @ y), y))
    return BifurcationDiagram(points, "sweep", gaps)


def threshold_by_bisection(
    p: NodParams, en, lo: float, hi: float, tol: float = 1e-12
) -> float:
    """Zero crossing of the leading origin-Jacobian eigenvalue in u.

    Independent check of the closed-form u*; raises if the bracket does
    not straddle the crossing.
    """
    def leading(u):
        return float(np.max(np.linalg.eigvalsh(jacobian_origin(p, en, u))))

    flo, fhi = leading(lo), leading(hi)
    if flo * fhi > 0:
        raise NumericError(f"bracket [{lo}, {hi}] does not straddle the threshold")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = leading(mid)
        if abs(hi - lo) < tol:
            return mid
        if flo * fmid <= 0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)
