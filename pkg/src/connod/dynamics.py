"""Constrained opinion dynamics: full and reduced vector fields, RK4 runs.

Full state Z is (n_agents, n_options); each agent's update is projected
onto its constraint subspace, so that subspace is invariant under the
flow. With rank-one constraints the dynamics collapse exactly to the
scalar effective opinions y_i = p_i . Z_i.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .constraints import BiasField, ConstraintSet, effective_bias
from .errors import DivergenceError, UnsupportedRankError, ValidationError
from .graphs import Graph


# ---------------------------------------------------------------------------
# sigmoids

@dataclass(frozen=True)
class Sigmoid:
    name: str
    fn: object
    deriv: object


def _tanh_deriv(z):
    t = np.tanh(z)
    return 1.0 - t * t


_SIGMOIDS = {}


def register_sigmoid(name: str, fn, deriv=None, check: bool = True) -> Sigmoid:
    """Register a saturating nonlinearity after validating its contract.

    Required: S(0) = 0, S odd, S'(0) = 1, sign(S''(z)) = -sign(z).
    `deriv` defaults to a central finite difference.
    """
    if check:
        z = np.linspace(0.05, 3.0, 40)
        if abs(float(fn(0.0))) > 1e-12:
            raise ValidationError(f"sigmoid {name!r}: S(0) != 0")
        if np.max(np.abs(fn(z) + fn(-z))) > 1e-10:
            raise ValidationError(f"sigmoid {name!r} is not odd")
        h = 1e-5
        slope = (fn(h) - fn(-h)) / (2 * h)
        if abs(slope - 1.0) > 1e-6:
            raise ValidationError(f"sigmoid {name!r}: S'(0) = {slope:.6f}, expected 1")
        second = fn(z + h) - 2 * fn(z) + fn(z - h)
        if np.max(second) > 1e-12:
            raise ValidationError(f"sigmoid {name!r} is not concave for z > 0")
    if deriv is None:
        hh = 1e-6
        deriv = lambda z, _f=fn: (_f(z + hh) - _f(z - hh)) / (2 * hh)  # noqa: E731
    sig = Sigmoid(name, fn, deriv)
    _SIGMOIDS[name] = sig
    return sig


register_sigmoid("tanh", np.tanh, _tanh_deriv, check=False)


def get_sigmoid(name: str) -> Sigmoid:
    try:
        return _SIGMOIDS[name]
    except KeyError:
        raise ValidationError(f"unknown sigmoid {name!r}") from None


# ---------------------------------------------------------------------------
# parameters and trajectories

@dataclass(frozen=True)
class NodParams:
    """Model gains: damping d, attention u, self-reinforcement alpha, social gamma."""

    d: float
    u: float
    alpha: float = 1.0
    gamma: float = 0.5
    sigmoid: str = "tanh"

    def __post_init__(self):
        for name in ("d", "u", "alpha", "gamma"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"parameter {name} must be > 0")
        get_sigmoid(self.sigmoid)

    def with_u(self, u: float) -> "NodParams":
        return NodParams(self.d, u, self.alpha, self.gamma, self.sigmoid)


@dataclass
class Trajectory:
    """Sampled states of one integration run.

    `states` is (n_samples, n_agents, n_options) for the full system or
    (n_samples, n_agents) for the reduced one.
    """

    times: np.ndarray
    states: np.ndarray
    kind: str  # "full" | "reduced"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.times.shape[0] != self.states.shape[0]:
            raise ValidationError("sample count != time count")
        if not np.all(np.diff(self.times) > 0):
            raise ValidationError("times must be strictly increasing")
        if not np.all(np.isfinite(self.states)):
            raise ValidationError("trajectory has non-finite entries")

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def effective(self, c: ConstraintSet) -> np.ndarray:
        """(n_samples, n_agents) effective opinions p_i . Z_i(t)."""
        if self.kind == "reduced":
            return self.states
        phat = c.unit_vectors()
        return np.einsum("tij,ij->ti", self.states, phat)

    def to_csv(self, path, c: ConstraintSet | None = None, header_comments=()):
        """Write the trajectory in agent-major column order.

        Columns: t, z_<agent>_<option>... (full runs), y_<agent>... when
        effective opinions are available (reduced runs, or full runs with
        a rank-one constraint set supplied).
        """
        cols = ["t"]
        blocks = [self.times[:, None]]
        if self.kind == "full":
            n, n_opt = self.states.shape[1:]
            cols += [f"z_{i + 1}_{j + 1}" for i in range(n) for j in range(n_opt)]
            blocks.append(self.states.reshape(self.states.shape[0], -1))
            if c is not None and c.rank_one:
                cols += [f"y_{i + 1}" for i in range(n)]
                blocks.append(self.effective(c))
        else:
            n = self.states.shape[1]
            cols += [f"y_{i + 1}" for i in range(n)]
            blocks.append(self.states)
        data = np.hstack(blocks)
        with open(path, "w", newline="") as fh:
            for line in header_comments:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh)
            writer.writerow(cols)
            for row in data:
                writer.writerow([f"{x:.12g}" for x in row])


# ---------------------------------------------------------------------------
# vector fields

def full_rhs(Z, g: Graph, c: ConstraintSet, p: NodParams, b) -> np.ndarray:
    """Projected update P_i F_i(Z) for every agent, any constraint rank."""
    Z = np.asarray(Z, dtype=float)
    b = np.asarray(b, dtype=float)
    if Z.shape != (g.n, c.n_options) or b.shape != Z.shape:
        raise ValidationError(
            f"state/bias shape must be ({g.n}, {c.n_options}), got {Z.shape} / {b.shape}"
        )
    sig = get_sigmoid(p.sigmoid)
    arg = p.u * (p.alpha * Z + p.gamma * (g.adjacency @ Z))
    f = -p.d * Z + sig.fn(arg) + b
    proj = np.stack(c.projectors)
    return np.einsum("ijk,ik->ij", proj, f)


def reduced_rhs(y, g: Graph, c: ConstraintSet, p: NodParams, bf: BiasField) -> np.ndarray:
    """Effective-opinion vector field Phi(y, u) for rank-one constraints.

    The sigmoid acts componentwise on the option-space argument before the
    inner product with the constraint direction.
    """
    if not c.rank_one:
        raise UnsupportedRankError("reduced dynamics require rank-one constraints")
    y = np.asarray(y, dtype=float)
    sig = get_sigmoid(p.sigmoid)
    phat = c.unit_vectors()
    lifted = y[:, None] * phat
    arg = p.u * (p.alpha * lifted + p.gamma * (g.adjacency @ lifted))
    return -p.d * y + np.sum(phat * sig.fn(arg), axis=1) + bf.b_e


def reduced_jacobian(y, g: Graph, c: ConstraintSet, p: NodParams) -> np.ndarray:
    """Analytic Jacobian of `reduced_rhs` with respect to y."""
    if not c.rank_one:
        raise UnsupportedRankError("reduced dynamics require rank-one constraints")
    y = np.asarray(y, dtype=float)
    sig = get_sigmoid(p.sigmoid)
    phat = c.unit_vectors()
    lifted = y[:, None] * phat
    arg = p.u * (p.alpha * lifted + p.gamma * (g.adjacency @ lifted))
    sp = sig.deriv(arg)
    jac = p.u * p.gamma * g.adjacency * ((phat * sp) @ phat.T)
    diag = -p.d + p.u * p.alpha * np.sum(phat * phat * sp, axis=1)
    jac[np.diag_indices_from(jac)] += diag
    return jac


# ---------------------------------------------------------------------------
# integration

def _rk4(rhs, x0: np.ndarray, horizon: float, dt: float, sample_every: int):
    n_steps = int(round(horizon / dt))
    if n_steps < 1:
        raise ValidationError("horizon must cover at least one step")
    x = x0.copy()
    times = [0.0]
    samples = [x.copy()]
    for k in range(1, n_steps + 1):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * dt * k1)
        k3 = rhs(x + 0.5 * dt * k2)
        k4 = rhs(x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise DivergenceError(k * dt)
        if k % sample_every == 0 or k == n_steps:
            times.append(k * dt)
            samples.append(x.copy())
    return np.array(times), np.stack(samples)


def initial_state(n_agents: int, n_options: int, seed: int, eps: float = 0.01) -> np.ndarray:
    """Seeded uniform initial condition in [-eps, eps]^(n*N_o)."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-eps, eps, size=(n_agents, n_options))


def project_state(Z, c: ConstraintSet) -> np.ndarray:
    proj = np.stack(c.projectors)
    return np.einsum("ijk,ik->ij", proj, np.asarray(Z, dtype=float))


def integrate_full(
    g: Graph,
    c: ConstraintSet,
    p: NodParams,
    b,
    z0,
    horizon: float = 100.0,
    dt: float = 0.01,
    sample_every: int = 10,
    project_initial: bool = True,
    strict: bool = False,
    metadata: dict | None = None,
) -> Trajectory:
    """RK4 integration of the full constrained system.

    A non-constraint-satisfying z0 is projected by default; with
    `strict=True` it is rejected instead.
    """
    if dt <= 0 or horizon < dt:
        raise ValidationError("need dt > 0 and horizon >= dt")
    z0 = np.asarray(z0, dtype=float)
    b = np.asarray(b, dtype=float)
    residual = z0 - project_state(z0, c)
    if np.max(np.abs(residual)) > 1e-12:
        if strict:
            raise ValidationError("initial state violates the projection constraints")
        if project_initial:
            z0 = project_state(z0, c)
    times, states = _rk4(
        lambda z: full_rhs(z, g, c, p, b), z0, horizon, dt, sample_every
    )
    meta = {"dt": dt, "horizon": horizon, "params": p}
    meta.update(metadata or {})
    return Trajectory(times, states, "full", meta)


def integrate_reduced(
    g: Graph,
    c: ConstraintSet,
    p: NodParams,
    bf: BiasField,
    y0,
    horizon: float = 100.0,
    dt: float = 0.01,
    sample_every: int = 10,
    metadata: dict | None = None,
) -> Trajectory:
    """RK4 integration of the exact rank-one reduced system."""
    if dt <= 0 or horizon < dt:
        raise ValidationError("need dt > 0 and horizon >= dt")
    y0 = np.asarray(y0, dtype=float)
    times, states = _rk4(
        lambda y: reduced_rhs(y, g, c, p, bf), y0, horizon, dt, sample_every
    )
    meta = {"dt": dt, "horizon": horizon, "params": p}
    meta.update(metadata or {})
    return Trajectory(times, states, "reduced", meta)


def constraint_drift(traj: Trajectory, c: ConstraintSet) -> np.ndarray:
    """Per-agent max over time of the out-of-subspace component norm."""
    if traj.kind != "full":
        raise ValidationError("constraint drift needs a full-state trajectory")
    proj = np.stack(c.projectors)
    ortho = traj.states - np.einsum("ijk,tik->tij", proj, traj.states)
    return np.max(np.linalg.norm(ortho, axis=2), axis=0)


def full_reduced_equivalence(
    g: Graph,
    c: ConstraintSet,
    p: NodParams,
    b,
    y0,
    horizon: float = 50.0,
    dt: float = 0.01,
) -> float:
    """Max deviation between projected full and reduced trajectories.

    Both systems start from the consistent state Z_i(0) = y_i(0) p_i.
    """
    if not c.rank_one:
        raise UnsupportedRankError("equivalence check requires rank-one constraints")
    y0 = np.asarray(y0, dtype=float)
    phat = c.unit_vectors()
    bf = effective_bias(c, b)
    z0 = y0[:, None] * phat
    full = integrate_full(g, c, p, b, z0, horizon, dt, sample_every=1)
    red = integrate_reduced(g, c, p, bf, y0, horizon, dt, sample_every=1)
    return float(np.max(np.abs(full.effective(c) - red.states)))
