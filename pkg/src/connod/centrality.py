"""Constraint-induced centrality redistribution.

Exact dominant eigenpairs of the effective adjacency, first-order
symmetric eigenpair perturbation, and the closed-form approximations for
regular, complete, ring, and star communication graphs with a single
heterogeneous agent (node 1).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .constraints import ConstraintSet, effective_adjacency
from .errors import ValidationError
from .graphs import Eigenpair, Graph, components, dominant_eigenpair, is_connected


def pinv_psd(m: np.ndarray, rcond: float = 1e-10) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of a symmetric PSD matrix.

    Eigendecomposition with reciprocals of eigenvalues below
    rcond * max zeroed; the cutoff must be explicit because the inputs
    here ((A - dI)^2) are singular by construction.
    """
    m = np.asarray(m, dtype=float)
    if np.max(np.abs(m - m.T)) > 1e-12:
        raise ValidationError("pinv_psd expects a symmetric matrix")
    w, vecs = np.linalg.eigh(m)
    cutoff = rcond * np.max(np.abs(w)) if w.size else 0.0
    inv = np.where(np.abs(w) > cutoff, 1.0 / np.where(w == 0, 1.0, w), 0.0)
    return (vecs * inv) @ vecs.T


@dataclass(frozen=True)
class PerturbationInputs:
    """Base matrix K, its entrywise derivative dK/ddelta, and the target eigenpair."""

    K: np.ndarray
    Kprime: np.ndarray
    value: float
    vector: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.K, dtype=float)
        kp = np.asarray(self.Kprime, dtype=float)
        if np.max(np.abs(k - k.T)) > 1e-12 or np.max(np.abs(kp - kp.T)) > 1e-12:
            raise ValidationError("K and Kprime must be symmetric")
        v = np.asarray(self.vector, dtype=float)
        if abs(np.linalg.norm(v) - 1.0) > 1e-8:
            raise ValidationError("target eigenvector must be unit norm")
        if np.linalg.norm(k @ v - self.value * v) > 1e-8:
            raise ValidationError("(value, vector) is not an eigenpair of K")


def eigenpair_perturbation(inputs: PerturbationInputs, delta: float):
    """First-order eigenpair estimate under a delta-sized entry perturbation.

    dlambda/ddelta = v^T K' v;
    dv/ddelta = -[F F + 2 v v^T]^-1 F K' v with F = K - lambda I.
    The bracket is invertible exactly when lambda is simple.
    """
    k = np.asarray(inputs.K, dtype=float)
    kp = np.asarray(inputs.Kprime, dtype=float)
    v = np.asarray(inputs.vector, dtype=float)
    lam = inputs.value
    f = k - lam * np.eye(k.shape[0])
    bracket = f @ f + 2.0 * np.outer(v, v)
    if np.linalg.cond(bracket) > 1e12:
        raise ValidationError("eigenvalue is not simple: perturbation bracket is singular")
    dlam = float(v @ kp @ v)
    dv = -np.linalg.solve(bracket, f @ kp @ v)
    return lam + delta * dlam, v + delta * dv


def _regular_degree(g: Graph) -> float:
    deg = g.degree()
    if np.max(np.abs(deg - deg[0])) > 1e-10:
        raise ValidationError("graph is not regular")
    return float(deg[0])


def regular_approx(g: Graph, aligned_value: float) -> np.ndarray:
    """First-order centrality of a d-regular graph with heterogeneous node 1.

    v' = 1 + (1 - rho) B (-d^2 + d, M^T)^T with
    B = (1/2N) 1 1^T + ((A - dI)^2)^+ and m_1j the mutual-neighbor counts
    of node 1 and node j.
    """
    if not is_connected(g):
        raise ValidationError("regular approximation requires a connected graph")
    d = _regular_degree(g)
    a = g.adjacency
    n = g.n
    mutual = (a @ a)[0, 1:]
    rhs = np.concatenate(([-d * d + d], mutual))
    b_mat = np.ones((n, n)) / (2.0 * n) + pinv_psd((a - d * np.eye(n)) @ (a - d * np.eye(n)))
    return np.ones(n) + (1.0 - aligned_value) * (b_mat @ rhs)


def regular_lambda_approx(g: Graph, aligned_value: float) -> float:
    """lambda' = d (1 - (2/N)(1 - rho)) for the same setting."""
    d = _regular_degree(g)
    return d * (1.0 - (2.0 / g.n) * (1.0 - aligned_value))


def complete_approx(n: int, aligned_value: float) -> np.ndarray:
    """Complete-graph specialization: 1 + (1-rho)(N-2)/N^2 (-N+1, 1, ..., 1).

    Derivation via rank-one inverse update of the general regular-graph
    formula: B collapses to 1/N^2 on the (zero-sum) right-hand side
    (N-2)(-(N-1), 1, ..., 1), giving the (N-2)/N^2 coefficient. This is
    the unique scaling consistent with the general formula and with
    first-order (O(delta^2) residual) accuracy.
    """
    if n < 3:
        raise ValidationError("complete-graph approximation needs n >= 3")
    direction = np.ones(n)
    direction[0] = -n + 1
    return np.ones(n) + (1.0 - aligned_value) * (n - 2) / n**2 * direction


def ring_approx(n: int, aligned_value: float) -> np.ndarray:
    """Ring specialization, delta = rho - 1; three cases N=3, N=4, N>=5.

    For N >= 5 the DFT eigenvectors are summed; conjugate modes pair into
    real cosines, and the imaginary residue is asserted below 1e-12.
    """
    if n < 3:
        raise ValidationError("ring approximation needs n >= 3")
    delta = aligned_value - 1.0
    if n == 3:
        return np.ones(3) - (delta / 9.0) * np.array([-2.0, 1.0, 1.0])
    if n == 4:
        return np.ones(4) - (delta / 2.0) * np.array([-1.0, 0.0, 1.0, 0.0])
    k = np.arange(1, n)
    j = np.arange(n)
    omega = np.exp(2j * np.pi / n)
    modes = omega ** np.outer(k, j)  # row k: (1, w^k, ..., w^((n-1)k))
    cot2 = 1.0 / np.tan(np.pi * k / n) ** 2
    csum = (delta / n) * (cot2 @ modes)
    if np.max(np.abs(csum.imag)) > 1e-12:
        raise ValidationError("imaginary residue in ring centrality sum")
    return np.ones(n) + csum.real


def star_exact(n: int, alignments) -> tuple:
    """Exact dominant eigenpair of a constrained star (hub = node 1).

    With hub alignments rho_j, lambda = sqrt(sum rho_j^2) and the
    centrality is proportional to (lambda, rho_2, ..., rho_n).
    All alignments must be nonzero (else the effective star disconnects).
    """
    rho = np.asarray(alignments, dtype=float)
    if rho.shape != (n - 1,):
        raise ValidationError(f"need {n - 1} hub alignments, got {rho.shape}")
    if np.any(rho == 0):
        raise ValidationError("zero hub alignment violates the star hypothesis")
    s = float(np.sqrt(np.sum(rho**2)))
    vec = np.concatenate(([s], rho))
    return s, vec / np.linalg.norm(vec)


def sign_invariant_error(approx: np.ndarray, exact: np.ndarray) -> float:
    """Min-over-sign deviation of the unit-normalized vectors."""
    a = approx / np.linalg.norm(approx)
    e = exact / np.linalg.norm(exact)
    return float(min(np.linalg.norm(a - e), np.linalg.norm(a + e)))


def _is_unweighted_star(g: Graph) -> bool:
    a = g.adjacency
    spokes = np.allclose(a[0, 1:], 1.0) and np.allclose(a[1:, 0], 1.0)
    interior = np.allclose(a[1:, 1:], 0.0)
    return bool(spokes and interior)


def _single_heterogeneous_node1(c: ConstraintSet):
    """rho = p_1 . p_shared when agents 2..n share one constraint direction."""
    phat = c.unit_vectors()
    rest = phat[1:]
    aligned = np.abs(rest @ rest[0])
    if np.all(np.abs(aligned - 1.0) < 1e-12):
        return float(phat[0] @ rest[0])
    return None


@dataclass
class CentralityReport:
    """Exact vs. approximate influence distribution on the effective network."""

    exact: Eigenpair | None
    approx: np.ndarray | None = None
    lambda_approx: float | None = None
    delta: float | None = None
    error: float | None = None
    ranking: list | None = None
    approx_kind: str | None = None
    components: list | None = None

    def to_csv(self, path, header_comments=()):
        with open(path, "w", newline="") as fh:
            for line in header_comments:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh)
            writer.writerow(["node", "exact", "approx", "abs_diff"])
            exact = self.exact.vector
            approx = self.approx
            if approx is not None:
                a = approx / np.linalg.norm(approx)
                if np.linalg.norm(a - exact) > np.linalg.norm(a + exact):
                    a = -a
            for i in range(exact.shape[0]):
                if approx is None:
                    writer.writerow([i + 1, f"{exact[i]:.12g}", "", ""])
                else:
                    writer.writerow(
                        [i + 1, f"{exact[i]:.12g}", f"{a[i]:.12g}",
                         f"{abs(a[i] - exact[i]):.12g}"]
                    )

    def to_json(self, path=None):
        doc = {
            "lambda_exact": self.exact.value if self.exact else None,
            "lambda_approx": self.lambda_approx,
            "delta": self.delta,
            "error": self.error,
            "ranking": self.ranking,
            "approx_kind": self.approx_kind,
            "components": self.components,
        }
        if path is not None:
            with open(path, "w") as fh:
                json.dump(doc, fh, indent=2)
        return doc


def influence_report(g: Graph, c: ConstraintSet) -> CentralityReport:
    """Exact dominant eigenpair of A' plus any applicable closed form.

    A disconnected effective network (orthogonal constraints severing
    edges) yields a per-component report instead of an eigenpair.
    """
    en = effective_adjacency(g, c)
    gp = en.graph_prime
    delta = float(en.alignment[0, 1]) - 1.0
    if not is_connected(gp):
        comps = [[i + 1 for i in comp] for comp in components(gp)]
        return CentralityReport(exact=None, delta=delta, components=comps)
    exact = dominant_eigenpair(gp)
    approx = None
    lam_approx = None
    kind = None
    rho = _single_heterogeneous_node1(c)
    if _is_unweighted_star(g):
        phat = c.unit_vectors()
        alignments = phat[1:] @ phat[0]
        if np.all(alignments != 0):
            lam_approx, approx = star_exact(g.n, alignments)
            kind = "star_exact"
    elif rho is not None and g.is_regular() and np.all(np.isin(g.adjacency, (0.0, 1.0))):
        approx = regular_approx(g, rho)
        lam_approx = regular_lambda_approx(g, rho)
        kind = "regular_first_order"
        delta = rho - 1.0
    err = sign_invariant_error(approx, exact.vector) if approx is not None else None
    order = sorted(range(g.n), key=lambda i: (-exact.vector[i], i))
    return CentralityReport(
        exact=exact,
        approx=approx,
        lambda_approx=lam_approx,
        delta=delta,
        error=err,
        ranking=[i + 1 for i in order],
        approx_kind=kind,
    )
