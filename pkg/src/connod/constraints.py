"""Per-agent projection constraints, effective networks, effective biases.

Each agent's opinion is confined to the span of a basis over option space.
Rank-one constraints (one vector per agent) admit the exact reduced model;
higher ranks are supported by the full simulator only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedRankError, ValidationError
from .graphs import Graph

_GRAM_COND_MAX = 1e12


def projection_matrix(basis) -> np.ndarray:
    """Orthogonal projector onto the column span of `basis`.

    P = B (B^T B)^-1 B^T via Cholesky of the Gram matrix; a Gram condition
    number above 1e12 rejects the basis as rank-deficient.
    """
    b = np.atleast_2d(np.asarray(basis, dtype=float))
    if b.shape[0] == 1:
        b = b.T
    if not np.any(b):
        raise ValidationError("zero basis vector has no span")
    gram = b.T @ b
    w = np.linalg.eigvalsh(gram)
    if w[0] <= 0 or w[-1] / w[0] > _GRAM_COND_MAX:
        raise ValidationError(
            f"basis is rank-deficient (Gram condition {w[-1] / max(w[0], 1e-300):.2e})"
        )
    chol = np.linalg.cholesky(gram)
    half = np.linalg.solve(chol, b.T)
    return half.T @ half


@dataclass(frozen=True)
class ConstraintSet:
    """One basis matrix (n_options x k_i) per agent."""

    n_options: int
    bases: tuple

    def __post_init__(self):
        bases = []
        for i, basis in enumerate(self.bases):
            b = np.atleast_2d(np.asarray(basis, dtype=float))
            if b.shape[0] == 1:
                b = b.T
            if b.shape[0] != self.n_options:
                raise ValidationError(
                    f"agent {i + 1}: basis has {b.shape[0]} rows, expected {self.n_options}"
                )
            b.setflags(write=False)
            bases.append(b)
        object.__setattr__(self, "bases", tuple(bases))
        # validates full column rank for every agent
        object.__setattr__(self, "_projectors", tuple(projection_matrix(b) for b in self.bases))

    @property
    def n_agents(self) -> int:
        return len(self.bases)

    @property
    def ranks(self) -> tuple:
        return tuple(b.shape[1] for b in self.bases)

    @property
    def rank_one(self) -> bool:
        return all(k == 1 for k in self.ranks)

    @property
    def projectors(self) -> tuple:
        return self._projectors

    def unit_vectors(self) -> np.ndarray:
        """(n_agents, n_options) array of normalized constraint vectors (rank one)."""
        if not self.rank_one:
            raise UnsupportedRankError("unit vectors are defined for rank-one constraints")
        p = np.vstack([b[:, 0] for b in self.bases])
        return p / np.linalg.norm(p, axis=1, keepdims=True)

    @classmethod
    def from_vectors(cls, vectors) -> "ConstraintSet":
        vecs = [np.asarray(v, dtype=float).reshape(-1, 1) for v in vectors]
        return cls(vecs[0].shape[0], tuple(vecs))

    @classmethod
    def homogeneous(cls, n_agents: int, vector) -> "ConstraintSet":
        return cls.from_vectors([vector] * n_agents)

    @classmethod
    def from_json(cls, obj, n_agents: int) -> "ConstraintSet":
        """Load `{"options": N, "vectors": {"1": [...]}, "default": [...]}`.

        Agent keys are 1-based; "default" fills unlisted agents. A nested
        list (N rows of k entries) is read as a rank-k basis matrix.
        """
        if isinstance(obj, str):
            with open(obj) as fh:
                obj = json.load(fh)
        n_opt = int(obj["options"])
        default = obj.get("default")
        listed = {int(k): v for k, v in obj.get("vectors", {}).items()}
        bases = []
        for i in range(1, n_agents + 1):
            v = listed.get(i, default)
            if v is None:
                raise ValidationError(f"agent {i} has no constraint vector and no default")
            basis = np.asarray(v, dtype=float)
            if basis.ndim == 1:
                basis = basis.reshape(-1, 1)
            if basis.shape[0] != n_opt:
                raise ValidationError(f"agent {i}: basis row count != options")
            bases.append(basis)
        return cls(n_opt, tuple(bases))


@dataclass(frozen=True)
class EffectiveNetwork:
    """Constraint-weighted communication graph: [A']_ik = (p_i . p_k)[A]_ik."""

    graph_prime: Graph
    alignment: np.ndarray


@dataclass(frozen=True)
class BiasField:
    """Raw per-option biases and their projections onto the constraint vectors."""

    b: np.ndarray
    b_e: np.ndarray


def effective_adjacency(g: Graph, c: ConstraintSet) -> EffectiveNetwork:
    """Entrywise product of the adjacency with pairwise constraint alignments."""
    if c.n_agents != g.n:
        raise ValidationError(f"constraint set has {c.n_agents} agents, graph has {g.n}")
    if not c.rank_one:
        raise UnsupportedRankError("effective adjacency requires rank-one constraints")
    phat = c.unit_vectors()
    alignment = phat @ phat.T
    return EffectiveNetwork(Graph(alignment * g.adjacency), alignment)


def effective_bias(c: ConstraintSet, b) -> BiasField:
    """Project each agent's bias vector onto its constraint direction."""
    if not c.rank_one:
        raise UnsupportedRankError("effective bias requires rank-one constraints")
    b = np.asarray(b, dtype=float)
    if b.shape != (c.n_agents, c.n_options):
        raise ValidationError(
            f"bias shape {b.shape} != (n_agents, n_options) = ({c.n_agents}, {c.n_options})"
        )
    phat = c.unit_vectors()
    return BiasField(b, np.sum(phat * b, axis=1))
