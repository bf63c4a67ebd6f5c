"""Vector-ensemble decompositions of density matrices and zero padding."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ShrinkNotAllowed
from .linalg import as_vector, check_density_matrix, hermitian_eig, vector_from_literal, vector_to_literal

PRUNE_TOL = 1e-12


@dataclass(frozen=True)
class VectorEnsemble:
    """Weighted unit vectors; ``vectors`` are stored already padded to ``padded_dim``."""

    vectors: tuple
    weights: tuple
    system_dim: int
    padded_dim: int = field(default=0)

    def __post_init__(self):
        if not self.padded_dim:
            object.__setattr__(self, "padded_dim", 2 * self.system_dim)
        vecs = tuple(pad(v, self.padded_dim) for v in self.vectors)
        w = tuple(float(x) for x in self.weights)
        if len(vecs) != len(w) or not vecs:
            raise ValueError("ensemble needs matching, non-empty vectors and weights")
        if min(w) < 0 or abs(sum(w) - 1) > 1e-10:
            raise ValueError("ensemble weights must be nonnegative and sum to 1")
        for v in vecs:
            if abs(np.linalg.norm(v) - 1) > 1e-10:
                raise ValueError("ensemble vectors must have unit norm")
            if np.any(np.abs(v[self.system_dim:]) > 0):
                raise ValueError("padded components must be zero")
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "weights", w)

    def density_matrix(self) -> np.ndarray:
        n = self.system_dim
        D = np.zeros((n, n), dtype=np.complex128)
        for w, v in zip(self.weights, self.vectors):
            D += w * np.outer(v[:n], np.conj(v[:n]))
        return D

    def to_json(self) -> dict:
        return {"weights": list(self.weights), "vectors": [vector_to_literal(v) for v in self.vectors]}

    @classmethod
    def from_json(cls, obj) -> "VectorEnsemble":
        vecs = [vector_from_literal(v) for v in obj["vectors"]]
        n = int(obj.get("system_dim", vecs[0].size // 2))
        return cls(tuple(vecs), tuple(obj["weights"]), n)


def pad(v, target_dim) -> np.ndarray:
    v = as_vector(v)
    if target_dim < v.size:
        raise ShrinkNotAllowed(f"cannot pad a length-{v.size} vector down to {target_dim}")
    out = np.zeros(int(target_dim), dtype=np.complex128)
    out[: v.size] = v
    return out


def decompose_density(D) -> VectorEnsemble:
    """Eigen-ensemble of ``D``: eigenvectors with eigenvalue above 1e-12, weighted by eigenvalue."""
    D = check_density_matrix(D)
    w, V = hermitian_eig(D, tol=1e-10)
    keep = w > PRUNE_TOL
    w = w[keep]
    w = w / w.sum()
    vecs = tuple(V[:, k] for k in np.flatnonzero(keep))
    return VectorEnsemble(vecs, tuple(w), D.shape[0])


def markovian_ensemble() -> VectorEnsemble:
    """Non-orthogonal two-vector ensemble of ``(1/4)[[1, 1], [1, 3]]``.

    ``v0 = |1>`` and ``v1 = (|0> + |1>)/sqrt(2)`` with equal weights.
    """
    v0 = np.array([0, 1], dtype=np.complex128)
    v1 = np.array([1, 1], dtype=np.complex128) / np.sqrt(2)
    return VectorEnsemble((v0, v1), (0.5, 0.5), 2)


#: Initial state of the Markovian benchmark.
MARKOVIAN_D0 = np.array([[1, 1], [1, 3]], dtype=np.complex128) / 4
