"""Sz.-Nagy 1-dilation of contractions into unitaries on a doubled space."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import KrausMap
from .exceptions import NonSquare, NotContraction
from .linalg import as_matrix, dagger, matrix_to_literal, psd_sqrt

CONTRACTION_TOL = 1e-9


@dataclass(frozen=True)
class DilatedUnitary:
    matrix: np.ndarray
    source_index: int = 0
    system_dim: int = 2
    gamma_t: float | None = None

    @property
    def block(self) -> np.ndarray:
        """Top-left ``n x n`` block (the dilated contraction)."""
        n = self.system_dim
        return self.matrix[:n, :n]

    def to_json(self) -> dict:
        out = {
            "source_index": int(self.source_index),
            "system_dim": int(self.system_dim),
            "gamma_t": None if self.gamma_t is None else float(self.gamma_t),
        }
        out.update(matrix_to_literal(self.matrix))
        return out


def dilate(M, tol=CONTRACTION_TOL, source_index=0, gamma_t=None) -> DilatedUnitary:
    """Unitary ``[[M, D_{M^dag}], [D_M, -M^dag]]`` with ``D_M = sqrt(I - M^dag M)``.

    Raises :class:`NotContraction` if the largest singular value of ``M``
    exceeds ``1 + tol``.
    """
    M = as_matrix(M, "contraction")
    if M.shape[0] != M.shape[1]:
        raise NonSquare(f"contraction must be square, got {M.shape}")
    n = M.shape[0]
    smax = np.linalg.norm(M, 2)
    if smax > 1 + tol:
        raise NotContraction(f"largest singular value {smax:.12g} exceeds 1 + {tol:g}")
    I = np.eye(n)
    # defect eigenvalues can dip a few ulp below zero; allow up to 2*tol
    clamp = max(2 * tol, 1e-10)
    DM = psd_sqrt(I - dagger(M) @ M, tol=clamp)
    DMd = psd_sqrt(I - M @ dagger(M), tol=clamp)
    U = np.block([[M, DMd], [DM, -dagger(M)]])
    return DilatedUnitary(U, source_index, n, gamma_t)


def dilate_channel(kmap: KrausMap, tol=CONTRACTION_TOL) -> list:
    return [dilate(M, tol, source_index=i, gamma_t=kmap.time) for i, M in enumerate(kmap.operators)]


def printed_unitaries(gamma_t):
    """The two 4x4 amplitude-damping dilations with the published sign pattern.

    Kept as a fixture for comparison; note the (3, 1) entry of the first matrix
    carries a sign that makes it non-unitary for ``0 < gamma_t < inf``.
    """
    p = np.exp(-gamma_t)
    a, b = np.sqrt(p), np.sqrt(-np.expm1(-gamma_t))
    U0 = np.array(
        [[1, 0, 0, 0],
         [0, a, 0, b],
         [0, 0, -1, 0],
         [0, -b, 0, -a]],
        dtype=np.complex128,
    )
    U1 = np.array(
        [[0, b, a, 0],
         [0, 0, 0, 1],
         [1, 0, 0, 0],
         [0, a, -b, 0]],
        dtype=np.complex128,
    )
    return U0, U1
