"""Dense complex linear algebra on small matrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The helpers here
validate shapes and finiteness, and implement the few decompositions the rest
of the package relies on.
"""
from __future__ import annotations

import numpy as np

from .exceptions import (
    DimensionMismatch,
    InvalidDensityMatrix,
    NonSquare,
    NotHermitian,
    NotPSD,
)

#: Eigenvalues of a PSD input within this distance below zero are clamped.
CLAMP_TOL = 1e-10


def as_matrix(A, name="matrix") -> np.ndarray:
    """Return ``A`` as a finite 2-D complex array (a copy is not forced)."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] == 0 or A.shape[1] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def as_vector(v, name="vector") -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


def _require_square(A, name="matrix"):
    if A.shape[0] != A.shape[1]:
        raise NonSquare(f"{name} must be square, got shape {A.shape}")


def dagger(A: np.ndarray) -> np.ndarray:
    return np.conj(A).T


def _require_hermitian(A, tol):
    _require_square(A)
    defect = np.max(np.abs(A - dagger(A)))
    if defect > tol:
        raise NotHermitian(f"max |A - A^dag| = {defect:.3e} exceeds tol {tol:.1e}")


def hermitian_eig(A, tol=1e-12):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues sorted in
    descending order and eigenvectors as the *columns* of a unitary matrix.
    """
    A = as_matrix(A)
    _require_hermitian(A, tol)
    # symmetrize so eigh sees an exactly Hermitian input
    H = 0.5 * (A + dagger(A))
    w, V = np.linalg.eigh(H)
    order = np.argsort(w)[::-1]
    return w[order], V[:, order]


def psd_sqrt(A, tol=CLAMP_TOL) -> np.ndarray:
    """Principal square root of a Hermitian positive-semidefinite matrix.

    Eigenvalues in ``[-tol, 0)`` are treated as round-off and clamped to zero.
    """
    A = as_matrix(A)
    _require_hermitian(A, tol)
    w, V = hermitian_eig(A, tol=tol)
    if w.size and w[-1] < -tol:
        raise NotPSD(f"smallest eigenvalue {w[-1]:.3e} is below -{tol:.1e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    S = (V * root) @ dagger(V)
    return 0.5 * (S + dagger(S))


def unitarity_defect(U) -> float:
    """Frobenius norm of ``U^dag U - I``."""
    U = as_matrix(U)
    _require_square(U)
    return float(np.linalg.norm(dagger(U) @ U - np.eye(U.shape[0]), "fro"))


def is_unitary(U, tol=1e-10) -> bool:
    U = np.asarray(U)
    return U.ndim == 2 and U.shape[0] == U.shape[1] and unitarity_defect(U) < tol


def check_density_matrix(D, tol=1e-10, name="density matrix") -> np.ndarray:
    """Validate a density matrix (square, Hermitian, unit trace, PSD)."""
    try:
        D = as_matrix(D, name)
    except (DimensionMismatch, ValueError) as exc:
        raise InvalidDensityMatrix(str(exc)) from exc
    if D.shape[0] != D.shape[1]:
        raise InvalidDensityMatrix(f"{name} must be square, got {D.shape}")
    if np.max(np.abs(D - dagger(D))) > tol:
        raise InvalidDensityMatrix(f"{name} is not Hermitian")
    tr = np.trace(D)
    if abs(tr - 1.0) > tol:
        raise InvalidDensityMatrix(f"{name} has trace {tr.real:.6g}, expected 1")
    if np.linalg.eigvalsh(0.5 * (D + dagger(D)))[0] < -tol:
        raise InvalidDensityMatrix(f"{name} is not positive semidefinite")
    return D


def random_density_matrix(n, rng, rank=None) -> np.ndarray:
    """Random density matrix from a Ginibre ensemble (test/demo helper)."""
    k = n if rank is None else rank
    G = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    D = G @ dagger(G)
    return D / np.trace(D).real


def random_unitary(n, rng) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    Z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


# -- JSON literal forms ------------------------------------------------------

def matrix_to_literal(A) -> dict:
    A = as_matrix(A)
    flat = A.reshape(-1)
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "re": [float(x) for x in flat.real],
        "im": [float(x) for x in flat.imag],
    }


def matrix_from_literal(obj) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * len(re)), dtype=float)
    except (KeyError, TypeError) as exc:
        raise DimensionMismatch(f"malformed matrix literal: {exc}") from exc
    if rows <= 0 or cols <= 0 or re.size != rows * cols or im.size != rows * cols:
        raise DimensionMismatch(
            f"matrix literal declares {rows}x{cols} but carries {re.size} re / {im.size} im entries"
        )
    return as_matrix((re + 1j * im).reshape(rows, cols))


def vector_to_literal(v) -> dict:
    v = as_vector(v)
    return {"dim": int(v.size), "re": [float(x) for x in v.real], "im": [float(x) for x in v.imag]}


def vector_from_literal(obj) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", [0.0] * len(re)), dtype=float)
    dim = int(obj.get("dim", re.size))
    if re.size != dim or im.size != dim:
        raise DimensionMismatch("vector literal entry count does not match dim")
    return as_vector(re + 1j * im)
