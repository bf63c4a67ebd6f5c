"""Lindblad dissipation channels in operator-sum (Kraus) form.

Times are dimensionless products ``gamma * t`` throughout; the physical decay
rate only matters when labelling axes.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, NegativeTime
from .linalg import (
    as_matrix,
    check_density_matrix,
    dagger,
    matrix_from_literal,
    matrix_to_literal,
)

#: Decay rate of the two-level system used for the Markovian benchmark, 1/s.
PHYSICAL_GAMMA = 1.52e9


class ChannelKind(enum.Enum):
    AMPLITUDE_DAMPING = "AmplitudeDamping"


@dataclass(frozen=True)
class ChannelSpec:
    kind: ChannelKind = ChannelKind.AMPLITUDE_DAMPING
    rate: float = 1.0
    dim: int = 2

    def __post_init__(self):
        if not (self.rate > 0 and np.isfinite(self.rate)):
            raise ValueError(f"channel rate must be positive, got {self.rate}")
        if self.kind is ChannelKind.AMPLITUDE_DAMPING and self.dim != 2:
            raise DimensionMismatch("amplitude damping is defined for dim=2")

    def collapse_operators(self):
        """Lindblad jump operators ``C_i`` carrying the rate."""
        if self.kind is ChannelKind.AMPLITUDE_DAMPING:
            lower = np.array([[0, 1], [0, 0]], dtype=np.complex128)
            return [np.sqrt(self.rate) * lower]
        raise NotImplementedError(self.kind)

    def kraus(self, gamma_t):
        if self.kind is ChannelKind.AMPLITUDE_DAMPING:
            return amplitude_damping_kraus(gamma_t)
        raise NotImplementedError(self.kind)


@dataclass(frozen=True)
class KrausMap:
    """Completeness-satisfying Kraus operators evaluated at one time ``gamma_t``."""

    operators: tuple
    time: float = 0.0

    def __post_init__(self):
        ops = tuple(as_matrix(M, "Kraus operator") for M in self.operators)
        if not ops:
            raise DimensionMismatch("a Kraus map needs at least one operator")
        n = ops[0].shape[0]
        for M in ops:
            if M.shape != (n, n):
                raise DimensionMismatch("Kraus operators must share one square shape")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def completeness_defect(self) -> float:
        S = sum(dagger(M) @ M for M in self.operators)
        return float(np.max(np.abs(S - np.eye(self.dim))))

    def to_json(self) -> dict:
        return {"time": float(self.time), "operators": [matrix_to_literal(M) for M in self.operators]}

    @classmethod
    def from_json(cls, obj) -> "KrausMap":
        return cls(tuple(matrix_from_literal(m) for m in obj["operators"]), float(obj.get("time", 0.0)))


def amplitude_damping_kraus(gamma_t) -> KrausMap:
    """Kraus pair of the amplitude-damping channel after dimensionless time ``gamma_t``.

    ``M0 = diag(1, sqrt(p))`` and ``M1 = [[0, sqrt(1-p)], [0, 0]]`` with
    ``p = exp(-gamma_t)``, the surviving excited-state probability.
    """
    gamma_t = float(gamma_t)
    if not np.isfinite(gamma_t):
        raise NegativeTime(f"gamma_t must be finite, got {gamma_t}")
    if gamma_t < 0:
        raise NegativeTime(f"gamma_t must be nonnegative, got {gamma_t}")
    p = np.exp(-gamma_t)
    # -expm1 keeps 1 - p accurate for small gamma_t
    q = -np.expm1(-gamma_t)
    M0 = np.array([[1, 0], [0, np.sqrt(p)]], dtype=np.complex128)
    M1 = np.array([[0, np.sqrt(q)], [0, 0]], dtype=np.complex128)
    return KrausMap((M0, M1), gamma_t)


def apply_channel(kmap: KrausMap, D, tol=1e-10) -> np.ndarray:
    """Operator-sum action ``sum_i M_i D M_i^dag``."""
    D = check_density_matrix(D, tol=tol)
    if D.shape[0] != kmap.dim:
        raise DimensionMismatch(f"density matrix is {D.shape}, channel acts on dim {kmap.dim}")
    out = np.zeros_like(D)
    for M in kmap.operators:
        out += M @ D @ dagger(M)
    return 0.5 * (out + dagger(out))


def lindblad_rhs(H, collapse, D):
    """Right-hand side ``-i[H, D] + sum_i C D C^dag - 1/2 {C^dag C, D}``."""
    out = -1j * (H @ D - D @ H)
    for C in collapse:
        CdC = dagger(C) @ C
        out += C @ D @ dagger(C) - 0.5 * (CdC @ D + D @ CdC)
    return out


def lindblad_propagate(spec: ChannelSpec, H, D0, gamma_t, steps=1000) -> np.ndarray:
    """Integrate the Lindblad equation with fixed-step RK4 up to ``s = gamma_t / rate``.

    Independent of the Kraus representation; used as its oracle.
    """
    H = as_matrix(H, "Hamiltonian")
    if np.max(np.abs(H - dagger(H))) > 1e-10:
        raise ValueError("Hamiltonian must be Hermitian")
    D = check_density_matrix(D0).copy()
    if H.shape != D.shape or D.shape[0] != spec.dim:
        raise DimensionMismatch("Hamiltonian, density matrix and channel dims disagree")
    gamma_t = float(gamma_t)
    if gamma_t < 0:
        raise NegativeTime(f"gamma_t must be nonnegative, got {gamma_t}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if gamma_t == 0:
        return D
    C = spec.collapse_operators()
    h = gamma_t / spec.rate / steps
    f = lambda X: lindblad_rhs(H, C, X)
    for _ in range(int(steps)):
        k1 = f(D)
        k2 = f(D + 0.5 * h * k1)
        k3 = f(D + 0.5 * h * k2)
        k4 = f(D + h * k3)
        D = D + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return D
