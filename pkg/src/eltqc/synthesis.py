"""Two-qubit unitary synthesis into {RZ, RY, CNOT}.

The route is the magic-basis (KAK) one: in the magic basis local gates become
real orthogonal matrices, so two unitaries are locally equivalent exactly when
``U_B^T U_B`` have the same spectrum.  We read the canonical coefficients off
that spectrum, build a 0-3 CNOT template with the same coefficients, and solve
for the outer local gates that map the template onto the target.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, circuit_unitary, ry, rz
from .dilation import DilatedUnitary
from .exceptions import NotPadded, NotUnitary
from .linalg import as_matrix, as_vector, dagger, unitarity_defect

MAGIC = np.array(
    [[1, 0, 0, 1j],
     [0, 1j, 1, 0],
     [0, 1j, -1, 0],
     [1, 0, 0, -1j]],
    dtype=np.complex128,
) / np.sqrt(2)

_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_CX01 = ("cx", 0, 1)
_CX10 = ("cx", 1, 0)

# probe mixtures for simultaneous real diagonalization of Re M and Im M
_MIX = (0.6180339887, 1.4142135623, -0.7071067811, 2.7182818284, -1.7320508075, 0.3183098862)


@dataclass
class SynthesisReport:
    circuit: Circuit
    cnot_count: int
    fidelity: float
    global_phase: float

    def to_json(self) -> dict:
        return {
            "circuit": self.circuit.to_json(),
            "cnot_count": int(self.cnot_count),
            "fidelity": float(self.fidelity),
            "global_phase": float(self.global_phase),
        }


# -- single-qubit helpers ------------------------------------------------------

def _expi(theta, P):
    """``exp(i theta P)`` for a Pauli matrix ``P``."""
    return np.cos(theta) * np.eye(2) + 1j * np.sin(theta) * P


def zyz_angles(U):
    """Angles ``(alpha, beta, gamma, phase)`` with ``U = e^{i phase} RZ(alpha) RY(beta) RZ(gamma)``."""
    U = np.asarray(U, dtype=np.complex128)
    phase = 0.5 * np.angle(np.linalg.det(U))
    V = U * np.exp(-1j * phase)
    a, b = V[0, 0], V[1, 0]
    beta = 2 * np.arctan2(abs(b), abs(a))
    if abs(b) < 1e-14:
        plus, minus = -2 * np.angle(a), 0.0
    elif abs(a) < 1e-14:
        plus, minus = 0.0, 2 * np.angle(b)
    else:
        plus, minus = -2 * np.angle(a), 2 * np.angle(b)
    alpha, gamma = 0.5 * (plus + minus), 0.5 * (plus - minus)
    # RZ(alpha) RY(beta) RZ(gamma) may equal -V; fold the sign into the phase
    c = np.cos(beta / 2)
    rebuilt00 = np.exp(-0.5j * (alpha + gamma)) * c
    if abs(c) > 1e-7 and np.real(rebuilt00 / a) < 0:
        phase += np.pi
    elif abs(c) <= 1e-7:
        rebuilt10 = np.exp(0.5j * (alpha - gamma)) * np.sin(beta / 2)
        if np.real(rebuilt10 / b) < 0:
            phase += np.pi
    return alpha, beta, gamma, phase


def _is_trivial_angle(theta, tol=1e-12):
    # RZ/RY at multiples of 2*pi are +-I, i.e. a global phase
    r = np.remainder(theta, 2 * np.pi)
    return min(r, 2 * np.pi - r) < tol


def _single_qubit_gates(U, qubit):
    alpha, beta, gamma, _ = zyz_angles(U)
    out = []
    # circuit order is right-to-left in the product
    for name, angle in (("RZ", gamma), ("RY", beta), ("RZ", alpha)):
        if not _is_trivial_angle(angle):
            out.append(Gate(name, (qubit,), (float(angle),)))
    return out


def split_local(L):
    """Factor a 4x4 local unitary as ``kron(A1, A0)`` (A1 on qubit 1, A0 on qubit 0)."""
    T = np.asarray(L).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    u, s, vh = np.linalg.svd(T)
    A1 = np.sqrt(s[0]) * u[:, 0].reshape(2, 2)
    A0 = np.sqrt(s[0]) * vh[0, :].reshape(2, 2)
    return A1, A0


# -- magic-basis machinery -----------------------------------------------------

def _to_su4(U):
    return U / np.linalg.det(U) ** 0.25


def _gram(U):
    Ub = dagger(MAGIC) @ U @ MAGIC
    return Ub, Ub.T @ Ub


def _real_diagonalizer(M):
    """Real orthogonal ``O`` (det +1) with ``O^T M O`` diagonal for symmetric unitary ``M``."""
    for r in _MIX:
        _, O = np.linalg.eigh(M.real + r * M.imag)
        D = O.T @ M @ O
        if np.max(np.abs(D - np.diag(np.diag(D)))) < 1e-10:
            break
    else:
        raise np.linalg.LinAlgError("failed to diagonalize magic-basis Gram matrix")
    if np.linalg.det(O) < 0:
        O[:, 0] *= -1
    return O, np.diag(O.T @ M @ O)


def _match(du, dw, tol=1e-7):
    """Permutation ``perm`` with ``dw[perm] ~= du`` or None."""
    free = list(range(len(dw)))
    perm = []
    for x in du:
        k = min(free, key=lambda j: abs(dw[j] - x))
        if abs(dw[k] - x) > tol:
            return None
        perm.append(k)
        free.remove(k)
    return perm


def local_equivalence(U, W):
    """Return local ``(L, R)`` and phase with ``U = phase * L @ W @ R``.

    ``L`` and ``R`` are 4x4 tensor products of single-qubit unitaries.
    """
    U1 = _to_su4(U)
    Ub, Mu = _gram(U1)
    Ou, du = _real_diagonalizer(Mu)
    W1 = _to_su4(W)
    for k in range(2):
        Wk = W1 * 1j ** k
        Wb, Mw = _gram(Wk)
        Ow, dw = _real_diagonalizer(Mw)
        perm = _match(du, dw)
        if perm is not None:
            break
    else:
        raise ValueError("unitaries are not locally equivalent")
    Ow = Ow[:, perm]
    if np.linalg.det(Ow) < 0:
        Ow[:, 0] *= -1
    delta = np.sqrt(du)
    Qu = (Ub @ Ou / delta).real
    Qw = (Wb @ Ow / delta).real
    Lb = Qu @ Qw.T
    Rb = Ow @ Ou.T
    L = MAGIC @ Lb @ dagger(MAGIC)
    R = MAGIC @ Rb @ dagger(MAGIC)
    X = L @ W @ R
    ov = np.vdot(X, U)
    return L, R, ov / abs(ov)


def canonical_phases(U):
    """Eigenphases ``lambda_k`` (summing to zero) of the magic-basis Gram matrix, halved."""
    _, M = _gram(_to_su4(as_matrix(U)))
    phi = np.sort(np.angle(np.linalg.eigvals(M)))
    m = int(np.round(phi.sum() / (2 * np.pi)))
    # shift whole turns off the extremes so the phases sum to zero
    if m > 0:
        phi[len(phi) - m:] -= 2 * np.pi
    elif m < 0:
        phi[: -m] += 2 * np.pi
    return phi / 2


def _cnot_class(U):
    _, M = _gram(_to_su4(U))
    ev = np.linalg.eigvals(M)
    tr = np.trace(M)
    if np.allclose(ev, ev[0], atol=1e-9) and abs(abs(ev[0].real) - 1) < 1e-9:
        return 0
    if abs(tr.imag) > 1e-9:
        return 3
    if np.allclose(np.sort(np.abs(ev.real)), 0, atol=1e-9):
        return 1
    return 2


def _template(U, k):
    """Ops list ``[('1q', qubit, matrix) | ('cx', c, t)]`` locally equivalent to ``U``."""
    if k == 0:
        return []
    if k == 1:
        return [_CX01]
    if k == 2:
        _, M = _gram(_to_su4(U))
        # eigenphases come in +-pairs (-1 appears twice): one representative each
        x = np.sort(np.abs(np.angle(np.linalg.eigvals(M))))
        a, b = 0.25 * (x[0] + x[2]), 0.25 * (x[2] - x[0])
        return [_CX01, ("1q", 0, _expi(a, _X)), ("1q", 1, _expi(b, _Z)), _CX01]
    lam = canonical_phases(U)
    a = (lam[0] - lam[1] + lam[2] - lam[3]) / 4
    b = (-lam[0] + lam[1] + lam[2] - lam[3]) / 4
    c = (lam[0] + lam[1] - lam[2] - lam[3]) / 4
    return [
        ("1q", 1, rz(np.pi / 2)),
        _CX10,
        ("1q", 0, rz(np.pi / 2 - 2 * c)),
        ("1q", 1, ry(np.pi / 2 - 2 * a)),
        _CX01,
        ("1q", 1, ry(2 * b - np.pi / 2)),
        _CX10,
        ("1q", 0, rz(-np.pi / 2)),
    ]


def _ops_unitary(ops):
    c = Circuit(2)
    for op in ops:
        if op[0] == "cx":
            c.append(Gate("CNOT", (op[1], op[2])))
        else:
            c.append(Gate("U", (op[1],), (), op[2]))
    return circuit_unitary(c)


def _emit(ops):
    """Merge runs of single-qubit matrices per wire and lower them to RZ/RY."""
    c = Circuit(2)
    pending = {0: np.eye(2, dtype=np.complex128), 1: np.eye(2, dtype=np.complex128)}

    def flush(q):
        c.extend(_single_qubit_gates(pending[q], q))
        pending[q] = np.eye(2, dtype=np.complex128)

    for op in ops:
        if op[0] == "cx":
            flush(0)
            flush(1)
            c.append(Gate("CNOT", (op[1], op[2])))
        else:
            pending[op[1]] = op[2] @ pending[op[1]]
    flush(0)
    flush(1)
    return c


def synthesize_2q(U, tol=1e-10) -> SynthesisReport:
    """Circuit over {RZ, RY, CNOT} equal to ``U`` up to a global phase, with at most 3 CNOTs."""
    U = as_matrix(U, "target unitary")
    if U.shape != (4, 4) or unitarity_defect(U) > tol:
        raise NotUnitary("synthesize_2q expects a 4x4 unitary")
    k = _cnot_class(U)
    core = _template(U, k)
    W = _ops_unitary(core)
    L, R, _ = local_equivalence(U, W)
    R1, R0 = split_local(R)
    L1, L0 = split_local(L)
    ops = [("1q", 0, R0), ("1q", 1, R1), *core, ("1q", 0, L0), ("1q", 1, L1)]
    circ = _emit(ops)
    V = circuit_unitary(circ)
    ov = np.vdot(V, U)
    return SynthesisReport(circ, circ.cnot_count(), float(min(1.0, abs(ov) / 4)), float(np.angle(ov)))


def _state_prep_ops(v):
    """Ops mapping ``|00>`` to the two-qubit state ``v`` (Schmidt form, at most one CNOT)."""
    psi = v.reshape(2, 2)  # rows: qubit 1, cols: qubit 0
    u, s, vh = np.linalg.svd(psi)
    theta = 2 * np.arctan2(s[1], s[0])
    # qubit 0 basis |k> -> column k of vh^T, qubit 1 |k> -> column k of u
    A0 = vh.T
    A1 = u
    if s[1] < 1e-14:
        return [("1q", 0, A0), ("1q", 1, A1)]
    return [("1q", 0, ry(theta)), _CX01, ("1q", 0, A0), ("1q", 1, A1)]


def prep_and_apply(U, v, synthesis: SynthesisReport | None = None) -> Circuit:
    """Circuit taking ``|00>`` to ``U v`` up to global phase.

    ``v`` must be a padded system vector (zeros on the ancilla block).  A
    precomputed ``synthesis`` of ``U`` may be passed to skip resynthesis.
    """
    if isinstance(U, DilatedUnitary):
        n, U = U.system_dim, U.matrix
    else:
        U = as_matrix(U)
        n = U.shape[0] // 2
    v = as_vector(v)
    if v.size != U.shape[0] or np.any(np.abs(v[n:]) > 1e-12):
        raise NotPadded("state must be zero-padded to the dilated dimension")
    if abs(np.linalg.norm(v) - 1) > 1e-10:
        raise ValueError("state must have unit norm")
    prep = _emit(_state_prep_ops(v))
    body = synthesis if synthesis is not None else synthesize_2q(U)
    return Circuit(2, list(prep.gates) + list(body.circuit.gates))
