import json

import numpy as np
import pytest

from eltqc.channels import amplitude_damping_kraus
from eltqc.circuit import Circuit, Gate, circuit_unitary, ry, rz, simulate
from eltqc.dilation import dilate, dilate_channel
from eltqc.exceptions import NotPadded, NotUnitary
from eltqc.linalg import random_unitary
from eltqc.stateprep import decompose_density, markovian_ensemble, pad
from eltqc.synthesis import (
    local_equivalence,
    prep_and_apply,
    split_local,
    synthesize_2q,
    zyz_angles,
)

X = np.array([[0, 1], [1, 0]])
Z = np.diag([1.0, -1.0])
CNOT = circuit_unitary(Circuit(2, [Gate("CNOT", (0, 1))]))


def expi_pauli2(a, P):
    PP = np.kron(P, P)
    return np.cos(a) * np.eye(4) + 1j * np.sin(a) * PP


def phase_fidelity(A, B):
    return abs(np.vdot(A, B)) / A.shape[0]


def test_zyz_angles(rng):
    for _ in range(50):
        U = random_unitary(2, rng)
        a, b, g, ph = zyz_angles(U)
        np.testing.assert_allclose(np.exp(1j * ph) * rz(a) @ ry(b) @ rz(g), U, atol=1e-12)
    for U in (np.eye(2), X, Z, np.diag([1, 1j])):
        a, b, g, ph = zyz_angles(U)
        np.testing.assert_allclose(np.exp(1j * ph) * rz(a) @ ry(b) @ rz(g), U, atol=1e-12)


def test_split_local(rng):
    A1, A0 = random_unitary(2, rng), random_unitary(2, rng)
    B1, B0 = split_local(np.kron(A1, A0))
    np.testing.assert_allclose(np.kron(B1, B0), np.kron(A1, A0), atol=1e-13)


def test_local_equivalence_recovers_locals(rng):
    W = expi_pauli2(0.3, X) @ expi_pauli2(-0.2, Z)
    L = np.kron(random_unitary(2, rng), random_unitary(2, rng))
    R = np.kron(random_unitary(2, rng), random_unitary(2, rng))
    U = L @ W @ R
    L2, R2, ph = local_equivalence(U, W)
    np.testing.assert_allclose(ph * L2 @ W @ R2, U, atol=1e-12)
    with pytest.raises(ValueError):
        local_equivalence(CNOT, np.eye(4))


def test_identity_gives_empty_circuit():
    rep = synthesize_2q(np.eye(4))
    assert rep.circuit.gates == [] and rep.cnot_count == 0 and rep.fidelity == pytest.approx(1.0)


def test_cnot_uses_one_cnot():
    rep = synthesize_2q(CNOT)
    assert rep.cnot_count == 1
    assert rep.fidelity == pytest.approx(1.0, abs=1e-15)


def test_local_gate_uses_no_cnot(rng):
    U = np.kron(random_unitary(2, rng), random_unitary(2, rng))
    rep = synthesize_2q(U)
    assert rep.cnot_count == 0
    assert rep.fidelity > 1 - 1e-12


def test_two_cnot_class(rng):
    for _ in range(20):
        a, b = rng.uniform(-2, 2, 2)
        core = expi_pauli2(a, X) @ expi_pauli2(b, Z)
        U = np.kron(random_unitary(2, rng), random_unitary(2, rng)) @ core @ np.kron(
            random_unitary(2, rng), random_unitary(2, rng))
        rep = synthesize_2q(U)
        assert rep.cnot_count <= 2
        assert rep.fidelity > 1 - 1e-12


def test_swap_needs_three():
    SWAP = np.eye(4)[[0, 2, 1, 3]]
    rep = synthesize_2q(SWAP)
    assert rep.cnot_count == 3 and rep.fidelity > 1 - 1e-12


def test_gate_set_and_phase(rng):
    U = random_unitary(4, rng)
    rep = synthesize_2q(U)
    assert {g.name for g in rep.circuit.gates} <= {"RZ", "RY", "CNOT"}
    np.testing.assert_allclose(np.exp(1j * rep.global_phase) * circuit_unitary(rep.circuit), U, atol=1e-10)


def test_dilated_m0_at_ln2():
    U = dilate(amplitude_damping_kraus(np.log(2)).operators[0]).matrix
    rep = synthesize_2q(U)
    assert rep.cnot_count <= 3
    assert phase_fidelity(circuit_unitary(rep.circuit), U) >= 1 - 1e-9


def test_dilations_at_zero_need_no_cnot():
    for U in dilate_channel(amplitude_damping_kraus(0.0)):
        assert synthesize_2q(U.matrix).cnot_count == 0


def test_not_unitary():
    with pytest.raises(NotUnitary):
        synthesize_2q(np.diag([1, 1, 1, 2.0]))
    with pytest.raises(NotUnitary):
        synthesize_2q(np.eye(2))


def test_prep_and_apply_examples():
    U = dilate_channel(amplitude_damping_kraus(0.0))[0]
    v0, v1 = markovian_ensemble().vectors
    out = simulate(prep_and_apply(U, v0))
    assert abs(out[1]) ** 2 == pytest.approx(1.0, abs=1e-14)
    out = simulate(prep_and_apply(U, v1))
    assert abs(out[0]) ** 2 == pytest.approx(0.5, abs=1e-14)
    assert abs(out[1]) ** 2 == pytest.approx(0.5, abs=1e-14)


def test_markovian_preparations_match_direct_product(rng):
    for gt in np.concatenate([[0.0, np.log(2), 1e6], rng.uniform(0, 10, 10)]):
        for U in dilate_channel(amplitude_damping_kraus(gt)):
            for v in markovian_ensemble().vectors:
                out = simulate(prep_and_apply(U, v))
                ref = U.matrix @ v
                np.testing.assert_allclose(np.abs(out[:2]) ** 2, np.abs(ref[:2]) ** 2, atol=1e-10)
                assert np.max(np.abs(np.abs(out) - np.abs(ref))) < 1e-8


def test_prep_and_apply_generic_states(rng):
    for _ in range(30):
        U = random_unitary(4, rng)
        v = pad(random_unitary(2, rng)[:, 0], 4)
        out = simulate(prep_and_apply(U, v))
        assert abs(abs(np.vdot(out, U @ v)) - 1) < 1e-10


def test_prep_and_apply_rejects_unpadded(rng):
    with pytest.raises(NotPadded):
        prep_and_apply(np.eye(4), np.array([0.6, 0, 0.8, 0]))


def test_report_json():
    doc = json.loads(json.dumps(synthesize_2q(CNOT).to_json()))
    assert doc["cnot_count"] == 1 and doc["circuit"]["width"] == 2
