"""Acceptance checks, one per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines are printed
even when output capture is on.
"""
import time

import numpy as np
import pytest

from eltqc.channels import amplitude_damping_kraus, apply_channel
from eltqc.cli import main
from eltqc.dilation import dilate, dilate_channel, printed_unitaries
from eltqc.elt import (
    Backend,
    TrajectoryFamily,
    WeightSchedule,
    combine,
    default_family,
    default_grid,
    elt_evolve,
    evaluate_family,
    populations_from_dilation,
    populations_matrix_path,
)
from eltqc.jcref import JCParams, amplitude_closed_form, amplitude_ode, exact_populations
from eltqc.linalg import random_density_matrix, random_unitary, unitarity_defect
from eltqc.stateprep import decompose_density, markovian_ensemble
from eltqc.synthesis import synthesize_2q
from eltqc.weights import fit_weights

from conftest import random_contraction

GRID = default_grid()


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n:>2}] {'PASS' if ok else 'FAIL'}: {detail}")
        return ok
    return emit


def test_criterion_01_dilation_correctness(report):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst_u = worst_b = 0.0
    for k in range(500):
        n = (2, 3, 4)[k % 3]
        M = random_contraction(n, rng)
        U = dilate(M)
        worst_u = max(worst_u, unitarity_defect(U.matrix))
        worst_b = max(worst_b, np.max(np.abs(U.block - M)))
    for t in GRID:
        for U, M in zip(dilate_channel(amplitude_damping_kraus(t)), amplitude_damping_kraus(t).operators):
            worst_u = max(worst_u, unitarity_defect(U.matrix))
            worst_b = max(worst_b, np.max(np.abs(U.block - M)))
    elapsed = time.perf_counter() - t0
    ok = worst_u < 1e-10 and worst_b < 1e-12 and elapsed < 5
    report(1, ok, f"unitarity {worst_u:.1e}, block {worst_b:.1e}, {elapsed:.2f} s")
    assert ok


def test_criterion_02_printed_matrices(report):
    """Entrywise match to the tabulated first dilation, population match to the second."""
    ens = markovian_ensemble()
    worst_u0 = worst_pop1 = 0.0
    for t in GRID:
        U0_printed, U1_printed = printed_unitaries(t)
        U0, U1 = dilate_channel(amplitude_damping_kraus(t))
        worst_u0 = max(worst_u0, np.max(np.abs(U0.matrix - U0_printed)))
        for v in ens.vectors:
            a = np.abs((U1.matrix @ v)[:2]) ** 2
            b = np.abs((U1_printed @ v)[:2]) ** 2
            worst_pop1 = max(worst_pop1, np.max(np.abs(a - b)))
    printed_defect = max(unitarity_defect(printed_unitaries(t)[0]) for t in GRID)
    ok = worst_u0 < 1e-12 and worst_pop1 < 1e-12
    report(2, ok, f"U_M0 entrywise {worst_u0:.2e} (tabulated U_M0 unitarity defect {printed_defect:.2e}), "
                  f"U_M1 populations {worst_pop1:.1e}")
    assert ok


def test_criterion_03_markovian(report):
    t0 = time.perf_counter()
    fam = TrajectoryFamily.rate_scaled([1.0])
    sched = WeightSchedule.constant(GRID, [1.0])
    ens = markovian_ensemble()
    ref = 0.75 * np.exp(-GRID)
    sv = elt_evolve(fam, sched, ens)
    shots = elt_evolve(fam, sched, ens, Backend("shots", 8192, seed=7))
    elapsed = time.perf_counter() - t0
    e_sv = np.max(np.abs(sv.excited - ref))
    e_sh = np.max(np.abs(shots.excited - ref))
    ok = e_sv < 1e-10 and e_sh < 0.02 and elapsed < 30
    report(3, ok, f"statevector {e_sv:.1e}, shots {e_sh:.4f}, {elapsed:.2f} s")
    assert ok


def test_criterion_04_circuit_vs_matrix_path(report):
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        D = random_density_matrix(2, rng)
        k = amplitude_damping_kraus(rng.uniform(0, 10))
        ens = decompose_density(D)
        circuit = populations_from_dilation(k, ens)
        worst = max(worst, np.max(np.abs(circuit - np.diag(apply_channel(k, D)).real)),
                    np.max(np.abs(circuit - populations_matrix_path(k, ens))))
    ok = worst < 1e-12
    report(4, ok, f"max deviation {worst:.1e}")
    assert ok


def _revival(excited, tol=1e-6):
    first_drop = np.flatnonzero(np.diff(excited) < -tol)
    if first_drop.size == 0:
        return False
    return bool(np.any(np.diff(excited[first_drop[0]:]) > tol))


@pytest.mark.parametrize("criterion,params", [(5, JCParams.strong()), (6, JCParams.detuned())],
                         ids=["strong", "detuned"])
def test_criterion_05_06_jaynes_cummings(report, criterion, params):
    t0 = time.perf_counter()
    ens = decompose_density(np.diag([0.0, 1.0]))
    fam = default_family()
    exact = exact_populations(params, GRID)
    P = evaluate_family(fam, GRID, ens)
    sched = fit_weights(P[:, :, 1], exact)
    sv = combine(P, sched)
    shots = combine(evaluate_family(fam, GRID, ens, Backend("shots", 8192, seed=7)), sched)
    elapsed = time.perf_counter() - t0
    e_sv = np.max(np.abs(sv.excited - exact.excited))
    e_sh = np.max(np.abs(shots.excited - exact.excited))
    revival = _revival(sv.excited)
    ok = e_sv < 5e-3 and e_sh < 0.03 and revival and elapsed < 60
    report(criterion, ok, f"lambda={params.lam}, delta={params.delta}: statevector {e_sv:.1e}, "
                          f"shots {e_sh:.4f}, revival {revival}, {elapsed:.1f} s")
    assert ok


def test_criterion_07_oracle_consistency(report):
    worst = 0.0
    for p in (JCParams.strong(), JCParams.detuned(), JCParams(1.0, 0.5)):
        G = amplitude_ode(p, GRID)
        worst = max(worst, np.max(np.abs(np.abs(G) ** 2 - np.abs(amplitude_closed_form(p, GRID)) ** 2)))
    limit = np.max(np.abs(exact_populations(JCParams(100.0), GRID).excited - np.exp(-GRID)))
    ok = worst < 1e-6 and limit < 0.02
    report(7, ok, f"ODE vs closed form {worst:.1e}, lambda=100 vs exp(-t) {limit:.4f}")
    assert ok


def test_criterion_08_synthesis(report):
    rng = np.random.default_rng(8)
    t0 = time.perf_counter()
    worst_f, worst_c = 1.0, 0
    for _ in range(200):
        r = synthesize_2q(random_unitary(4, rng))
        worst_f = min(worst_f, r.fidelity)
        worst_c = max(worst_c, r.cnot_count)
    elapsed = time.perf_counter() - t0
    ok = worst_f >= 1 - 1e-9 and worst_c <= 3 and elapsed < 10
    report(8, ok, f"min fidelity 1-{1 - worst_f:.1e}, max CNOTs {worst_c}, {elapsed:.2f} s")
    assert ok


def test_criterion_09_positivity(report):
    rng = np.random.default_rng(9)
    worst_range = worst_sum = 0.0
    for _ in range(30):
        kappas = np.concatenate([[0.0], rng.uniform(0, 10, rng.integers(1, 6))])
        fam = TrajectoryFamily.rate_scaled(kappas)
        times = np.sort(rng.uniform(0, 10, 5))
        sched = WeightSchedule(times, rng.dirichlet(np.ones(len(fam)), size=times.size))
        s = elt_evolve(fam, sched, decompose_density(random_density_matrix(2, rng)))
        worst_range = max(worst_range, -s.excited.min(), s.excited.max() - 1, -s.ground.min(), s.ground.max() - 1)
        worst_sum = max(worst_sum, np.max(np.abs(s.ground + s.excited - 1)))
    ok = worst_range <= 1e-10 and worst_sum < 1e-10
    report(9, ok, f"range violation {max(worst_range, 0):.1e}, normalization {worst_sum:.1e}")
    assert ok


def test_criterion_10_determinism(report, tmp_path):
    runs = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert main(["jc", "--regime", "strong", "--seed", "7", "--out", str(out)]) == 0
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    ok = runs[0] == runs[1] and len(runs[0]) == 5
    report(10, ok, f"{len(runs[0])} files byte-identical: {runs[0] == runs[1]}")
    assert ok
