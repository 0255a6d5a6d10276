"""Acceptance criteria; each check records one PASS/FAIL line for the terminal summary."""
import math
import time

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES

from sspc import io
from sspc.channels import ChannelRep, convert, pauli_basis
from sspc.circuit import LayeredCircuit, accumulate
from sspc.clock import clock_solve, compare_with_reference
from sspc.errors import NoSolution
from sspc.gates import (
    decomposed_parity_circuit,
    phase_distance,
    sequence_product,
    u_xx,
    u_zz,
    verify_parity_semantics,
)
from sspc.grape import (
    GrapeOptions,
    build_problem,
    finite_difference_gradient,
    grape_optimize,
)
from sspc.noise import (
    NoiseSpec,
    calibrate_p,
    channel_avg_fidelity,
    compare_decomposed_vs_sspc,
    make_channel,
)
from sspc.pauli import PauliErrorChannel
from sspc.pipeline import analyze
from sspc.spin import (
    SpinSystemSpec,
    drift_hamiltonian,
    pulse_spectrum,
    transition_frequencies,
)

REFERENCE_XX = 0.5 * np.array(
    [
        [1, 0, 0, 1, 1, 0, 0, -1],
        [0, 1, 1, 0, 0, 1, -1, 0],
        [0, 1, 1, 0, 0, -1, 1, 0],
        [1, 0, 0, 1, -1, 0, 0, 1],
        [1, 0, 0, -1, 1, 0, 0, 1],
        [0, 1, -1, 0, 0, 1, 1, 0],
        [0, -1, 1, 0, 0, 1, 1, 0],
        [-1, 0, 0, 1, 1, 0, 0, 1],
    ]
)
REFERENCE_ZZ = np.zeros((8, 8))
for row, col in enumerate([0, 5, 6, 3, 4, 1, 2, 7]):
    REFERENCE_ZZ[row, col] = 1


def record(criterion, passed, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
    assert passed, detail


def tutorial_analyses():
    out = {}
    for gate in ("x", "y"):
        ideal = io.load_channel(io.data_path(f"sqrt_{gate}_ideal.json"))
        exp = io.load_channel(io.data_path(f"sqrt_{gate}_experimental.json"))
        out[gate] = analyze(ideal, exp)
    return out


def test_c1_tutorial_pipeline():
    start = time.perf_counter()
    res = tutorial_analyses()
    combined = accumulate(LayeredCircuit.from_channels([res["x"].channel, res["y"].channel]))
    elapsed = time.perf_counter() - start
    x = res["x"].channel.probs
    expected_x = np.array([0.973023, 0.020194, 0.001325, 0.005458])
    ok = (
        np.max(np.abs(x - expected_x)) <= 1e-4
        and abs(res["y"].perfection - 0.97787447) <= 1e-4
        and abs(combined.perfection - 0.9517) <= 5e-4
        and elapsed < 1.0
    )
    record(
        "C1 tutorial pipeline",
        ok,
        f"sqrt(X) probs {np.round(x, 6).tolist()}, sqrt(Y) p_i {res['y'].perfection:.6f}, "
        f"combined P_I {combined.perfection:.6f}, {elapsed:.3f} s",
    )


def test_c2_kraus_validity():
    worst_tp, worst_action = 0.0, 0.0
    for result in tutorial_analyses().values():
        ops = np.array(result.kraus.payload)
        completeness = np.einsum("kba,kbc->ac", ops.conj(), ops) - np.eye(2)
        worst_tp = max(worst_tp, float(np.max(np.abs(completeness))))
        # second route: the Kraus action on a Pauli basis rebuilds the error transfer matrix
        basis = pauli_basis(1)
        ptm = np.array([[np.trace(p @ sum(a @ q @ a.conj().T for a in ops)).real / 2 for q in basis] for p in basis])
        worst_action = max(worst_action, float(np.max(np.abs(ptm - result.error_ptm.payload))))
    record(
        "C2 Kraus validity",
        worst_tp <= 1e-6 and worst_action <= 1e-8,
        f"completeness residual {worst_tp:.1e}, action distance {worst_action:.1e}",
    )


def test_c3_sspc_identities():
    start = time.perf_counter()
    checks = {}
    for name, u, reference in (("XX", u_xx(), REFERENCE_XX), ("ZZ", u_zz(), REFERENCE_ZZ)):
        report = verify_parity_semantics(u, name, trials=1000, seed=2024, raise_on_failure=False)
        checks[name] = (
            float(np.max(np.abs(u - reference))),
            phase_distance(u, sequence_product(decomposed_parity_circuit(name))),
            float(np.max(np.abs(u @ u - np.eye(8)))),
            report.max_deviation,
        )
    elapsed = time.perf_counter() - start
    ok = all(e <= 1e-12 and d <= 1e-12 and i <= 1e-12 and s <= 1e-9 for e, d, i, s in checks.values())
    detail = "; ".join(
        f"{k}: entries {e:.0e}, decomposed {d:.0e}, involution {i:.0e}, semantics {s:.1e}"
        for k, (e, d, i, s) in checks.items()
    )
    record("C3 SSPC identities", ok and elapsed < 5.0, f"{detail}; {elapsed:.2f} s")


def test_c4_noise_comparison():
    start = time.perf_counter()
    fig = compare_decomposed_vs_sspc(NoiseSpec("phase_flip", 0.0085), NoiseSpec("phase_flip", 0.0329))
    matched = compare_decomposed_vs_sspc(NoiseSpec("phase_flip", 0.00375), NoiseSpec("phase_flip", 0.00375))
    elapsed = time.perf_counter() - start
    ok = (
        abs(fig.decomposed_perfection - 0.9026) <= 2e-3
        and abs(fig.sspc_perfection - 0.9042) <= 2e-3
        and matched.sspc_perfection >= matched.decomposed_perfection
        and elapsed < 1.0
    )
    record(
        "C4 decomposed vs single-step",
        ok,
        f"decomposed P_I {fig.decomposed_perfection:.6f} (dominated term {fig.decomposed_dominated:.6f}), "
        f"single-step P_I {fig.sspc_perfection:.6f}, matched-fidelity ratio {matched.ratio:.4f}, {elapsed:.3f} s",
    )


def test_c5_fidelity_calibration():
    p = calibrate_p(0.9943, "phase_flip", 1)
    fid = channel_avg_fidelity(make_channel(NoiseSpec("phase_flip", 0.00375), 3))
    record(
        "C5 fidelity calibration",
        abs(p - 0.0085) <= 1e-4 and abs(fid - 0.99) <= 5e-4,
        f"p(0.9943) = {p:.6f}, 3-qubit fidelity at p = 0.00375 is {fid:.6f}",
    )


def test_c6a_clock_rounded_periods():
    start = time.perf_counter()
    sol = clock_solve(33.1, 698.1, (True, False), 0.01)
    elapsed = time.perf_counter() - start
    record(
        "C6a clock, a odd",
        (sol.a, sol.b) == (6981, 331) and abs(sol.total_time - 231.07) <= 0.01 and elapsed < 10,
        f"(a, b) = ({sol.a}, {sol.b}), total {sol.total_time:.4f} us, {elapsed:.3f} s",
    )


def test_c6b_clock_both_odd():
    sol = clock_solve(1000 * math.pi / 95, 1000 * math.pi / 9, (True, True), 0.01)
    ok = (sol.a, sol.b) == (1805, 171) and abs(sol.total_time - 59.7) <= 0.1
    record(
        "C6b clock, both odd",
        ok,
        f"expected (1805, 171, 59.7 us); the shortest admissible solution is "
        f"({sol.a}, {sol.b}, {sol.total_time:.4f} us)",
    )


def test_c6c_clock_speedup():
    sol = clock_solve(1000 * math.pi / 95, 1000 * math.pi / 9, (True, True), 0.01)
    ratio = 540.13 / sol.total_time
    record("C6c clock speedup", 8.5 <= ratio <= 9.5, f"540.13 us / {sol.total_time:.4f} us = {ratio:.2f}")


def test_c6d_clock_reference_check():
    with pytest.raises(NoSolution):
        clock_solve(1000 * math.pi / 9, 2000 * math.pi / 95, (True, False), 0.01)
    sol = clock_solve(349.06, 66.13, (True, False), 0.01)
    check = compare_with_reference(sol, a=887, total_time=309.06)
    ok = not check["reference_consistent"] and not check["matches"]
    record(
        "C6d clock reference figure",
        ok,
        f"exact periods have no odd-a solution; rounded periods give a = {sol.a}, "
        f"total {sol.total_time:.3f} us; quoted 887 periods imply "
        f"{check['reference_implied_total_us']:.4f} us, not 309.06 us (flagged)",
    )


def test_c7_accumulator_oracle():
    rng = np.random.default_rng(7)
    basis = pauli_basis(2)
    worst = 0.0
    for _ in range(100):
        layers = []
        for _ in range(3):
            w = rng.random(16)
            layers.append(PauliErrorChannel(2, w / w.sum()))
        total = np.eye(16, dtype=complex)
        for ch in layers:
            total = sum(p * np.kron(b.conj(), b) for p, b in zip(ch.probs, basis)) @ total
        oracle = np.real(np.diag(convert(ChannelRep.of("superop", total), "chi").payload))
        got = accumulate(LayeredCircuit.from_channels(layers)).probs
        worst = max(worst, float(np.max(np.abs(got - oracle))))
    record("C7 accumulator oracle", worst <= 1e-10, f"max deviation over 100 circuits {worst:.1e}")


@pytest.fixture(scope="module")
def grape_run():
    spec = SpinSystemSpec.desk()
    opts = GrapeOptions()
    start = time.perf_counter()
    result = grape_optimize(u_zz(), spec, opts)
    return spec, opts, result, time.perf_counter() - start


@pytest.mark.slow
def test_c8a_grape_reaches_target(grape_run):
    _, opts, res, elapsed = grape_run
    record(
        "C8a GRAPE fidelity",
        res.fidelity >= 0.99 and res.iterations <= 500 and elapsed < 600,
        f"fidelity {res.fidelity:.5f} after {res.iterations} iterations, {opts.n_slots} slots of "
        f"{opts.dt} ns, {elapsed:.1f} s",
    )


def test_c8b_grape_gradient():
    spec = SpinSystemSpec.desk()
    rng = np.random.default_rng(8)
    worst = 0.0
    for modulated in (False, True):
        opts = GrapeOptions(n_slots=300, modulated=modulated)
        problem, controls = build_problem(u_zz(), spec, opts)
        amps = rng.uniform(-1, 1, (len(controls), opts.n_slots)) * spec.b1_max
        _, grad = problem.fidelity_and_gradient(amps)
        probes = [(int(rng.integers(len(controls))), int(rng.integers(opts.n_slots))) for _ in range(20)]
        numeric = finite_difference_gradient(problem, amps, 1e-7, probes)
        analytic = np.array([grad[k, j] for k, j in probes])
        worst = max(worst, float(np.linalg.norm(analytic - numeric) / np.linalg.norm(numeric)))
    record("C8b GRAPE gradient", worst <= 1e-4, f"norm-wise relative error over 20 probes {worst:.1e}")


@pytest.mark.slow
def test_c8c_grape_spectrum(grape_run):
    spec, _, res, _ = grape_run
    sp = pulse_spectrum(res.schedule)
    lines = [t.frequency for t in transition_frequencies(drift_hamiltonian(spec))] + [spec.combination_line]
    line_bins = np.rint(np.array(lines) / sp.resolution)
    distances = [float(np.min(np.abs(line_bins - np.rint(f / sp.resolution)))) for f, _ in sp.peaks]
    ok = bool(sp.peaks) and max(distances) <= 1
    peaks = ", ".join(f"{f:.3f}" for f, _ in sp.peaks)
    record(
        "C8c GRAPE spectrum",
        ok,
        f"peaks at {peaks} MHz, bin distances to nearest line {distances}, resolution {sp.resolution:.4f} MHz",
    )
