import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sspc.errors import InvalidArgument
from sspc.gates import u_zz
from sspc.grape import (
    GrapeOptions,
    build_problem,
    finite_difference_gradient,
    grape_optimize,
)
from sspc.spin import (
    PulseSchedule,
    SpinSystemSpec,
    control_operators,
    drift_hamiltonian,
    evolve,
    propagate,
)

seeds = st.integers(0, 2**32 - 1)
DESK = SpinSystemSpec.desk()


def relative_gradient_error(problem, amps, rng, n_probes=20):
    """Norm-wise relative error of the analytic gradient over random (control, slot) probes."""
    _, grad = problem.fidelity_and_gradient(amps)
    probes = [(int(rng.integers(amps.shape[0])), int(rng.integers(amps.shape[1]))) for _ in range(n_probes)]
    numeric = finite_difference_gradient(problem, amps, step=1e-7, probes=probes)
    analytic = np.array([grad[k, j] for k, j in probes])
    return np.linalg.norm(analytic - numeric) / np.linalg.norm(numeric)


def reachable_target(opts, seed):
    """A gate produced by some admissible schedule, so fidelity 1 is attainable."""
    problem, _ = build_problem(np.eye(8), DESK, opts)
    amps = np.random.default_rng(seed).uniform(-1, 1, (4, opts.n_slots)) * DESK.b1_max
    return problem.propagator(amps)


class TestOptions:
    @pytest.mark.parametrize(
        "kwargs", [{"n_slots": 0}, {"dt": -1.0}, {"tol": 1.5}, {"max_iter": -1}, {"method": "newton"}]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidArgument):
            GrapeOptions(**kwargs)


class TestGradient:
    @pytest.mark.parametrize("modulated", [False, True])
    def test_matches_finite_differences(self, modulated, rng):
        opts = GrapeOptions(n_slots=200, modulated=modulated)
        problem, controls = build_problem(u_zz(), DESK, opts)
        amps = rng.uniform(-1, 1, (len(controls), opts.n_slots)) * DESK.b1_max
        assert relative_gradient_error(problem, amps, rng) <= 1e-4

    @given(seeds)
    @settings(max_examples=5, deadline=None)
    def test_matches_finite_differences_on_random_schedules(self, seed):
        rng = np.random.default_rng(seed)
        opts = GrapeOptions(n_slots=100)
        problem, _ = build_problem(u_zz(), DESK, opts)
        amps = rng.uniform(-1, 1, (4, opts.n_slots)) * DESK.b1_max
        assert relative_gradient_error(problem, amps, rng) <= 1e-4

    def test_propagator_agrees_with_propagate(self, rng):
        opts = GrapeOptions(n_slots=50)
        problem, controls = build_problem(u_zz(), DESK, opts)
        amps = rng.uniform(-0.1, 0.1, (4, 50))
        u = propagate(drift_hamiltonian(DESK), controls, PulseSchedule(opts.dt, amps))
        np.testing.assert_allclose(problem.propagator(amps), u, atol=1e-12)

    def test_fidelity_range(self, rng):
        opts = GrapeOptions(n_slots=30)
        problem, _ = build_problem(u_zz(), DESK, opts)
        f = problem.fidelity(rng.uniform(-0.1, 0.1, (4, 30)))
        assert 0 <= f <= 1


class TestOptimize:
    def test_drift_target_needs_no_iterations(self):
        opts = GrapeOptions(n_slots=100, init_scale=0.0)
        target = evolve(drift_hamiltonian(DESK), opts.n_slots * opts.dt)
        res = grape_optimize(target, DESK, opts)
        assert res.fidelity == pytest.approx(1, abs=1e-12)
        assert res.iterations == 0 and res.converged
        assert np.all(res.schedule.amplitudes == 0)

    @pytest.mark.parametrize("method", ["lbfgsb", "ascent"])
    def test_reaches_reachable_target(self, method):
        opts = GrapeOptions(n_slots=60, max_iter=300, tol=0.99, init_scale=0.1, method=method)
        res = grape_optimize(reachable_target(opts, seed=4), DESK, opts)
        assert res.converged and res.fidelity >= 0.99
        assert np.max(np.abs(res.schedule.amplitudes)) <= DESK.b1_max

    def test_history_is_monotone_and_reported_fidelity_matches(self):
        opts = GrapeOptions(n_slots=60, max_iter=40, tol=0.9999, init_scale=0.1)
        res = grape_optimize(reachable_target(opts, seed=5), DESK, opts)
        assert all(b >= a for a, b in zip(res.history, res.history[1:]))
        assert res.history[-1] == pytest.approx(res.fidelity, abs=1e-12)
        u = propagate(drift_hamiltonian(DESK), control_operators(DESK), res.schedule)
        assert abs(np.trace(reachable_target(opts, 5).conj().T @ u)) ** 2 / 64 == pytest.approx(res.fidelity)

    def test_unreached_tolerance_is_not_an_error(self):
        opts = GrapeOptions(n_slots=20, max_iter=3, tol=1.0)
        res = grape_optimize(u_zz(), DESK, opts)
        assert not res.converged and res.iterations <= 3

    def test_deterministic_for_fixed_seed(self):
        opts = GrapeOptions(n_slots=40, max_iter=10, seed=11, init_scale=0.2)
        a = grape_optimize(u_zz(), DESK, opts)
        b = grape_optimize(u_zz(), DESK, opts)
        np.testing.assert_array_equal(a.schedule.amplitudes, b.schedule.amplitudes)
        assert a.fidelity == b.fidelity

    def test_respects_explicit_bound(self):
        opts = GrapeOptions(n_slots=40, max_iter=20, b1_max=0.01, init_scale=1.0)
        res = grape_optimize(u_zz(), DESK, opts)
        assert np.max(np.abs(res.schedule.amplitudes)) <= 0.01

    @pytest.mark.parametrize("target", [np.eye(4), 2 * np.eye(8), np.ones((8, 8))])
    def test_invalid_target(self, target):
        with pytest.raises(InvalidArgument):
            grape_optimize(target, DESK, GrapeOptions(n_slots=10))
