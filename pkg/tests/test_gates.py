import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sspc.channels import pauli_matrix, unitarity_residual
from sspc.errors import ImpossibleOutcome, InvalidArgument, VerificationFailure
from sspc.gates import (
    HADAMARD,
    ParityCheckSpec,
    StateVector,
    cx,
    decomposed_parity_circuit,
    embed,
    equal_up_to_phase,
    is_clifford,
    parity_project,
    phase_distance,
    random_states,
    sequence_product,
    sspc_unitary,
    u_xx,
    u_zz,
    verify_parity_semantics,
)

seeds = st.integers(0, 2**32 - 1)
T_GATE = np.diag([1, np.exp(1j * np.pi / 4)])


def basis_state(bits):
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


class TestConstruction:
    @pytest.mark.parametrize("u", [u_xx(), u_zz()])
    def test_unitary(self, u):
        assert unitarity_residual(u) < 1e-14

    @pytest.mark.parametrize("basis", ["XX", "ZZ", "xx"])
    def test_matches_decomposition(self, basis):
        product = sequence_product(decomposed_parity_circuit(basis))
        assert phase_distance(sspc_unitary(basis), product) < 1e-12

    def test_xx_check_from_rotated_zz_check(self):
        # rotating both data qubits into the X basis turns a Z parity check into an X one
        h_data = embed(HADAMARD, 1, 3) @ embed(HADAMARD, 2, 3)
        rotated = h_data @ u_zz() @ h_data
        assert verify_parity_semantics(rotated, "XX", trials=200).passed
        assert not verify_parity_semantics(rotated, "ZZ", trials=50, raise_on_failure=False).passed

    def test_zz_truth_table(self):
        u = u_zz()
        for a in "01":
            for q1 in "01":
                for q2 in "01":
                    out = str(int(a) ^ int(q1) ^ int(q2)) + q1 + q2
                    np.testing.assert_array_equal(u @ basis_state(a + q1 + q2), basis_state(out))

    def test_returns_copies(self):
        u = u_xx()
        u[0, 0] = 99
        assert u_xx()[0, 0] == 0.5

    @pytest.mark.parametrize("basis", ["YY", "XZ", ""])
    def test_unsupported_basis(self, basis):
        with pytest.raises(InvalidArgument):
            sspc_unitary(basis)

    def test_bad_cnot(self):
        with pytest.raises(InvalidArgument):
            cx(1, 1)
        with pytest.raises(InvalidArgument):
            cx(0, 3)

    def test_only_two_data_qubits(self):
        with pytest.raises(InvalidArgument):
            ParityCheckSpec("XX", n_data=3)


class TestStates:
    def test_normalisation_checked(self):
        with pytest.raises(InvalidArgument):
            StateVector(1, [1, 1])
        with pytest.raises(InvalidArgument):
            StateVector(2, [1, 0])

    def test_normalized_constructor(self):
        s = StateVector.normalized(1, [3, 4j])
        assert np.linalg.norm(s.amplitudes) == pytest.approx(1)

    def test_random_states_are_unit(self, rng):
        states = random_states(2, 50, rng)
        np.testing.assert_allclose(np.linalg.norm(states, axis=1), 1, atol=1e-14)


class TestProjection:
    def test_bell_state_is_an_eigenstate(self):
        bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
        prob, post = parity_project(bell, "XX", 0)
        assert prob == pytest.approx(1)
        assert equal_up_to_phase(post.amplitudes, bell)
        with pytest.raises(ImpossibleOutcome):
            parity_project(bell, "XX", 1)

    def test_odd_zz_parity(self):
        prob, post = parity_project(basis_state("01"), "ZZ", 1)
        assert prob == pytest.approx(1)
        with pytest.raises(ImpossibleOutcome):
            parity_project(basis_state("01"), "ZZ", 0)

    def test_bad_outcome(self):
        with pytest.raises(InvalidArgument):
            parity_project(basis_state("00"), "ZZ", 2)

    @given(seeds, st.sampled_from(["XX", "ZZ"]))
    @settings(max_examples=40, deadline=None)
    def test_outcomes_sum_to_one_and_are_eigenstates(self, seed, basis):
        state = random_states(2, 1, np.random.default_rng(seed))[0]
        op = pauli_matrix(basis)
        total = 0.0
        for outcome, sign in ((0, 1), (1, -1)):
            prob, post = parity_project(state, basis, outcome)
            total += prob
            np.testing.assert_allclose(op @ post.amplitudes, sign * post.amplitudes, atol=1e-12)
        assert total == pytest.approx(1, abs=1e-12)


class TestVerification:
    @pytest.mark.parametrize("basis", ["XX", "ZZ"])
    def test_correct_unitaries_pass(self, basis):
        report = verify_parity_semantics(sspc_unitary(basis), basis, trials=500, seed=7)
        assert report.passed and report.max_deviation < 1e-12
        assert report.to_dict()["trials"] == 500

    @given(seeds, st.sampled_from(["XX", "ZZ"]))
    @settings(max_examples=20, deadline=None)
    def test_branch_probabilities_match_projectors(self, seed, basis):
        # independent route: build the full output state and read the ancilla marginal
        state = random_states(2, 1, np.random.default_rng(seed))[0]
        out = sspc_unitary(basis) @ np.kron([1, 0], state)
        p0 = np.sum(np.abs(out[:4]) ** 2)
        proj = 0.5 * (np.eye(4) + pauli_matrix(basis))
        assert p0 == pytest.approx(np.vdot(state, proj @ state).real, abs=1e-12)

    def test_swapped_unitaries_fail(self):
        with pytest.raises(VerificationFailure) as info:
            verify_parity_semantics(u_zz(), "XX", trials=50)
        assert info.value.witness.shape == (4,)
        assert info.value.deviation > 1e-3

    def test_identity_fails_with_witness(self):
        report = verify_parity_semantics(np.eye(8), "ZZ", trials=20, raise_on_failure=False)
        assert not report.passed
        # the witness reproduces the failure
        assert parity_project(report.witness, "ZZ", 1)[0] > 1e-6

    def test_same_seed_same_report(self):
        a = verify_parity_semantics(u_xx(), "XX", trials=30, seed=3).to_dict()
        b = verify_parity_semantics(u_xx(), "XX", trials=30, seed=3).to_dict()
        assert a == b

    @pytest.mark.parametrize("matrix", [np.eye(4), 2 * np.eye(8)])
    def test_rejects_bad_matrix(self, matrix):
        with pytest.raises(InvalidArgument):
            verify_parity_semantics(matrix, "XX")


class TestClifford:
    @pytest.mark.parametrize("u", [u_xx(), u_zz(), cx(0, 1), embed(HADAMARD, 2, 3)])
    def test_cliffords(self, u):
        assert is_clifford(u)

    def test_t_gate_is_not(self):
        assert not is_clifford(embed(T_GATE, 0, 3))

    def test_phase_invariant(self):
        assert is_clifford(np.exp(0.3j) * u_xx())

    def test_rejects_non_unitary(self):
        with pytest.raises(InvalidArgument):
            is_clifford(np.ones((4, 4)))
        with pytest.raises(InvalidArgument):
            is_clifford(np.eye(3))
