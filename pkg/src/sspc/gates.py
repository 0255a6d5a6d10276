"""Single-step parity-check unitaries and their verification.

Register layout is ``ancilla (most significant) ⊗ q1 ⊗ q2``. Measuring the
ancilla after ``U_XX`` (or ``U_ZZ``) applied to ``|0> ⊗ |psi>`` projects the
data pair onto the ``+1`` (outcome 0) or ``-1`` (outcome 1) eigenspace of
``XX`` (or ``ZZ``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .channels import pauli_basis, pauli_matrix, unitarity_residual
from .errors import ImpossibleOutcome, InvalidArgument, VerificationFailure

STATE_NORM_TOL = 1e-10
OUTCOME_TOL = 1e-12
SEMANTICS_TOL = 1e-9
CLIFFORD_TOL = 1e-9

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
_ID2 = np.eye(2, dtype=np.complex128)
_P0 = np.diag([1.0, 0.0]).astype(np.complex128)
_P1 = np.diag([0.0, 1.0]).astype(np.complex128)

_UXX = 0.5 * np.array(
    [
        [1, 0, 0, 1, 1, 0, 0, -1],
        [0, 1, 1, 0, 0, 1, -1, 0],
        [0, 1, 1, 0, 0, -1, 1, 0],
        [1, 0, 0, 1, -1, 0, 0, 1],
        [1, 0, 0, -1, 1, 0, 0, 1],
        [0, 1, -1, 0, 0, 1, 1, 0],
        [0, -1, 1, 0, 0, 1, 1, 0],
        [-1, 0, 0, 1, 1, 0, 0, 1],
    ],
    dtype=np.complex128,
)
# |a, q1, q2> -> |a ^ q1 ^ q2, q1, q2>
_UZZ = np.eye(8, dtype=np.complex128)[[0, 5, 6, 3, 4, 1, 2, 7]]

BASES = ("XX", "ZZ")


def u_xx() -> np.ndarray:
    return _UXX.copy()


def u_zz() -> np.ndarray:
    return _UZZ.copy()


def sspc_unitary(basis: str) -> np.ndarray:
    basis = _check_basis(basis)
    return u_xx() if basis == "XX" else u_zz()


def embed(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """``op`` on ``qubit`` (0 = most significant) of an ``n``-qubit register."""
    factors = [_ID2] * n
    factors[qubit] = np.asarray(op, dtype=np.complex128)
    return reduce(np.kron, factors)


def cx(control: int, target: int, n: int = 3) -> np.ndarray:
    if control == target or not (0 <= control < n and 0 <= target < n):
        raise InvalidArgument(f"bad CNOT wires control={control} target={target} for {n} qubits")
    x = pauli_matrix("X")
    return embed(_P0, control, n) + embed(_P1, control, n) @ embed(x, target, n)


def _check_basis(basis: str) -> str:
    b = str(basis).upper()
    if b not in BASES:
        raise InvalidArgument(f"unsupported parity basis {basis!r}; expected one of {BASES}")
    return b


@dataclass(frozen=True)
class ParityCheckSpec:
    basis: str
    n_data: int = 2
    ancilla_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "basis", _check_basis(self.basis))
        if self.n_data != 2 or self.ancilla_index != 0:
            raise InvalidArgument("only a 2-data-qubit check with the ancilla on wire 0 is supported")

    @property
    def operator(self) -> np.ndarray:
        """The checked two-qubit Pauli product."""
        return pauli_matrix(self.basis)


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amp.size != 2**self.n_qubits:
            raise InvalidArgument(f"expected {2**self.n_qubits} amplitudes, got {amp.size}")
        norm = np.linalg.norm(amp)
        if abs(norm - 1) > STATE_NORM_TOL:
            raise InvalidArgument(f"state is not normalised (norm {norm:.12f})")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def normalized(cls, n_qubits: int, amplitudes) -> StateVector:
        amp = np.asarray(amplitudes, dtype=np.complex128)
        return cls(n_qubits, amp / np.linalg.norm(amp))


def random_states(n_qubits: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` normalised complex-Gaussian states, one per row."""
    d = 2**n_qubits
    z = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def decomposed_parity_circuit(spec: ParityCheckSpec | str) -> list[tuple[str, np.ndarray]]:
    """Gate sequence in time order whose product is the single-step unitary."""
    if not isinstance(spec, ParityCheckSpec):
        spec = ParityCheckSpec(spec)
    if spec.basis == "XX":
        h = embed(HADAMARD, 0, 3)
        return [("HII", h), ("CX01", cx(0, 1)), ("CX02", cx(0, 2)), ("HII", h)]
    return [("CX10", cx(1, 0)), ("CX20", cx(2, 0))]


def sequence_product(gates) -> np.ndarray:
    """Matrix of a time-ordered gate list (first gate acts first)."""
    out = np.eye(gates[0][1].shape[0], dtype=np.complex128)
    for _, g in gates:
        out = g @ out
    return out


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``max |a - e^{i theta} b|`` with theta aligning the overlap ``Tr(b^dag a)``."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise InvalidArgument(f"shape mismatch {a.shape} vs {b.shape}")
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(a - phase * b)))


def equal_up_to_phase(a, b, tol: float = 1e-10) -> bool:
    return phase_distance(a, b) <= tol


def parity_project(state, spec: ParityCheckSpec | str, ancilla_outcome: int):
    """Probability and renormalised post-measurement state for one outcome.

    Outcome 0 selects the ``+1`` eigenspace, outcome 1 the ``-1`` eigenspace.
    """
    if not isinstance(spec, ParityCheckSpec):
        spec = ParityCheckSpec(spec)
    if ancilla_outcome not in (0, 1):
        raise InvalidArgument(f"ancilla outcome must be 0 or 1, got {ancilla_outcome!r}")
    if not isinstance(state, StateVector):
        state = StateVector(2, state)
    if state.n_qubits != 2:
        raise InvalidArgument("parity checks act on two data qubits")
    sign = 1 - 2 * ancilla_outcome
    proj = 0.5 * (np.eye(4) + sign * spec.operator)
    out = proj @ state.amplitudes
    prob = float(np.real(np.vdot(out, out)))
    if prob < OUTCOME_TOL:
        raise ImpossibleOutcome(f"outcome {ancilla_outcome} has probability {prob:.3e}")
    return prob, StateVector.normalized(2, out)


@dataclass
class ParityReport:
    basis: str
    trials: int
    seed: int
    max_eigen_deviation: float
    max_probability_deviation: float
    max_state_deviation: float
    max_normalisation_deviation: float
    passed: bool
    witness: np.ndarray | None = field(default=None, repr=False)

    @property
    def max_deviation(self) -> float:
        return max(
            self.max_eigen_deviation,
            self.max_probability_deviation,
            self.max_state_deviation,
            self.max_normalisation_deviation,
        )

    def to_dict(self) -> dict:
        return {
            "basis": self.basis,
            "trials": self.trials,
            "seed": self.seed,
            "max_eigen_deviation": self.max_eigen_deviation,
            "max_probability_deviation": self.max_probability_deviation,
            "max_state_deviation": self.max_state_deviation,
            "max_normalisation_deviation": self.max_normalisation_deviation,
            "max_deviation": self.max_deviation,
            "passed": self.passed,
        }


def _ancilla_branches(u: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Unnormalised data states for ancilla outcome 0 and 1; shape (2, trials, 4)."""
    full = np.zeros((states.shape[0], 8), dtype=np.complex128)
    full[:, :4] = states  # ancilla |0> is the top half
    out = full @ u.T
    return np.stack([out[:, :4], out[:, 4:]])


def verify_parity_semantics(
    u: np.ndarray,
    spec: ParityCheckSpec | str,
    trials: int = 100,
    seed: int = 0,
    tol: float = SEMANTICS_TOL,
    *,
    raise_on_failure: bool = True,
) -> ParityReport:
    """Check that ``u`` implements the parity measurement on random data states.

    For each state ``|psi>`` the two ancilla branches of ``u |0>|psi>`` must be
    ``±1`` eigenstates of the checked operator, carry the projector
    probabilities, and match the projected states up to a global phase.
    """
    if not isinstance(spec, ParityCheckSpec):
        spec = ParityCheckSpec(spec)
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (8, 8):
        raise InvalidArgument(f"expected an 8x8 unitary, got {u.shape}")
    if unitarity_residual(u) > 1e-10:
        raise InvalidArgument("matrix is not unitary")
    if trials < 1:
        raise InvalidArgument("need at least one trial")

    states = random_states(2, trials, np.random.default_rng(seed))
    branches = _ancilla_branches(u, states)
    op = spec.operator
    eye = np.eye(4)
    probs = np.sum(np.abs(branches) ** 2, axis=2)  # (2, trials)

    eig_dev = np.zeros(trials)
    prob_dev = np.zeros(trials)
    state_dev = np.zeros(trials)
    for m, sign in ((0, 1), (1, -1)):
        branch = branches[m]
        # (P - sign) psi_out = 0 for an eigenstate; compare on normalised vectors
        norms = np.sqrt(np.maximum(probs[m], 1e-300))[:, None]
        unit = branch / norms
        resid = unit @ op.T - sign * unit
        live = probs[m] > OUTCOME_TOL
        eig_dev = np.maximum(eig_dev, np.where(live, np.max(np.abs(resid), axis=1), 0.0))
        proj = 0.5 * (eye + sign * op)
        expected = states @ proj.T
        p_expected = np.sum(np.abs(expected) ** 2, axis=1)
        prob_dev = np.maximum(prob_dev, np.abs(probs[m] - p_expected))
        # unnormalised branches agree up to a per-trial phase
        overlap = np.sum(expected.conj() * branch, axis=1)
        phase = np.where(np.abs(overlap) > 0, overlap / np.maximum(np.abs(overlap), 1e-300), 1.0)
        state_dev = np.maximum(state_dev, np.max(np.abs(branch - phase[:, None] * expected), axis=1))
    norm_dev = np.abs(probs.sum(axis=0) - 1)

    worst = np.maximum.reduce([eig_dev, prob_dev, state_dev, norm_dev])
    k = int(np.argmax(worst))
    report = ParityReport(
        basis=spec.basis,
        trials=trials,
        seed=seed,
        max_eigen_deviation=float(eig_dev.max()),
        max_probability_deviation=float(prob_dev.max()),
        max_state_deviation=float(state_dev.max()),
        max_normalisation_deviation=float(norm_dev.max()),
        passed=bool(worst[k] <= tol),
        witness=states[k].copy(),
    )
    if not report.passed and raise_on_failure:
        raise VerificationFailure(
            f"{spec.basis} parity semantics violated (deviation {worst[k]:.3e})",
            witness=states[k].copy(),
            deviation=float(worst[k]),
        )
    return report


def _pauli_decomposition(m: np.ndarray, n: int) -> np.ndarray:
    basis = pauli_basis(n)
    return np.einsum("jab,ba->j", basis, m) / 2**n


def is_clifford(u: np.ndarray, tol: float = CLIFFORD_TOL) -> bool:
    """True iff ``u`` maps every ``X_i`` and ``Z_i`` to a Pauli string times ``±1, ±i``."""
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvalidArgument(f"expected a square matrix, got {u.shape}")
    d = u.shape[0]
    n = d.bit_length() - 1
    if 2**n != d or n < 1:
        raise InvalidArgument(f"dimension {d} is not a power of two")
    if unitarity_residual(u) > 1e-10:
        raise InvalidArgument("matrix is not unitary")
    basis = pauli_basis(n)
    phases = np.array([1, -1, 1j, -1j])
    for q in range(n):
        for gen in ("X", "Z"):
            image = u @ embed(pauli_matrix(gen), q, n) @ u.conj().T
            coeffs = _pauli_decomposition(image, n)
            j = int(np.argmax(np.abs(coeffs)))
            c = coeffs[j]
            if np.min(np.abs(phases - c)) > tol:
                return False
            if np.max(np.abs(image - c * basis[j])) > tol:
                return False
    return True
