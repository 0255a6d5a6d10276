"""Quantum channel representations and lossless conversions between them.

Conventions
-----------
* Pauli strings are indexed base-4 with ``I=0, X=1, Y=2, Z=3`` and the first
  (leftmost) label as the most significant digit, so for two qubits index 6
  is ``"XY"`` and the matrix is ``kron(X, Y)``.
* Vectorisation is column stacking: ``vec(A) = A.T.reshape(-1)``.  With it
  ``vec(A @ rho @ B) = kron(B.T, A) @ vec(rho)`` and the superoperator of a
  Kraus set is ``sum_k kron(conj(A_k), A_k)``.
* The Choi matrix is ``J = sum_k vec(A_k) vec(A_k)^dagger`` (trace ``d``).
* The chi matrix satisfies ``E(rho) = sum_jk chi[j, k] P_j rho P_k`` and has
  unit trace for trace-preserving channels.
* The PTM is ``R[i, j] = Tr(P_i E(P_j)) / d``.
"""
from __future__ import annotations

import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cache

import numpy as np

from .errors import InvalidArgument, NotCompletelyPositive, PhysicalityError

PHYSICALITY_TOL = 1e-8
ROUND_TRIP_TOL = 1e-9
UNITARITY_TOL = 1e-10
REAL_TOL = 1e-10
KRAUS_CUTOFF = 1e-10

KINDS = ("unitary", "superop", "ptm", "chi", "choi", "kraus")
_ALIASES = {"superoperator": "superop"}

PAULI_LABELS = "IXYZ"
_SINGLE = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)


# ---------------------------------------------------------------------------
# Pauli strings
# ---------------------------------------------------------------------------


def pauli_labels(n: int) -> list[str]:
    """All ``4**n`` Pauli labels in canonical order."""
    if n < 1:
        raise InvalidArgument(f"qubit count must be >= 1, got {n}")
    labels = [""]
    for _ in range(n):
        labels = [s + c for s in labels for c in PAULI_LABELS]
    return labels


def pauli_index(label: str) -> int:
    label = label.upper()
    if not label or any(c not in PAULI_LABELS for c in label):
        raise InvalidArgument(f"not a Pauli string: {label!r}")
    idx = 0
    for c in label:
        idx = 4 * idx + PAULI_LABELS.index(c)
    return idx


def pauli_label(index: int, n: int) -> str:
    if not 0 <= index < 4**n:
        raise InvalidArgument(f"index {index} out of range for {n} qubits")
    digits = []
    for _ in range(n):
        index, r = divmod(index, 4)
        digits.append(PAULI_LABELS[r])
    return "".join(reversed(digits))


def pauli_matrix(label: str) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for c in label.upper():
        out = np.kron(out, _SINGLE[PAULI_LABELS.index(c)])
    return out


@cache
def _pauli_basis_cached(n: int) -> np.ndarray:
    basis = _SINGLE
    for _ in range(n - 1):
        basis = np.einsum("aij,bkl->abikjl", basis, _SINGLE).reshape(
            basis.shape[0] * 4, basis.shape[1] * 2, basis.shape[2] * 2
        )
    basis.setflags(write=False)
    return basis


def pauli_basis(n: int) -> np.ndarray:
    """Array of shape ``(4**n, 2**n, 2**n)`` holding the n-qubit Pauli strings."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidArgument(f"qubit count must be a positive integer, got {n!r}")
    return _pauli_basis_cached(int(n))


@cache
def _vec_basis(n: int) -> np.ndarray:
    # Columns are vec(P_j); B^dagger B = d * identity.
    basis = pauli_basis(n)
    b = np.stack([vec(p) for p in basis], axis=1)
    b.setflags(write=False)
    return b


# ---------------------------------------------------------------------------
# Vectorisation
# ---------------------------------------------------------------------------


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stacking vectorisation."""
    return np.asarray(matrix).T.reshape(-1)


def unvec(vector: np.ndarray) -> np.ndarray:
    vector = np.asarray(vector)
    d = int(round(np.sqrt(vector.size)))
    if d * d != vector.size:
        raise InvalidArgument("vector length is not a perfect square")
    return vector.reshape(d, d).T


# ---------------------------------------------------------------------------
# ChannelRep
# ---------------------------------------------------------------------------


def _n_from_dim(dim: int, per_qubit: int) -> int:
    n = 0
    size = 1
    while size < dim:
        size *= per_qubit
        n += 1
    if size != dim or n == 0:
        raise InvalidArgument(f"dimension {dim} is not a positive power of {per_qubit}")
    return n


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ChannelRep:
    """A quantum channel in one of the representations in ``KINDS``.

    ``payload`` is a ``(dim, dim)`` array, or for ``kind == "kraus"`` a tuple of
    ``(2**n, 2**n)`` arrays. Arrays are copied and frozen on construction.
    """

    kind: str
    n_qubits: int
    payload: object

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise InvalidArgument(f"unknown channel kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        n = self.n_qubits
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InvalidArgument(f"n_qubits must be a positive integer, got {n!r}")
        object.__setattr__(self, "n_qubits", int(n))
        d = 2**n
        if kind == "kraus":
            ops = self.payload
            if isinstance(ops, np.ndarray) and ops.ndim == 2:
                ops = [ops]
            ops = [np.asarray(a, dtype=np.complex128) for a in ops]
            if not ops:
                raise InvalidArgument("Kraus set is empty")
            for a in ops:
                if a.shape != (d, d):
                    raise InvalidArgument(
                        f"Kraus operator shape {a.shape} != {(d, d)} for {n} qubit(s)"
                    )
                if not np.all(np.isfinite(a)):
                    raise InvalidArgument("non-finite Kraus entry")
            object.__setattr__(self, "payload", tuple(_readonly(a) for a in ops))
            return
        expected = (d, d) if kind == "unitary" else (d * d, d * d)
        m = np.asarray(self.payload)
        if m.shape != expected:
            raise InvalidArgument(f"{kind} payload shape {m.shape} != {expected}")
        if not np.all(np.isfinite(m)):
            raise InvalidArgument(f"non-finite entry in {kind} payload")
        if kind == "ptm":
            if np.iscomplexobj(m):
                if np.max(np.abs(m.imag), initial=0.0) > REAL_TOL:
                    raise InvalidArgument("PTM has imaginary part above 1e-10")
                m = m.real
            m = m.astype(np.float64)
        else:
            m = m.astype(np.complex128)
        object.__setattr__(self, "payload", _readonly(m))

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def matrix(self) -> np.ndarray:
        if self.kind == "kraus":
            raise InvalidArgument("Kraus representation has no single matrix")
        return self.payload

    @classmethod
    def of(cls, kind: str, payload) -> ChannelRep:
        """Build a representation, inferring the qubit count from the payload."""
        kind = _ALIASES.get(kind, kind)
        if kind == "kraus":
            first = payload if isinstance(payload, np.ndarray) and payload.ndim == 2 else payload[0]
            n = _n_from_dim(np.asarray(first).shape[0], 2)
        elif kind == "unitary":
            n = _n_from_dim(np.asarray(payload).shape[0], 2)
        else:
            n = _n_from_dim(np.asarray(payload).shape[0], 4)
        return cls(kind, n, payload)

    def __eq__(self, other):
        if not isinstance(other, ChannelRep):
            return NotImplemented
        if (self.kind, self.n_qubits) != (other.kind, other.n_qubits):
            return False
        if self.kind == "kraus":
            return len(self.payload) == len(other.payload) and all(
                np.array_equal(a, b) for a, b in zip(self.payload, other.payload)
            )
        return np.array_equal(self.payload, other.payload)

    __hash__ = None


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def unitarity_residual(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def _require_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> None:
    res = unitarity_residual(u)
    if res > tol:
        raise PhysicalityError(f"matrix is not unitary (max |U^dag U - I| = {res:.3e})")


def check_tp(kraus, tol: float = 1e-8) -> tuple[bool, float]:
    """Completeness check: ``max|sum_k A_k^dag A_k - I| <= tol``.

    Accepts a Kraus ``ChannelRep`` or a plain sequence of square matrices.
    Returns ``(ok, residual)``.
    """
    ops = kraus.payload if isinstance(kraus, ChannelRep) else [np.asarray(a) for a in kraus]
    d = ops[0].shape[0]
    total = sum(a.conj().T @ a for a in ops)
    residual = float(np.max(np.abs(total - np.eye(d))))
    return residual <= tol, residual


# ---------------------------------------------------------------------------
# Conversions (the superoperator is the hub)
# ---------------------------------------------------------------------------


def _choi_reshuffle(m: np.ndarray, d: int) -> np.ndarray:
    # superop <-> Choi under column stacking; the permutation is an involution.
    return m.reshape(d, d, d, d).transpose(3, 1, 2, 0).reshape(d * d, d * d)


def _to_superop(rep: ChannelRep) -> np.ndarray:
    d = rep.dim
    k = rep.kind
    if k == "superop":
        return np.array(rep.payload)
    if k == "unitary":
        _require_unitary(rep.payload)
        u = rep.payload
        return np.kron(u.conj(), u)
    if k == "kraus":
        return sum(np.kron(a.conj(), a) for a in rep.payload)
    if k == "ptm":
        b = _vec_basis(rep.n_qubits)
        return b @ rep.payload @ b.conj().T / d
    if k == "choi":
        return _choi_reshuffle(rep.payload, d)
    if k == "chi":
        b = _vec_basis(rep.n_qubits)
        return _choi_reshuffle(b @ rep.payload @ b.conj().T, d)
    raise InvalidArgument(f"unsupported kind {k!r}")


def kraus_from_choi(choi: np.ndarray) -> list[np.ndarray]:
    """Kraus operators from the eigendecomposition of a Choi matrix.

    Eigenvalues below ``-1e-8`` raise ``NotCompletelyPositive``; negative ones
    above that are clipped to zero, with a warning unless they are at
    round-off level (above ``-1e-10``). Operators are returned in order
    of decreasing eigenvalue, keeping eigenvalues above ``1e-10``.
    """
    j = np.asarray(choi, dtype=np.complex128)
    j = 0.5 * (j + j.conj().T)
    w, v = np.linalg.eigh(j)
    if w[0] < -PHYSICALITY_TOL:
        raise NotCompletelyPositive(
            f"Choi matrix has eigenvalue {w[0]:.3e} < -{PHYSICALITY_TOL:g}; "
            "check the output type of the characterisation experiment"
        )
    if w[0] < -KRAUS_CUTOFF:
        warnings.warn(
            f"clipping negative Choi eigenvalue {w[0]:.3e} to zero", RuntimeWarning, stacklevel=2
        )
    w = np.clip(w, 0.0, None)
    order = np.argsort(w)[::-1]
    ops = [np.sqrt(w[i]) * unvec(v[:, i]) for i in order if w[i] > KRAUS_CUTOFF]
    if not ops:
        raise PhysicalityError("channel is identically zero")
    return ops


def _from_superop(s: np.ndarray, kind: str, n: int) -> ChannelRep:
    d = 2**n
    if kind == "superop":
        return ChannelRep("superop", n, s)
    if kind == "ptm":
        b = _vec_basis(n)
        return ChannelRep("ptm", n, b.conj().T @ s @ b / d)
    if kind == "choi":
        return ChannelRep("choi", n, _choi_reshuffle(s, d))
    if kind == "chi":
        b = _vec_basis(n)
        return ChannelRep("chi", n, b.conj().T @ _choi_reshuffle(s, d) @ b / (d * d))
    if kind == "kraus":
        return ChannelRep("kraus", n, kraus_from_choi(_choi_reshuffle(s, d)))
    if kind == "unitary":
        ops = kraus_from_choi(_choi_reshuffle(s, d))
        if len(ops) != 1:
            raise PhysicalityError(f"channel has Kraus rank {len(ops)}; not a unitary channel")
        u = ops[0]
        _require_unitary(u, tol=1e-8)
        # Fix the global phase so the first sizeable entry is real positive.
        idx = np.argmax(np.abs(u) > 1e-6)
        phase = u.flat[idx] / abs(u.flat[idx])
        return ChannelRep("unitary", n, u / phase)
    raise InvalidArgument(f"unsupported target kind {kind!r}")


def convert(rep: ChannelRep, target_kind: str) -> ChannelRep:
    """Convert between any two kinds in ``KINDS``.

    Conversion to ``"kraus"`` goes through the Choi eigendecomposition and is
    unique only up to the Kraus gauge; conversion to ``"unitary"`` succeeds
    only for Kraus-rank-one channels and fixes the global phase.
    """
    target_kind = _ALIASES.get(target_kind, target_kind)
    if target_kind not in KINDS:
        raise InvalidArgument(f"unknown target kind {target_kind!r}")
    if target_kind == rep.kind:
        return rep
    return _from_superop(_to_superop(rep), target_kind, rep.n_qubits)


def superop(rep: ChannelRep) -> np.ndarray:
    """Column-stacking superoperator matrix of any representation."""
    return _to_superop(rep)


def apply(rep: ChannelRep, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    if rep.kind == "kraus":
        return sum(a @ rho @ a.conj().T for a in rep.payload)
    if rep.kind == "unitary":
        return rep.payload @ rho @ rep.payload.conj().T
    return unvec(_to_superop(rep) @ vec(rho))


def action_distance(a: ChannelRep, b: ChannelRep) -> float:
    """Max entrywise difference of the two channels on the matrix-unit basis.

    This is the comparison used for Kraus sets, which are only defined up to
    a unitary mixing of the operators.
    """
    if a.n_qubits != b.n_qubits:
        raise InvalidArgument("qubit counts differ")
    return float(np.max(np.abs(_to_superop(a) - _to_superop(b))))


def is_completely_positive(rep: ChannelRep, tol: float = PHYSICALITY_TOL) -> tuple[bool, float]:
    """Returns ``(ok, min_choi_eigenvalue)``."""
    j = _choi_reshuffle(_to_superop(rep), rep.dim)
    lam = float(np.linalg.eigvalsh(0.5 * (j + j.conj().T))[0])
    return lam >= -tol, lam


# ---------------------------------------------------------------------------
# PTM algebra
# ---------------------------------------------------------------------------


def ptm_from_unitary(u) -> ChannelRep:
    """Pauli transfer matrix of the unitary channel ``rho -> U rho U^dagger``."""
    if isinstance(u, ChannelRep):
        if u.kind != "unitary":
            raise InvalidArgument(f"expected a unitary, got {u.kind}")
        u = u.payload
    u = np.asarray(u, dtype=np.complex128)
    n = _n_from_dim(u.shape[0], 2)
    _require_unitary(u)
    basis = pauli_basis(n)
    d = 2**n
    # R_ij = Tr(P_i U P_j U^dag) / d
    conj = np.einsum("ab,jbc,dc->jad", u, basis, u.conj())
    r = np.einsum("iba,jab->ij", basis, conj) / d
    return ChannelRep("ptm", n, r.real)


def _ptm_array(r) -> np.ndarray:
    if isinstance(r, ChannelRep):
        if r.kind != "ptm":
            return convert(r, "ptm").payload
        return r.payload
    return np.asarray(r, dtype=np.float64)


def compose_ptm(a, b) -> ChannelRep:
    """PTM of ``b`` followed by ``a``."""
    ra, rb = _ptm_array(a), _ptm_array(b)
    if ra.shape != rb.shape:
        raise InvalidArgument(f"PTM shapes differ: {ra.shape} vs {rb.shape}")
    return ChannelRep.of("ptm", ra @ rb)


def tensor_ptm(*parts) -> ChannelRep:
    """PTM of the tensor product; the first part is the most significant qubit."""
    if not parts:
        raise InvalidArgument("nothing to tensor")
    out = np.ones((1, 1))
    for p in parts:
        out = np.kron(out, _ptm_array(p))
    return ChannelRep.of("ptm", out)


def process_fidelity(noisy, ideal) -> float:
    r_noisy = _ptm_array(noisy)
    if isinstance(ideal, ChannelRep) and ideal.kind != "unitary":
        r_ideal = _ptm_array(ideal)
    else:
        r_ideal = ptm_from_unitary(ideal).payload
    if r_noisy.shape != r_ideal.shape:
        raise InvalidArgument(f"dimension mismatch: {r_noisy.shape} vs {r_ideal.shape}")
    d2 = r_noisy.shape[0]
    return float(np.trace(r_ideal.T @ r_noisy) / d2)


def avg_gate_fidelity(noisy, ideal) -> float:
    """Average gate fidelity of a noisy PTM against an ideal unitary.

    ``F_avg = (d F_pro + 1) / (d + 1)`` with ``F_pro = Tr(R_ideal^T R_noisy) / d^2``.
    """
    f_pro = process_fidelity(noisy, ideal)
    d = int(round(np.sqrt(_ptm_array(noisy).shape[0])))
    return (d * f_pro + 1) / (d + 1)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_cptp(n: int, rng: np.random.Generator, env_qubits: int = 1) -> ChannelRep:
    """Kraus set of a random channel built from a unitary on system + environment."""
    d, e = 2**n, 2**env_qubits
    u = random_unitary(d * e, rng).reshape(d, e, d, e)
    # environment starts in |0>; trace it out in the computational basis
    ops = [u[:, k, :, 0] for k in range(e)]
    return ChannelRep("kraus", n, ops)


def kraus_sequence(rep: ChannelRep) -> Sequence[np.ndarray]:
    if rep.kind == "kraus":
        return rep.payload
    return convert(rep, "kraus").payload
