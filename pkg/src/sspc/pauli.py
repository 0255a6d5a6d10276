"""Stochastic Pauli error channels and projection of general channels onto them.

A general channel is reduced to the diagonal of its chi matrix: writing each
Kraus operator as ``A_k = sum_j a_jk P_j``, the probability of Pauli error
``P_j`` is ``sum_k |a_jk|**2``. The off-diagonal chi entries are dropped, and
their Frobenius norm is reported as a diagnostic.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .channels import (
    ChannelRep,
    check_tp,
    convert,
    pauli_basis,
    pauli_index,
    pauli_label,
    pauli_labels,
)
from .errors import InvalidArgument, PhysicalityError

NEG_CLIP = 1e-12
NEG_ABORT = 1e-6
NORM_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class PauliErrorChannel:
    """Probability vector over the ``4**n`` Pauli strings in canonical order.

    Entries down to ``-1e-12`` are clipped to zero. The vector must sum to one
    within ``1e-6``.
    """

    n_qubits: int
    probs: np.ndarray

    def __post_init__(self):
        n = self.n_qubits
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InvalidArgument(f"n_qubits must be a positive integer, got {n!r}")
        p = np.array(self.probs, dtype=np.float64).reshape(-1)
        if p.size != 4**n:
            raise InvalidArgument(f"expected {4**n} probabilities, got {p.size}")
        if not np.all(np.isfinite(p)):
            raise InvalidArgument("non-finite probability")
        if p.min() < -NEG_CLIP:
            raise InvalidArgument(f"negative probability {p.min():.3e}")
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if total == 0:
            raise InvalidArgument("all-zero Pauli channel")
        if abs(total - 1) > NORM_TOL:
            raise InvalidArgument(f"probabilities sum to {total!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "n_qubits", int(n))
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_dict(cls, n_qubits: int, probs: dict) -> PauliErrorChannel:
        vec = np.zeros(4**n_qubits)
        for label, value in probs.items():
            if len(label) != n_qubits:
                raise InvalidArgument(f"label {label!r} has wrong length for {n_qubits} qubits")
            vec[pauli_index(label)] += value
        return cls(n_qubits, vec)

    @classmethod
    def identity(cls, n_qubits: int) -> PauliErrorChannel:
        p = np.zeros(4**n_qubits)
        p[0] = 1.0
        return cls(n_qubits, p)

    @property
    def perfection(self) -> float:
        """Probability of no error (the all-identity label)."""
        return float(self.probs[0])

    def __getitem__(self, label: str) -> float:
        if len(label) != self.n_qubits:
            raise InvalidArgument(f"label {label!r} has wrong length for {self.n_qubits} qubits")
        return float(self.probs[pauli_index(label)])

    def as_dict(self, cutoff: float = 0.0) -> dict[str, float]:
        return {
            lab: float(v)
            for lab, v in zip(pauli_labels(self.n_qubits), self.probs)
            if cutoff <= 0 or v >= cutoff
        }

    def __eq__(self, other):
        if not isinstance(other, PauliErrorChannel):
            return NotImplemented
        return self.n_qubits == other.n_qubits and np.array_equal(self.probs, other.probs)

    __hash__ = None

    def to_ptm(self) -> ChannelRep:
        """Diagonal PTM of this Pauli channel (used by the dense oracle)."""
        basis = pauli_basis(self.n_qubits)
        d = 2**self.n_qubits
        # Pauli i commutes (+1) or anticommutes (-1) with Pauli j.
        sign = np.empty((4**self.n_qubits, 4**self.n_qubits))
        for i in range(len(basis)):
            for j in range(len(basis)):
                sign[i, j] = np.real(np.trace(basis[i] @ basis[j] @ basis[i] @ basis[j])) / d
        return ChannelRep("ptm", self.n_qubits, np.diag(sign.T @ self.probs))

    def __repr__(self):
        top = np.argsort(self.probs)[::-1][:4]
        shown = ", ".join(f"{pauli_label(i, self.n_qubits)}={self.probs[i]:.6g}" for i in top)
        return f"PauliErrorChannel(n_qubits={self.n_qubits}, {shown}, ...)"


@dataclass(frozen=True)
class ProjectionResult:
    channel: PauliErrorChannel
    coefficients: np.ndarray
    offdiag_mass: float
    kraus: ChannelRep


def pauli_coefficients(kraus) -> np.ndarray:
    """Coefficients ``a[k, j] = Tr(A_k P_j) / 2**n`` for each Kraus operator.

    Returns an array of shape ``(n_kraus, 4**n)``; row ``k`` resums to ``A_k``.
    """
    if isinstance(kraus, ChannelRep):
        if kraus.kind != "kraus":
            kraus = convert(kraus, "kraus")
        ops = kraus.payload
    else:
        ops = [np.asarray(a, dtype=np.complex128) for a in kraus]
    shape = ops[0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise InvalidArgument(f"Kraus operators must be square, got {shape}")
    if any(a.shape != shape for a in ops):
        raise InvalidArgument("Kraus operators have different shapes")
    d = shape[0]
    n = d.bit_length() - 1
    if 2**n != d:
        raise InvalidArgument(f"dimension {d} is not a power of two")
    basis = pauli_basis(n)
    stack = np.stack(ops)
    return np.einsum("kab,jba->kj", stack, basis) / d


def chi_from_coefficients(coeffs: np.ndarray) -> np.ndarray:
    return coeffs.T @ coeffs.conj()


def project(kraus, *, tp_tol: float = 1e-6) -> ProjectionResult:
    """Project a channel onto a stochastic Pauli channel, with diagnostics."""
    if isinstance(kraus, ChannelRep) and kraus.kind != "kraus":
        kraus = convert(kraus, "kraus")
    elif not isinstance(kraus, ChannelRep):
        kraus = ChannelRep.of("kraus", list(kraus))
    ok, residual = check_tp(kraus, tp_tol)
    if not ok:
        raise PhysicalityError(f"Kraus set is not trace preserving (residual {residual:.3e})")
    coeffs = pauli_coefficients(kraus)
    probs = np.sum(np.abs(coeffs) ** 2, axis=0)
    if probs.min() < -NEG_ABORT:
        raise PhysicalityError(f"Pauli probability {probs.min():.3e} below -{NEG_ABORT:g}")
    if probs.min() < 0:
        warnings.warn("clipping negative Pauli probabilities", RuntimeWarning, stacklevel=2)
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if abs(total - 1) > NEG_ABORT:
        warnings.warn(f"renormalising Pauli probabilities (sum {total:.8f})", RuntimeWarning,
                      stacklevel=2)
    probs = probs / total
    chi = chi_from_coefficients(coeffs)
    off = chi - np.diag(np.diag(chi))
    return ProjectionResult(
        channel=PauliErrorChannel(kraus.n_qubits, probs),
        coefficients=coeffs,
        offdiag_mass=float(np.linalg.norm(off)),
        kraus=kraus,
    )


def project_to_pauli_channel(kraus) -> PauliErrorChannel:
    """Diagonal-chi Pauli channel of a Kraus set (or any ``ChannelRep``)."""
    return project(kraus).channel


def full_gst_matrix(ideal, experimental) -> ChannelRep:
    """Error channel left after undoing the ideal gate: ``ideal^T @ experimental``.

    Both inputs are PTMs; the ideal one is orthogonal so its transpose is its
    inverse.
    """
    ri = ideal.payload if isinstance(ideal, ChannelRep) else np.asarray(ideal)
    re = experimental.payload if isinstance(experimental, ChannelRep) else np.asarray(experimental)
    if ri.shape != re.shape or ri.ndim != 2 or ri.shape[0] != ri.shape[1]:
        raise InvalidArgument(f"PTM shapes differ or are not square: {ri.shape} vs {re.shape}")
    if np.iscomplexobj(ri) or np.iscomplexobj(re):
        if max(np.abs(np.imag(ri)).max(), np.abs(np.imag(re)).max()) > 1e-10:
            raise InvalidArgument("PTMs must be real")
        ri, re = ri.real, re.real
    return ChannelRep.of("ptm", ri.T @ re)
