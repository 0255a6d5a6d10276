"""Accumulation of per-layer Pauli error channels through a layered circuit.

Error labels are *not* conjugated through the ideal gates between layers: the
accumulated channel is the group convolution of the layer channels over the
phase-free Pauli group, where label products are componentwise
(``X*Y = Z``, ``X*X = I``, ...). With labels encoded as base-4 integers
``I=0, X=1, Y=2, Z=3`` that product is plain bitwise XOR, so the convolution
is diagonalised by the Walsh-Hadamard transform on ``2n`` bits.

Because the convolution is abelian the result does not depend on layer
order. This is the model used for the perfection-rate analysis; it is not a
Clifford-propagating circuit-noise simulation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channels import pauli_index
from .errors import InvalidArgument
from .pauli import PauliErrorChannel


@dataclass(frozen=True)
class CircuitLayer:
    name: str
    channel: PauliErrorChannel


@dataclass(frozen=True)
class LayeredCircuit:
    n_qubits: int
    layers: tuple = field(default_factory=tuple)

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise InvalidArgument("circuit needs at least one layer")
        for layer in layers:
            if layer.channel.n_qubits != self.n_qubits:
                raise InvalidArgument(
                    f"layer {layer.name!r} acts on {layer.channel.n_qubits} qubits, "
                    f"register has {self.n_qubits}"
                )
        object.__setattr__(self, "layers", layers)

    @classmethod
    def from_channels(cls, channels, names=None) -> LayeredCircuit:
        channels = list(channels)
        if not channels:
            raise InvalidArgument("circuit needs at least one layer")
        if names is None:
            names = [f"layer{i + 1}" for i in range(len(channels))]
        return cls(channels[0].n_qubits, tuple(CircuitLayer(nm, ch) for nm, ch in zip(names, channels)))

    def __len__(self):
        return len(self.layers)


def tensor_layer(parts) -> PauliErrorChannel:
    """Independent errors on disjoint registers; the first part is most significant."""
    parts = list(parts)
    if not parts:
        raise InvalidArgument("tensor_layer needs at least one part")
    probs = np.ones(1)
    for p in parts:
        probs = np.kron(probs, p.probs)
    return PauliErrorChannel(sum(p.n_qubits for p in parts), probs)


def _spectra(circuit: LayeredCircuit) -> np.ndarray:
    return kernels.fwht(np.stack([layer.channel.probs for layer in circuit.layers]))


def _from_spectrum(spec: np.ndarray, n: int) -> PauliErrorChannel:
    probs = kernels.fwht(spec) / spec.size
    return PauliErrorChannel(n, np.where(np.abs(probs) < 1e-15, 0.0, probs))


def accumulate(circuit: LayeredCircuit, method: str = "transform") -> PauliErrorChannel:
    """Accumulated Pauli channel after all layers.

    ``method="transform"`` multiplies Walsh-Hadamard spectra (``O(L n 4**n)``);
    ``method="direct"`` convolves layer by layer (``O(L 16**n)``). Both use a
    fixed reduction order and agree to rounding error.
    """
    if not isinstance(circuit, LayeredCircuit):
        raise InvalidArgument("expected a LayeredCircuit")
    if method == "transform":
        spec = np.prod(_spectra(circuit), axis=0)
        return _from_spectrum(spec, circuit.n_qubits)
    if method == "direct":
        acc = circuit.layers[0].channel.probs
        for layer in circuit.layers[1:]:
            acc = kernels.xor_convolve(acc, layer.channel.probs)
        return PauliErrorChannel(circuit.n_qubits, acc)
    raise InvalidArgument(f"unknown method {method!r}")


def per_step_trace(circuit: LayeredCircuit) -> list[tuple[str, float]]:
    """Perfection rate after each prefix of the circuit."""
    spectra = _spectra(circuit)
    cum = np.cumprod(spectra, axis=0)
    n4 = cum.shape[1]
    # P_I of a prefix is the mean of its spectrum (inverse transform at label 0).
    return [
        (layer.name, float(np.sum(row) / n4)) for layer, row in zip(circuit.layers, cum)
    ]


def accumulated_error(circuit: LayeredCircuit, pauli: str) -> float:
    """Accumulated probability of a single Pauli label."""
    if len(pauli) != circuit.n_qubits:
        raise InvalidArgument(
            f"label {pauli!r} has length {len(pauli)}, register has {circuit.n_qubits} qubits"
        )
    return accumulate(circuit)[pauli]


def dominated_term(circuit: LayeredCircuit) -> float:
    """Sum over labels of the product of every layer's probability of that label.

    This counts only the label tuples in which all layers carry the same
    Pauli. It is a lower bound on the accumulated perfection rate and equals
    it for one or two layers.
    """
    probs = np.stack([layer.channel.probs for layer in circuit.layers])
    return float(np.sum(np.prod(probs, axis=0)))


def label_product(a: str, b: str) -> str:
    """Phase-free product of two Pauli strings."""
    if len(a) != len(b):
        raise InvalidArgument("labels differ in length")
    return "".join("IXYZ"[pauli_index(x) ^ pauli_index(y)] for x, y in zip(a, b))
