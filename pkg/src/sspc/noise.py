"""Parametric Pauli noise, fidelity calibration and decomposed-vs-single-step comparison."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import (
    LayeredCircuit,
    accumulate,
    dominated_term,
    per_step_trace,
    tensor_layer,
)
from .errors import InvalidArgument, NoSolution
from .pauli import PauliErrorChannel

MODELS = ("phase_flip", "bit_flip", "depolarizing")
CALIBRATION_TOL = 1e-10

_SINGLE = {
    "phase_flip": lambda p: [1 - p, 0.0, 0.0, p],
    "bit_flip": lambda p: [1 - p, p, 0.0, 0.0],
    "depolarizing": lambda p: [1 - p, p / 3, p / 3, p / 3],
}


@dataclass(frozen=True)
class NoiseSpec:
    """``per_qubit`` applies the model independently to each qubit.

    Otherwise the register sees one correlated error with probability ``p``:
    ``Z...Z`` for phase flip, ``X...X`` for bit flip, and a uniform draw over
    the ``4**n - 1`` non-identity strings for depolarizing noise.
    """

    model: str
    p: float
    per_qubit: bool = True

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidArgument(f"unknown noise model {self.model!r}; expected one of {MODELS}")
        if not np.isfinite(self.p) or not 0.0 <= self.p <= 1.0:
            raise InvalidArgument(f"error rate must lie in [0, 1], got {self.p!r}")


def make_channel(spec: NoiseSpec, n_qubits: int) -> PauliErrorChannel:
    if n_qubits < 1:
        raise InvalidArgument("need at least one qubit")
    p = float(spec.p)
    if spec.per_qubit:
        single = PauliErrorChannel(1, _SINGLE[spec.model](p))
        return tensor_layer([single] * n_qubits)
    probs = np.zeros(4**n_qubits)
    probs[0] = 1 - p
    if spec.model == "depolarizing":
        probs[1:] = p / (4**n_qubits - 1)
    else:
        # all-Z is 333..3 in base 4, all-X is 111..1
        digit = 3 if spec.model == "phase_flip" else 1
        probs[digit * (4**n_qubits - 1) // 3] = p
    return PauliErrorChannel(n_qubits, probs)


def channel_avg_fidelity(channel: PauliErrorChannel) -> float:
    """Average gate fidelity of a Pauli channel against the identity.

    For Pauli channels the process fidelity is exactly the identity
    probability, so no transfer matrix is needed.
    """
    d = 2**channel.n_qubits
    return (d * channel.perfection + 1) / (d + 1)


def calibrate_p(
    target_fidelity: float, model: str, n_qubits: int, per_qubit: bool = True, tol: float = CALIBRATION_TOL
) -> float:
    """Error rate whose channel has the requested average gate fidelity (bisection)."""
    if not 0.0 < target_fidelity <= 1.0:
        raise InvalidArgument(f"target fidelity must lie in (0, 1], got {target_fidelity!r}")

    def fid(p):
        return channel_avg_fidelity(make_channel(NoiseSpec(model, p, per_qubit), n_qubits))

    grid = np.linspace(0.0, 1.0, 33)
    values = np.array([fid(p) for p in grid])
    if np.any(np.diff(values) > 1e-15):
        raise NoSolution(f"fidelity of {model} is not monotone in p; bisection is not valid")
    if target_fidelity >= values[0]:
        return 0.0
    if target_fidelity < values[-1]:
        raise NoSolution(
            f"fidelity {target_fidelity} is below the worst case {values[-1]:.6f} for {model}"
        )
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fid(mid) >= target_fidelity:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


DECOMPOSED_XX_LAYERS = ("HII", "CX01", "CX02", "HII")


@dataclass
class ComparisonReport:
    decomposed: PauliErrorChannel
    sspc: PauliErrorChannel
    decomposed_trace: list
    sspc_trace: list
    decomposed_dominated: float
    sspc_dominated: float
    decomposed_fidelity: float
    sspc_fidelity: float
    measurement_included: bool

    @property
    def decomposed_perfection(self) -> float:
        return self.decomposed.perfection

    @property
    def sspc_perfection(self) -> float:
        return self.sspc.perfection

    @property
    def ratio(self) -> float:
        """Single-step over decomposed perfection rate."""
        return self.sspc_perfection / self.decomposed_perfection

    def to_dict(self) -> dict:
        return {
            "decomposed": {
                "perfection": self.decomposed_perfection,
                "dominated_term": self.decomposed_dominated,
                "layer_avg_gate_fidelity": self.decomposed_fidelity,
                "trace": [[name, value] for name, value in self.decomposed_trace],
                "channel": self.decomposed.as_dict(cutoff=1e-15),
            },
            "sspc": {
                "perfection": self.sspc_perfection,
                "dominated_term": self.sspc_dominated,
                "layer_avg_gate_fidelity": self.sspc_fidelity,
                "trace": [[name, value] for name, value in self.sspc_trace],
                "channel": self.sspc.as_dict(cutoff=1e-15),
            },
            "ratio": self.ratio,
            "measurement_layer": self.measurement_included,
        }


def compare_decomposed_vs_sspc(
    decomposed_noise: NoiseSpec,
    sspc_noise: NoiseSpec,
    measurement_noise: NoiseSpec | None = None,
    n_qubits: int = 3,
) -> ComparisonReport:
    """Four noisy decomposed layers against one noisy single-step layer.

    ``measurement_noise`` appends the same readout layer to both circuits.
    """
    dec_layer = make_channel(decomposed_noise, n_qubits)
    sspc_layer = make_channel(sspc_noise, n_qubits)
    dec_channels = [dec_layer] * len(DECOMPOSED_XX_LAYERS)
    dec_names = list(DECOMPOSED_XX_LAYERS)
    sspc_channels, sspc_names = [sspc_layer], ["SSPC_XX"]
    if measurement_noise is not None:
        meas = make_channel(measurement_noise, n_qubits)
        dec_channels.append(meas)
        dec_names.append("measure")
        sspc_channels.append(meas)
        sspc_names.append("measure")
    dec = LayeredCircuit.from_channels(dec_channels, dec_names)
    single = LayeredCircuit.from_channels(sspc_channels, sspc_names)
    return ComparisonReport(
        decomposed=accumulate(dec),
        sspc=accumulate(single),
        decomposed_trace=per_step_trace(dec),
        sspc_trace=per_step_trace(single),
        decomposed_dominated=dominated_term(dec),
        sspc_dominated=dominated_term(single),
        decomposed_fidelity=channel_avg_fidelity(dec_layer),
        sspc_fidelity=channel_avg_fidelity(sspc_layer),
        measurement_included=measurement_noise is not None,
    )
