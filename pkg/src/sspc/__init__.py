"""Pauli-channel error analysis and single-step parity-check gate design."""
__version__ = "0.1.0"

from .channels import ChannelRep, avg_gate_fidelity, convert, process_fidelity
from .circuit import (
    CircuitLayer,
    LayeredCircuit,
    accumulate,
    per_step_trace,
    tensor_layer,
)
from .errors import (
    ImpossibleOutcome,
    InvalidArgument,
    NoSolution,
    NotCompletelyPositive,
    PhysicalityError,
    SSPCError,
    VerificationFailure,
)
from .pauli import PauliErrorChannel, project_to_pauli_channel
from .pipeline import analyze

__all__ = [
    "ChannelRep",
    "CircuitLayer",
    "ImpossibleOutcome",
    "InvalidArgument",
    "LayeredCircuit",
    "NoSolution",
    "NotCompletelyPositive",
    "PauliErrorChannel",
    "PhysicalityError",
    "SSPCError",
    "VerificationFailure",
    "accumulate",
    "analyze",
    "avg_gate_fidelity",
    "convert",
    "per_step_trace",
    "process_fidelity",
    "project_to_pauli_channel",
    "tensor_layer",
]
