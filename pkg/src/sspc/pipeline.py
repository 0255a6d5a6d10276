"""Error analysis of one gate: ideal and measured PTMs in, Pauli error channel out."""
from __future__ import annotations

from dataclasses import dataclass

from .channels import (
    ChannelRep,
    action_distance,
    check_tp,
    convert,
    is_completely_positive,
)
from .errors import NotCompletelyPositive
from .pauli import ProjectionResult, full_gst_matrix, project

CP_HINT = "check the tomography output for the experimental gate"


@dataclass
class AnalysisResult:
    error_ptm: ChannelRep
    min_choi_eigenvalue: float
    tp_residual: float
    kraus: ChannelRep
    action_distance: float
    projection: ProjectionResult

    @property
    def channel(self):
        return self.projection.channel

    @property
    def perfection(self) -> float:
        return self.projection.channel.perfection

    def to_dict(self) -> dict:
        return {
            "error_ptm": self.error_ptm.payload,
            "completely_positive": True,
            "min_choi_eigenvalue": self.min_choi_eigenvalue,
            "trace_preserving": True,
            "tp_residual": self.tp_residual,
            "kraus_count": len(self.kraus.payload),
            "kraus_action_distance": self.action_distance,
            "pauli_channel": self.channel.as_dict(),
            "p_i": self.perfection,
            "offdiag_chi_mass": self.projection.offdiag_mass,
        }


def analyze(ideal: ChannelRep, experimental: ChannelRep, tp_tol: float = 1e-6) -> AnalysisResult:
    """Strip the ideal gate from a measured PTM and project the remaining error.

    Raises ``NotCompletelyPositive`` when the error channel's Choi matrix has
    an eigenvalue below ``-1e-8``.
    """
    error = full_gst_matrix(ideal, experimental)
    ok, lam = is_completely_positive(error)
    if not ok:
        raise NotCompletelyPositive(
            f"error channel is not completely positive (Choi eigenvalue {lam:.3e}); {CP_HINT}"
        )
    kraus = convert(error, "kraus")
    _, residual = check_tp(kraus, tp_tol)
    projection = project(kraus, tp_tol=tp_tol)
    return AnalysisResult(
        error_ptm=error,
        min_choi_eigenvalue=lam,
        tp_residual=residual,
        kraus=kraus,
        action_distance=action_distance(kraus, error),
        projection=projection,
    )
