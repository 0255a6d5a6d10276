"""Exception types shared across the package."""


class SSPCError(Exception):
    """Base class for all package errors."""


class InvalidArgument(SSPCError, ValueError):
    pass


class PhysicalityError(SSPCError, ValueError):
    """Input is not a valid quantum object (e.g. non-unitary 'unitary')."""


class NotCompletelyPositive(PhysicalityError):
    pass


class ImpossibleOutcome(SSPCError):
    pass


class VerificationFailure(SSPCError):
    def __init__(self, message, witness=None, deviation=None):
        super().__init__(message)
        self.witness = witness
        self.deviation = deviation


class NoSolution(SSPCError):
    pass
