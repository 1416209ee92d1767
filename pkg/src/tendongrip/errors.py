"""Exception hierarchy shared by every module."""


class GripperError(Exception):
    """Base class for all errors raised by this package."""


class ConfigParseError(GripperError):
    """A hand or scenario file could not be parsed."""


class ValidationError(GripperError, ValueError):
    """A value violates a documented invariant."""


class DomainError(GripperError, ValueError):
    """An argument lies outside the domain of an operation (e.g. joint limits)."""


class SingularityError(GripperError, ArithmeticError):
    """A geometric quantity is undefined (degenerate triangle)."""


class RangeError(GripperError, ValueError):
    """A target tendon length is not achievable within the joint-limit box."""


class ModeError(GripperError):
    """The hand is in the wrong mode for the requested operation."""


class NoMeetError(GripperError):
    """Opposing fingertip trajectories never come into contact."""


class OverpressureError(GripperError):
    """Volume was injected while every muscle is blocked."""


class SimulationError(GripperError):
    """A grasp simulation failed to converge.

    ``trace`` carries the per-step diagnostics collected before the failure.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or []
