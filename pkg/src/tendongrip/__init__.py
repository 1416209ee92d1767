"""Simulation and analysis of a four-finger, two-mode, tendon-driven hand."""

from .errors import (
    ConfigParseError,
    DomainError,
    GripperError,
    ModeError,
    NoMeetError,
    OverpressureError,
    RangeError,
    SimulationError,
    SingularityError,
    ValidationError,
)
from .types import (
    ROLES,
    FingerDesign,
    FingerRole,
    FingerType,
    GraspMode,
    HandConfig,
    JointState,
    LockState,
    default_hand,
    load_hand,
)

__version__ = "0.1.0"

__all__ = [
    "ROLES",
    "ConfigParseError",
    "DomainError",
    "FingerDesign",
    "FingerRole",
    "FingerType",
    "GraspMode",
    "GripperError",
    "HandConfig",
    "JointState",
    "LockState",
    "ModeError",
    "NoMeetError",
    "OverpressureError",
    "RangeError",
    "SimulationError",
    "SingularityError",
    "ValidationError",
    "default_hand",
    "load_hand",
]
