"""Motion groups of the fingers and the finger-locking logic.

Only one-parameter rotation subgroups and the identity occur here, so a
subgroup is stored as a point on its axis plus a unit direction. Two such
subgroups are equal exactly when their axes are the same spatial line;
otherwise their intersection is the identity displacement.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ModeError, ValidationError
from .geometry import finger_frame, finger_points, locked_q2
from .types import ROLES, FingerRole, HandConfig, JointState

ANGLE_TOL = 1e-9  # rad
DIST_TOL = 1e-9  # mm


class DegenerateLockWarning(UserWarning):
    """Distal axes of a combined finger coincide, so the lock does not stiffen it."""


@dataclass(frozen=True)
class RotationSubgroup:
    """Rotations about the line through ``point`` along ``axis``."""

    point: Tuple[float, float, float]
    axis: Tuple[float, float, float]

    def __init__(self, point, axis):
        a = np.asarray(axis, dtype=float)
        n = float(np.linalg.norm(a))
        if a.shape != (3,) or not n > 0 or not math.isfinite(n):
            raise ValidationError(f"rotation axis must be a non-zero 3-vector, got {axis!r}")
        p = np.asarray(point, dtype=float)
        if p.shape != (3,):
            raise ValidationError("rotation point must be a 3-vector")
        object.__setattr__(self, "point", tuple(map(float, p)))
        object.__setattr__(self, "axis", tuple(map(float, a / n)))

    def same_line(self, other: "RotationSubgroup", angle_tol=ANGLE_TOL, dist_tol=DIST_TOL) -> bool:
        a, b = np.array(self.axis), np.array(other.axis)
        # antiparallel axes describe the same rotation group
        if float(np.linalg.norm(np.cross(a, b))) > math.sin(angle_tol):
            return False
        d = np.array(other.point) - np.array(self.point)
        return float(np.linalg.norm(np.cross(d, a))) <= dist_tol

    def to_dict(self) -> dict:
        return {"point": list(self.point), "axis": list(self.axis)}


@dataclass(frozen=True)
class MotionGroup:
    """Ordered product of rotation subgroups; no factors is the identity group {I}."""

    factors: Tuple[RotationSubgroup, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) > 2:
            raise ValidationError("two-joint fingers give at most two factors")

    @property
    def is_identity(self) -> bool:
        return not self.factors

    @property
    def dof(self) -> int:
        return len(self.factors)

    def to_dict(self) -> dict:
        return {
            "identity": self.is_identity,
            "dof": self.dof,
            "factors": [f.to_dict() for f in self.factors],
        }


IDENTITY = MotionGroup(())


def intersect_rotation_subgroups(g: RotationSubgroup, h: RotationSubgroup) -> MotionGroup:
    if g.same_line(h):
        return MotionGroup((g,))
    return IDENTITY


def finger_motion_group(hand: HandConfig, finger: FingerRole, state: Optional[JointState] = None) -> MotionGroup:
    """Proximal then distal rotation subgroup, located at ``state`` (rest by default)."""
    finger = FingerRole(finger)
    if state is None:
        state = hand.finger(finger).rest_state
    frame = finger_frame(hand, finger)
    pts = finger_points(hand, finger, state)
    return MotionGroup((RotationSubgroup(pts[0], frame.t), RotationSubgroup(pts[1], frame.t)))


def combined_finger_group(hand: HandConfig, pair_a: FingerRole, pair_b: FingerRole,
                          state: Optional[JointState] = None) -> MotionGroup:
    """Motion group of two locked fingers, the intersection of their groups.

    When the proximal axes coincide the intersection reduces to the proximal
    factor times the intersection of the distal factors.
    """
    if not hand.locked or abs(hand.palm_rotation - hand.phi_max) > 1e-6:
        raise ModeError("cannot combine unlocked fingers")
    pair_a, pair_b = FingerRole(pair_a), FingerRole(pair_b)
    if pair_a.partner != pair_b:
        raise ModeError(f"{pair_a.value} and {pair_b.value} do not form a combined finger")
    ga = finger_motion_group(hand, pair_a, state)
    gb = finger_motion_group(hand, pair_b, state)
    proximal = intersect_rotation_subgroups(ga.factors[0], gb.factors[0])
    if proximal.is_identity:
        return IDENTITY
    distal = intersect_rotation_subgroups(ga.factors[1], gb.factors[1])
    if not distal.is_identity:
        warnings.warn(
            f"distal axes of {pair_a.value} and {pair_b.value} coincide; the lock leaves two joints free",
            DegenerateLockWarning,
            stacklevel=2,
        )
    return MotionGroup(proximal.factors + distal.factors)


def lock_feasible(hand: HandConfig, states: Optional[Sequence[JointState]] = None, tol: float = 1e-6) -> bool:
    """Whether the palm is at its limit and each side-by-side pair has matching links.

    ``states`` are ordered as :data:`ROLES`; all fingers at rest by default.
    """
    if abs(hand.palm_rotation - hand.phi_max) > 1e-6:
        return False
    if states is None:
        states = [hand.finger(r).rest_state for r in ROLES]
    by_role = dict(zip(ROLES, states))
    for role in (FingerRole.A_LEFT, FingerRole.A_RIGHT):
        a, b = by_role[role], by_role[role.partner]
        if abs(a.q1 - b.q1) > tol or abs(a.q2 - b.q2) > tol:
            return False
    return True


def project_locked_state(hand: HandConfig, finger: FingerRole, state: JointState) -> JointState:
    """Project a requested state onto what a locked finger can reach.

    The distal joint stays at its locking angle, up to ``lock_compliance``.
    """
    q2l = locked_q2(hand, finger)
    q2 = min(max(state.q2, q2l), q2l + hand.lock_compliance)
    return JointState(state.q1, q2)


def hand_motion_summary(hand: HandConfig) -> dict:
    """Motion groups of every finger, plus the combined fingers when locked."""
    out = {
        "palm_rotation": hand.palm_rotation,
        "phi_max": hand.phi_max,
        "lock_state": hand.lock_state.value,
        "lock_feasible": lock_feasible(hand),
        "fingers": {r.value: finger_motion_group(hand, r).to_dict() for r in ROLES},
    }
    if hand.locked:
        out["combined"] = {
            f"{r.value}+{r.partner.value}": combined_finger_group(hand, r, r.partner).to_dict()
            for r in (FingerRole.A_LEFT, FingerRole.A_RIGHT)
        }
    return out
