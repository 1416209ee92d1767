"""Flexion-tendon and extension-cord kinematics of a single finger joint.

The tendon crosses joint ``j`` as the third side of a triangle whose other
two sides are the routing offsets on the adjacent links, enclosing the angle
``q0 - q``. The dorsal elastic cord has equal offsets on both links and no
angular offset, so its chord is ``2 d sin(q / 2)``; the sign is kept for
hyperextension (``q < 0``) so that the chord is differentiable through zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ._numerics import bisect_decreasing
from .errors import DomainError, SingularityError
from .types import FingerDesign, JointState, _joint_index

LIMIT_SLACK = 1e-12


def _check_in_limits(design: FingerDesign, joint: int, q):
    lo, hi = design.joint_limits[_joint_index(joint)]
    qa = np.asarray(q, dtype=float)
    if np.any(~np.isfinite(qa)) or np.any(qa < lo - LIMIT_SLACK) or np.any(qa > hi + LIMIT_SLACK):
        raise DomainError(f"joint {joint} angle {q} outside limits [{lo}, {hi}]")


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def chord_length(d_a, d_b, angle):
    """Cosine rule: third side of a triangle with sides ``d_a``, ``d_b`` and included ``angle``."""
    sq = d_a * d_a + d_b * d_b - 2.0 * d_a * d_b * np.cos(angle)
    return np.sqrt(np.maximum(sq, 0.0))


def tendon_length(design: FingerDesign, joint: int, q):
    """Retractable tendon length across ``joint`` at angle ``q`` (mm)."""
    _check_in_limits(design, joint, q)
    i = _joint_index(joint)
    d_prev, d_link = design.tendon_offsets[i]
    q0 = design.tendon_offset_angles[i]
    return _out(chord_length(d_link, d_prev, q0 - np.asarray(q, dtype=float)))


def cord_length(design: FingerDesign, joint: int, q):
    """Signed chord of the elastic cord across ``joint`` (mm), ``2 d sin(q/2)``."""
    _check_in_limits(design, joint, q)
    d = design.elastic_offsets[_joint_index(joint)]
    return _out(2.0 * d * np.sin(0.5 * np.asarray(q, dtype=float)))


def tendon_moment_arm(design: FingerDesign, joint: int, q):
    """Perpendicular distance from the joint axis to the tendon (mm).

    This is the altitude of the routing triangle,
    ``d_link * d_prev * sin(q0 - q) / L``, and equals ``|dL/dq|``.
    """
    _check_in_limits(design, joint, q)
    i = _joint_index(joint)
    d_prev, d_link = design.tendon_offsets[i]
    phi = design.tendon_offset_angles[i] - np.asarray(q, dtype=float)
    L = chord_length(d_link, d_prev, phi)
    if np.any(L <= 0):
        raise SingularityError(f"tendon triangle at joint {joint} is degenerate (L = 0)")
    return _out(d_link * d_prev * np.sin(phi) / L)


def tendon_moment_arm_equal_offsets(d: float, q0: float, q: float) -> float:
    """The printed equal-offset form ``d**2 sin(q0 - q) / L``."""
    L = float(chord_length(d, d, q0 - q))
    if L <= 0:
        raise SingularityError("tendon triangle is degenerate (L = 0)")
    return d * d * math.sin(q0 - q) / L


def tendon_angle(design: FingerDesign, joint: int, q) -> float:
    """Angle between the following-link offset and the tendon, from the sine rule (rad)."""
    _check_in_limits(design, joint, q)
    i = _joint_index(joint)
    d_prev, d_link = design.tendon_offsets[i]
    phi = design.tendon_offset_angles[i] - float(q)
    L = float(chord_length(d_link, d_prev, phi))
    if L <= 0:
        raise SingularityError(f"tendon triangle at joint {joint} is degenerate (L = 0)")
    s = min(1.0, d_prev * math.sin(phi) / L)
    alpha = math.asin(s)
    # obtuse branch when the far side is the longest
    if d_prev * d_prev > d_link * d_link + L * L:
        alpha = math.pi - alpha
    return alpha


def elastic_moment_arm(design: FingerDesign, joint: int, q):
    """Perpendicular distance from the joint axis to the elastic cord (mm).

    Closed form ``d cos(q/2)``; this is also the ``q -> 0`` limit of
    ``d**2 sin(q) / L_e``, which is 0/0 at rest.
    """
    _check_in_limits(design, joint, q)
    d = design.elastic_offsets[_joint_index(joint)]
    return _out(d * np.cos(0.5 * np.asarray(q, dtype=float)))


def elastic_moment_arm_ratio_form(d: float, q: float) -> float:
    """``d**2 sin(q) / L_e`` with the limit ``d`` at ``q = 0``."""
    L = 2.0 * d * math.sin(0.5 * q)
    if L == 0.0:
        return d
    return d * d * math.sin(q) / L


def joint_angle_for_tendon(design: FingerDesign, joint: int, length):
    """Inverse of :func:`tendon_length` on the joint range, by bisection.

    Lengths outside the achievable range clamp to the nearer joint limit.
    """
    lo, hi = design.joint_limits[_joint_index(joint)]

    def f(q):
        return tendon_length(design, joint, np.clip(q, lo, hi))

    return _out(bisect_decreasing(f, length, lo, hi))


@dataclass(frozen=True)
class CableState:
    """Tendon and cord geometry of both joints at one joint state."""

    retractable_tendon_length: Tuple[float, float]
    extendable_cord_length: Tuple[float, float]
    tendon_moment_arm: Tuple[float, float]
    elastic_moment_arm: Tuple[float, float]
    tendon_angle: Tuple[float, float]


def cable_state(design: FingerDesign, state: JointState) -> CableState:
    """All cable quantities at ``state``.

    ``extendable_cord_length`` here is the cord stretch relative to the
    unstretched pose, so it is non-negative over the joint box.
    """
    qs = state.as_tuple()
    zero = design.cord_zero_angles
    return CableState(
        retractable_tendon_length=tuple(tendon_length(design, j, qs[j - 1]) for j in (1, 2)),
        extendable_cord_length=tuple(
            cord_length(design, j, qs[j - 1]) - cord_length(design, j, zero[j - 1]) for j in (1, 2)
        ),
        tendon_moment_arm=tuple(tendon_moment_arm(design, j, qs[j - 1]) for j in (1, 2)),
        elastic_moment_arm=tuple(elastic_moment_arm(design, j, qs[j - 1]) for j in (1, 2)),
        tendon_angle=tuple(tendon_angle(design, j, qs[j - 1]) for j in (1, 2)),
    )
