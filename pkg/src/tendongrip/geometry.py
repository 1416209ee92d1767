"""Forward kinematics of the four-finger hand.

Hand frame: palm axis along +z, fingers hanging towards -z, palm plane at
z = 0. Each finger flexes in a vertical plane spanned by its outward
horizontal direction ``u`` and ``z``; the flexion axis is ``t = z x u``.
The plane is shifted sideways from the palm axis by the lateral offset, A
fingers to one side and B fingers to the other, so that at ``phi_max`` each
B finger lies flat against its A partner and the proximal axes coincide.

At ``phi = 0`` the B fingers are swung ``phi_max`` away from their partners,
giving the spherical layout.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import DomainError, NoMeetError, ValidationError
from .energy import min_energy_on_contour, tendon_range
from .types import (
    ROLES,
    FingerDesign,
    FingerRole,
    FingerType,
    GraspMode,
    HandConfig,
    JointState,
    LockState,
)

Z = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class FingerFrame:
    """Base frame of one finger in the hand frame."""

    base: np.ndarray
    u: np.ndarray  # outward horizontal direction in the flexion plane
    t: np.ndarray  # flexion axis, z x u
    tilt: float  # angle of the straight finger from -z towards +u, rad

    def to_world(self, a, b):
        """Map in-plane coordinates (along u, along z) to hand-frame points."""
        a = np.asarray(a, dtype=float)[..., None]
        b = np.asarray(b, dtype=float)[..., None]
        return self.base + a * self.u + b * Z

    def to_plane(self, p):
        """Project hand-frame points to (a, b, lateral) coordinates."""
        d = np.asarray(p, dtype=float) - self.base
        return d @ self.u, d @ Z, d @ self.t


def finger_azimuth(hand: HandConfig, role: FingerRole) -> float:
    role = FingerRole(role)
    psi = math.pi if role.side < 0 else 0.0
    if role.finger_type is FingerType.B:
        psi += hand.phi_max - hand.palm_rotation
    return psi


def finger_frame(hand: HandConfig, role: FingerRole) -> FingerFrame:
    role = FingerRole(role)
    psi = finger_azimuth(hand, role)
    u = np.array([math.cos(psi), math.sin(psi), 0.0])
    t = np.cross(Z, u)
    R = 0.5 * hand.palm_diameter
    e = hand.lateral_offset
    s = -e if role.finger_type is FingerType.A else e
    base = math.sqrt(R * R - e * e) * u + s * t
    design = hand.finger(role)
    tilt = hand.finger_rest_splay + design.joint_limits[0][0]
    return FingerFrame(base, u, t, tilt)


def link_points(design: FingerDesign, tilt: float, q1, q2):
    """In-plane (a, b) coordinates of the distal joint and the fingertip.

    Returns two arrays of shape ``(..., 2)``.
    """
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    th1 = tilt - q1
    th2 = th1 - q2
    j2 = np.stack([design.proximal_length * np.sin(th1), -design.proximal_length * np.cos(th1)], axis=-1)
    tip = j2 + np.stack([design.distal_length * np.sin(th2), -design.distal_length * np.cos(th2)], axis=-1)
    return j2, tip


def finger_points(hand: HandConfig, role: FingerRole, state: JointState):
    """Hand-frame base, distal joint and tip of one finger, shape (3, 3)."""
    frame = finger_frame(hand, role)
    j2, tip = link_points(hand.finger(role), frame.tilt, state.q1, state.q2)
    return np.stack([frame.base, frame.to_world(*j2), frame.to_world(*tip)])


# --------------------------------------------------------------------------
# poses

def locked_q2(hand: HandConfig, role: FingerRole) -> float:
    """Distal angle held by the lock: the rest angle of the distal joint."""
    return hand.finger(role).joint_limits[1][0]


@dataclass(frozen=True)
class HandPose:
    hand: HandConfig
    joint_states: Tuple[JointState, JointState, JointState, JointState]
    z_table: float = 0.0
    placement: Optional[np.ndarray] = None  # 4x4 homogeneous transform of the hand frame

    def __post_init__(self):
        object.__setattr__(self, "joint_states", tuple(self.joint_states))
        if len(self.joint_states) != 4:
            raise ValidationError("a pose needs one joint state per finger")
        for role, s in zip(ROLES, self.joint_states):
            d = self.hand.finger(role)
            for j, q in enumerate(s.as_tuple()):
                lo, hi = d.joint_limits[j]
                if not lo - 1e-12 <= q <= hi + 1e-12:
                    raise ValidationError(f"{role.value} q{j + 1}={q} outside [{lo}, {hi}]")
        if self.hand.locked:
            for role in (FingerRole.A_LEFT, FingerRole.A_RIGHT):
                a, b = self.state(role), self.state(role.partner)
                if abs(a.q1 - b.q1) > 1e-9:
                    raise ValidationError(f"locked pair {role.value} must share q1")
                for r, s in ((role, a), (role.partner, b)):
                    q2l = locked_q2(self.hand, r)
                    if not q2l - 1e-12 <= s.q2 <= q2l + self.hand.lock_compliance + 1e-12:
                        raise ValidationError(f"locked finger {r.value} must keep q2 at {q2l}")

    def state(self, role: FingerRole) -> JointState:
        return self.joint_states[ROLES.index(FingerRole(role))]

    @classmethod
    def at_rest(cls, hand: HandConfig, z_table: float | None = None) -> "HandPose":
        states = tuple(hand.finger(r).rest_state for r in ROLES)
        if z_table is None:
            z_table = default_table_height(hand)
        return cls(hand, states, z_table)

    def _place(self, pts):
        if self.placement is None:
            return pts
        T = np.asarray(self.placement, dtype=float)
        return pts @ T[:3, :3].T + T[:3, 3]


def fingertip_positions(pose: HandPose) -> np.ndarray:
    """Fingertip centre points, shape (4, 3), ordered as ``ROLES``."""
    tips = np.stack([finger_points(pose.hand, r, pose.state(r))[2] for r in ROLES])
    return pose._place(tips)


def sweep_palm(hand: HandConfig, phi: float) -> HandConfig:
    """Rotate the B-finger palm section to ``phi``.

    The lock survives only if the palm stays at ``phi_max``.
    """
    if not 0.0 <= phi <= hand.phi_max + 1e-12:
        raise DomainError(f"palm rotation {phi} outside [0, {hand.phi_max}]")
    phi = min(phi, hand.phi_max)
    lock = hand.lock_state if abs(phi - hand.phi_max) <= 1e-6 else LockState.UNLOCKED
    return hand.replace(palm_rotation=phi, lock_state=lock)


def configure_mode(hand: HandConfig, mode: GraspMode) -> HandConfig:
    """Palm angle and lock for a grasp mode.

    Spherical: palm at 0. Cylindrical: palm at ``phi_max``, unlocked.
    Precision: palm at ``phi_max``, locked.
    """
    mode = GraspMode.parse(mode)
    if mode is GraspMode.SPHERICAL:
        return hand.replace(palm_rotation=0.0, lock_state=LockState.UNLOCKED)
    lock = LockState.LOCKED if mode is GraspMode.PRECISION else LockState.UNLOCKED
    return hand.replace(palm_rotation=hand.phi_max, lock_state=lock)


# --------------------------------------------------------------------------
# closing sweeps

def _elastic_key(design: FingerDesign) -> FingerDesign:
    """The design with link dimensions normalised away; joint behaviour depends only on the rest."""
    return design.replace(finger_type=FingerType.A, proximal_length=1.0, distal_length=1.0,
                          width=1.0, thickness=1.0)


def _unhindered_path(design: FingerDesign, n: int):
    return _unhindered_path_cached(_elastic_key(design), n)


@functools.lru_cache(maxsize=64)
def _unhindered_path_cached(design: FingerDesign, n: int):
    lmin, lmax = tendon_range(design)
    r = np.linspace(0.0, lmax - lmin, n)
    states = np.array([min_energy_on_contour(design, lmax - x)[0].as_tuple() for x in r[:-1]]
                      + [design.max_flexion_state.as_tuple()])
    return r, states


def unhindered_state(design: FingerDesign, retraction: float) -> JointState:
    """Least-energy state of a free finger after ``retraction`` mm of tendon pull."""
    return _unhindered_state_cached(_elastic_key(design), float(retraction))


@functools.lru_cache(maxsize=4096)
def _unhindered_state_cached(design: FingerDesign, retraction: float) -> JointState:
    lmin, lmax = tendon_range(design)
    target = min(max(lmax - retraction, lmin), lmax)
    return min_energy_on_contour(design, target)[0]


def precision_state(design: FingerDesign, retraction: float, q2_lock: float) -> JointState:
    """Joint state of a locked finger: q2 pinned, q1 takes up all retraction."""
    from .energy import q1_on_contour, total_tendon_length

    lmax = total_tendon_length(design, design.joint_limits[0][0], q2_lock)
    q1 = float(q1_on_contour(design, lmax - retraction, q2_lock))
    return JointState(q1, q2_lock)


def closing_tip_heights(hand: HandConfig, mode: GraspMode, n: int = 401) -> np.ndarray:
    """Fingertip z over an unhindered closing sweep in ``mode`` (n samples per finger)."""
    hand = configure_mode(hand, mode)
    zs = []
    for role in ROLES:
        d = hand.finger(role)
        frame = finger_frame(hand, role)
        if hand.locked:
            q2l = locked_q2(hand, role)
            from .energy import total_tendon_length

            span = total_tendon_length(d, d.joint_limits[0][0], q2l) - total_tendon_length(d, d.joint_limits[0][1], q2l)
            states = np.array([precision_state(d, x, q2l).as_tuple() for x in np.linspace(0, span, n)])
        else:
            _, states = _unhindered_path(d, n)
        _, tip = link_points(d, frame.tilt, states[:, 0], states[:, 1])
        zs.append(tip[:, 1])
    return np.stack(zs)


def default_table_height(hand: HandConfig, mode: GraspMode | None = None) -> float:
    """Table plane for a hand lowered until its fingertips graze the table.

    The lowest fingertip centre reached during an unhindered close sits one
    finger half-thickness above the table.
    """
    if mode is None:
        mode = GraspMode.PRECISION if hand.locked else GraspMode.SPHERICAL
    zs = closing_tip_heights(hand, mode)
    radius = 0.5 * max(f.thickness for f in hand.fingers)
    return float(zs.min()) - radius


def _closing_pairs(hand: HandConfig):
    """Finger pairs that can close on each other.

    Side-by-side partners (parallel planes, same outward direction) never meet.
    """
    pairs = []
    for i, a in enumerate(ROLES):
        for b in ROLES[i + 1:]:
            fa, fb = finger_frame(hand, a), finger_frame(hand, b)
            if np.dot(fa.u, fb.u) > 1 - 1e-9:
                continue
            pairs.append((a, b))
    return pairs


def _tips_at(hand: HandConfig, retraction: float) -> Dict[FingerRole, np.ndarray]:
    out = {}
    for role in ROLES:
        d = hand.finger(role)
        s = unhindered_state(d, retraction)
        out[role] = finger_points(hand, role, s)[2]
    return out


def meeting_height(hand: HandConfig, mode: GraspMode, resolution: float = 0.01,
                   contact_distance: float | None = None) -> float:
    """Height above the table where closing fingertips first touch (mm).

    All fingers follow their unhindered least-energy closing path at a common
    tendon retraction, sampled every ``resolution`` mm of tendon; the first
    touching retraction is then refined by bisection. Tips touch when their
    centre lines are one finger thickness apart.
    """
    mode = GraspMode.parse(mode)
    if mode is GraspMode.PRECISION:
        raise DomainError("meeting height is defined for the power modes")
    hand = configure_mode(hand, mode)
    if contact_distance is None:
        contact_distance = max(f.thickness for f in hand.fingers)
    z_table = default_table_height(hand, mode)
    pairs = _closing_pairs(hand)
    spans = [tendon_range(hand.finger(r)) for r in ROLES]
    full = min(hi - lo for lo, hi in spans)
    n = int(math.ceil(full / resolution)) + 1
    rs = np.linspace(0.0, full, n)

    # tip tracks from cached dense paths, interpolated per finger
    tracks = {}
    for role in ROLES:
        d = hand.finger(role)
        frame = finger_frame(hand, role)
        r_path, states = _unhindered_path(d, 1201)
        q1 = np.interp(rs, r_path, states[:, 0])
        q2 = np.interp(rs, r_path, states[:, 1])
        _, tip = link_points(d, frame.tilt, q1, q2)
        tracks[role] = frame.to_world(tip[:, 0], tip[:, 1])

    def gap(tips, a, b):
        return np.linalg.norm(tips[a] - tips[b], axis=-1) - contact_distance

    first = None
    for a, b in pairs:
        g = gap(tracks, a, b)
        hit = np.flatnonzero(g <= 0)
        if len(hit):
            k = int(hit[0])
            if first is None or k < first[0]:
                first = (k, a, b)
    if first is None:
        raise NoMeetError(f"fingertips never meet in {mode.value} mode")
    k, a, b = first
    if k == 0:
        tips = _tips_at(hand, 0.0)
        return float(0.5 * (tips[a][2] + tips[b][2]) - z_table)

    # refine with exact least-energy states
    def exact_gap(r):
        tips = _tips_at(hand, r)
        return min(float(np.linalg.norm(tips[x] - tips[y]) - contact_distance) for x, y in pairs)

    lo, hi = rs[k - 1], rs[k]
    if exact_gap(lo) <= 0:
        lo = max(0.0, lo - 2 * resolution)
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if exact_gap(mid) <= 0:
            hi = mid
        else:
            lo = mid
    tips = _tips_at(hand, hi)
    best = min(pairs, key=lambda p: np.linalg.norm(tips[p[0]] - tips[p[1]]))
    return float(0.5 * (tips[best[0]][2] + tips[best[1]][2]) - z_table)


def fingertip_track(hand: HandConfig, mode: GraspMode, steps: int = 101):
    """Rows ``(retraction, role, x, y, z)`` of unhindered fingertip motion."""
    hand = configure_mode(hand, mode)
    spans = [tendon_range(hand.finger(r)) for r in ROLES]
    full = min(hi - lo for lo, hi in spans)
    rows = []
    for r in np.linspace(0.0, full, steps):
        if hand.locked:
            states = {role: precision_state(hand.finger(role), float(r), locked_q2(hand, role)) for role in ROLES}
            tips = {role: finger_points(hand, role, states[role])[2] for role in ROLES}
        else:
            tips = _tips_at(hand, float(r))
        for role in ROLES:
            rows.append((float(r), role.value, *map(float, tips[role])))
    return rows
