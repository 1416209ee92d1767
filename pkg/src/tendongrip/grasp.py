"""Quasi-static grasp closure against primitive objects.

Each step the pump injects a small volume. The muscles share it according to
their loads, and each muscle's contraction becomes the tendon retraction of
the two fingers it drives. A finger then settles at the least-energy state
on its new tendon contour that is free of the object and reachable from
where it was. A pair stops for good once either of its fingers cannot take
up more tendon.

In the power modes the object is held in place. In precision mode the four
fingers move as one and the object may slide along the hand's x axis, so a
finger that touches first pushes it towards the other.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .energy import (
    contour_span,
    elastic_energy,
    min_energy_on_arc,
    q2_on_contour,
    tendon_range,
    total_tendon_length,
)
from .errors import ConfigParseError, DomainError, OverpressureError, SimulationError, ValidationError
from .geometry import (
    FingerFrame,
    HandPose,
    configure_mode,
    default_table_height,
    finger_frame,
    link_points,
    locked_q2,
    precision_state,
    unhindered_state,
)
from .hydraulics import (
    DEFAULT_MUSCLE,
    HydraulicCircuit,
    MuscleParams,
    distribute_volume,
    settle_muscle,
    volume_for_contraction_step,
)
from .shapes import (
    Circle,
    ConvexPolygon,
    Cylinder,
    Object3D,
    Prism,
    Sphere,
    closest_points,
    object_from_dict,
    segment_clearance,
    slab_section,
)
from .types import ROLES, FingerRole, GraspMode, HandConfig, JointState, load_hand

CONTACT_TOL = 1e-4  # mm
ARC_SAMPLES = 129
CHORD_SLACK = 1.0  # mm of apparent overlap tolerated on a joint-space chord between two free states
MAX_PUSH = 10.0  # mm an object may slide in one step
LINKS = ("proximal", "distal")


class Classification(str, enum.Enum):
    MISS = "Miss"
    FINGERTIP_PINCH = "FingertipPinch"
    ENVELOPING = "Enveloping"
    CAGED = "Caged"


@dataclass(frozen=True)
class Contact:
    finger: FingerRole
    link: str
    point: Tuple[float, float, float]
    normal: Tuple[float, float, float]  # from the object towards the finger
    on_tip: bool = False  # touching the rounded end of the distal link

    def to_dict(self) -> dict:
        return {
            "finger": self.finger.value,
            "link": self.link,
            "on_tip": self.on_tip,
            "point": list(self.point),
            "normal": list(self.normal),
        }


@dataclass(frozen=True)
class GraspOutcome:
    classification: Classification
    contacts: Tuple[Contact, ...]
    final_states: Tuple[JointState, ...]
    mode: GraspMode
    object: Object3D
    retractions: Tuple[float, ...]
    trajectories: Dict[FingerRole, Tuple[Tuple[float, float, float], ...]]
    object_shifts: Tuple[float, ...]
    circuit: HydraulicCircuit
    steps: int
    terminated_by: str
    trapped: bool = False  # no straight escape route for the object (checked with >= 3 contacts)

    def to_dict(self) -> dict:
        return {
            "classification": self.classification.value,
            "mode": self.mode.value,
            "terminated_by": self.terminated_by,
            "trapped": self.trapped,
            "steps": self.steps,
            "contacts": [c.to_dict() for c in self.contacts],
            "final_states": {r.value: list(s.as_tuple()) for r, s in zip(ROLES, self.final_states)},
            "retractions": {r.value: x for r, x in zip(ROLES, self.retractions)},
            "object": self.object.to_dict(),
            "object_shift_x": self.object_shifts[-1] if self.object_shifts else 0.0,
            "pumped_volume_ml": self.circuit.pumped_volume,
            "trajectories": {r.value: [list(p) for p in pts] for r, pts in self.trajectories.items()},
        }


# --------------------------------------------------------------------------
# per-finger contact model


class FingerModel:
    """One finger's planar view of the object."""

    def __init__(self, hand: HandConfig, role: FingerRole, obj: Optional[Object3D]):
        self.role = role
        self.design = hand.finger(role)
        self.frame: FingerFrame = finger_frame(hand, role)
        self.radius = 0.5 * self.design.thickness
        self.half_width = 0.5 * self.design.width
        self.obj = obj
        self.section = None if obj is None else slab_section(obj, self.frame.base, self.frame.u, self.frame.t, self.half_width)

    def shifted_section(self, dx: float):
        """Section of the object slid by ``dx`` along the hand x axis."""
        if self.section is None or dx == 0.0:
            return self.section
        return self.section.translated(dx * float(self.frame.u[0]), 0.0)

    def link_clearances(self, q1, q2, section=None):
        section = self.section if section is None else section
        q1 = np.asarray(q1, dtype=float)
        if section is None:
            inf = np.full(q1.shape, np.inf)
            return inf, inf
        j2, tip = link_points(self.design, self.frame.tilt, q1, q2)
        base = np.zeros_like(j2)
        return (segment_clearance(base, j2, section, self.radius),
                segment_clearance(j2, tip, section, self.radius))

    def clearance(self, q1, q2, section=None):
        a, b = self.link_clearances(q1, q2, section)
        return np.minimum(a, b)

    def contacts(self, state: JointState, section=None, tol=CONTACT_TOL) -> List[Contact]:
        section = self.section if section is None else section
        if section is None:
            return []
        j2, tip = link_points(self.design, self.frame.tilt, state.q1, state.q2)
        segs = ((np.zeros(2), j2), (j2, tip))
        out = []
        for name, (a, b) in zip(LINKS, segs):
            c = float(segment_clearance(a, b, section, self.radius))
            if c > tol:
                continue
            p_link, p_obj = closest_points(a, b, section)
            ab = b - a
            t = float(np.dot(p_link - a, ab) / np.dot(ab, ab))
            n = p_link - p_obj
            nn = np.linalg.norm(n)
            n = n / nn if nn > 0 else np.zeros(2)
            world = self.frame.to_world(p_obj[0], p_obj[1])
            normal = n[0] * self.frame.u + n[1] * np.array([0.0, 0.0, 1.0])
            out.append(Contact(self.role, name, tuple(map(float, world)), tuple(map(float, normal)),
                               on_tip=name == "distal" and t >= 1.0 - 1e-9))
        return out


def _bisect_boundary(f, good: float, bad: float, iters: int = 48) -> float:
    """Last point on the ``good`` side of a sign change of ``f`` (f(good) >= 0)."""
    for _ in range(iters):
        mid = 0.5 * (good + bad)
        if f(mid) >= 0:
            good = mid
        else:
            bad = mid
    return good


def free_arcs(model: FingerModel, target: float, n: int = ARC_SAMPLES):
    """Object-free q1 intervals of the level set ``target``, with exact ends."""
    d = model.design
    a, b = contour_span(d, target)
    if b[0] - a[0] <= 1e-15:
        c = float(model.clearance(a[0], a[1]))
        return [(a[0], a[0])] if c >= 0 else []
    q1 = np.linspace(a[0], b[0], n)
    q1[0], q1[-1] = a[0], b[0]
    q2 = q2_on_contour(d, target, q1)
    q2[0], q2[-1] = a[1], b[1]
    ok = model.clearance(q1, q2) >= 0
    if ok.all():
        return [(a[0], b[0])]

    def f(x):
        return float(model.clearance(x, float(q2_on_contour(d, target, x))))

    arcs = []
    i = 0
    while i < n:
        if not ok[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and ok[j + 1]:
            j += 1
        lo = q1[i] if i == 0 else _bisect_boundary(f, q1[i], q1[i - 1])
        hi = q1[j] if j == n - 1 else _bisect_boundary(f, q1[j], q1[j + 1])
        arcs.append((float(lo), float(hi)))
        i = j + 1
    return arcs


def _chord_clear(model: FingerModel, s0: JointState, s1: JointState, n: int = 17) -> bool:
    t = np.linspace(0.0, 1.0, n)
    q1 = s0.q1 + t * (s1.q1 - s0.q1)
    q2 = s0.q2 + t * (s1.q2 - s0.q2)
    return bool(np.all(model.clearance(q1, q2) >= -CHORD_SLACK))


def advance_finger(model: FingerModel, retraction: float, prev: JointState) -> Optional[JointState]:
    """Least-energy reachable free state after ``retraction`` mm, or None if blocked."""
    d = model.design
    lmin, lmax = tendon_range(d)
    target = lmax - retraction
    if target < lmin - 1e-12:
        return None
    target = max(target, lmin)
    if model.section is None:
        return unhindered_state(d, retraction)
    arcs = free_arcs(model, target)
    if not arcs:
        return None

    def nearest(arc):
        lo, hi = arc
        xs = np.linspace(lo, hi, 33) if hi > lo else np.array([lo])
        ys = q2_on_contour(d, target, xs)
        dist = np.hypot(xs - prev.q1, ys - prev.q2)
        k = int(np.argmin(dist))
        return float(dist[k]), JointState(float(xs[k]), float(ys[k]))

    scored = [(nearest(arc), arc) for arc in arcs]
    (dist, near), arc = min(scored, key=lambda x: x[0][0])
    if not _chord_clear(model, prev, near):
        return None
    lo, hi = arc
    if hi - lo <= 1e-13:
        return JointState(lo, float(q2_on_contour(d, target, lo)))
    state, _ = min_energy_on_arc(d, target, (lo, hi))
    if float(model.clearance(state.q1, state.q2)) < 0:
        # a sliver inside the arc; fall back to the nearer end
        ends = [JointState(x, float(q2_on_contour(d, target, x))) for x in (lo, hi)]
        state = min(ends, key=lambda s: elastic_energy(d, s))
    return state


# --------------------------------------------------------------------------
# closure


def _retraction_of(design, state: JointState) -> float:
    _, lmax = tendon_range(design)
    return float(lmax - total_tendon_length(design, state.q1, state.q2))


def _check_no_penetration(models, states, sections=None):
    for i, (m, s) in enumerate(zip(models, states)):
        sec = None if sections is None else sections[i]
        if float(m.clearance(s.q1, s.q2, sec)) < -1e-6:
            raise ValidationError(f"object penetrates finger {m.role.value} in the initial pose")


def close_grasp(pose: HandPose, obj: Object3D, mode, step: float = 0.1, max_steps: int = 5000,
                muscle: MuscleParams = DEFAULT_MUSCLE) -> GraspOutcome:
    """Close the hand on ``obj`` until no finger can move; classify the result.

    ``step`` bounds the tendon retraction of any muscle per iteration, mm.
    """
    if not step > 0:
        raise DomainError(f"step must be positive, got {step}")
    mode = GraspMode.parse(mode)
    hand = configure_mode(pose.hand, mode)
    pose = HandPose(hand, pose.joint_states, pose.z_table, pose.placement)
    if mode is GraspMode.PRECISION:
        return _close_precision(hand, pose, obj, step, max_steps, muscle)
    return _close_power(hand, pose, obj, mode, step, max_steps, muscle)


def _close_power(hand, pose, obj, mode, step, max_steps, muscle) -> GraspOutcome:
    models = [FingerModel(hand, r, obj) for r in ROLES]
    states = list(pose.joint_states)
    _check_no_penetration(models, states)
    retr = [_retraction_of(m.design, s) for m, s in zip(models, states)]
    pairs = [[ROLES.index(r) for r in hand.muscle_pairing[k]] for k in range(2)]
    traj = {r: [(retr[i], *states[i].as_tuple())] for i, r in enumerate(ROLES)}
    circuit = HydraulicCircuit.at_rest(muscle)
    # the muscles start at the pairs' current retraction
    for k, idx in enumerate(pairs):
        r0 = max(retr[i] for i in idx)
        if r0 > 0:
            circuit = distribute_volume(circuit, [math.inf if j != k else 0.0 for j in range(2)],
                                        volume_for_contraction_step(circuit, k, r0))
    blocked = [False, False]
    loads = [0.0, 0.0]
    terminated = "blocked"
    steps = 0
    trace = []
    while not all(blocked):
        if steps >= max_steps:
            raise SimulationError(f"no convergence after {max_steps} steps", trace)
        steps += 1
        free = [k for k in range(2) if not blocked[k]]
        dv = min(volume_for_contraction_step(circuit, k, step) for k in free)
        eff = [math.inf if blocked[k] else loads[k] for k in range(2)]
        try:
            circuit = distribute_volume(circuit, eff, dv)
        except OverpressureError:
            terminated = "overpressure"
            break
        for k in free:
            idx = pairs[k]
            r_old = max(retr[i] for i in idx)
            r_new = circuit.muscles[k].contraction
            if r_new <= r_old:
                continue
            new = [advance_finger(models[i], r_new, states[i]) for i in idx]
            if any(s is None for s in new):
                r_ok, new = _bisect_pair(models, idx, states, r_old, r_new)
                circuit = settle_muscle(circuit, k, r_ok)
                blocked[k] = True
                r_new = r_ok
            e_old = sum(elastic_energy(models[i].design, states[i]) for i in idx)
            for i, s in zip(idx, new):
                states[i] = s
                retr[i] = r_new
                traj[ROLES[i]].append((r_new, s.q1, s.q2))
            e_new = sum(elastic_energy(models[i].design, states[i]) for i in idx)
            if r_new > r_old:
                loads[k] = max((e_new - e_old) / (r_new - r_old), 0.0)
        trace.append({"step": steps, "pressure": circuit.shared_pressure, "retraction": list(retr)})
    contacts = [c for m, s in zip(models, states) for c in m.contacts(s)]
    trapped = len(contacts) >= 3 and escape_blocked(obj, states, hand)
    cls = classify_outcome(contacts, states, obj, trapped=trapped)
    return GraspOutcome(
        classification=cls,
        contacts=tuple(contacts),
        final_states=tuple(states),
        mode=mode,
        object=obj,
        retractions=tuple(retr),
        trajectories={r: tuple(v) for r, v in traj.items()},
        object_shifts=(),
        circuit=circuit,
        steps=steps,
        terminated_by=terminated,
        trapped=trapped,
    )


def _bisect_pair(models, idx, states, r_old, r_new, iters: int = 30):
    """Largest retraction in [r_old, r_new] both fingers of a pair can reach."""
    good, good_states = r_old, [states[i] for i in idx]
    bad = r_new
    for _ in range(iters):
        mid = 0.5 * (good + bad)
        trial = [advance_finger(models[i], mid, states[i]) for i in idx]
        if any(s is None for s in trial):
            bad = mid
        else:
            good, good_states = mid, trial
    return good, good_states


def _precision_pose(hand, r):
    return [precision_state(hand.finger(role), r, locked_q2(hand, role)) for role in ROLES]


def _nearest_shift(models, states, s0: float) -> Optional[float]:
    """Object slide closest to ``s0`` that clears every finger, or None if pinched.

    Each finger can only push the object towards the hand's centre line, so
    the fingers that overlap it at ``s0`` fix the direction of the slide.
    """

    def clear(i, s):
        m, st = models[i], states[i]
        return float(m.clearance(st.q1, st.q2, m.shifted_section(s)))

    n = len(models)
    bad = [i for i in range(n) if clear(i, s0) < 0]
    if not bad:
        return s0
    dirs = {-math.copysign(1.0, float(models[i].frame.u[0])) for i in bad}
    if len(dirs) > 1:
        return None
    d = dirs.pop()
    pushers = [i for i in range(n) if -math.copysign(1.0, float(models[i].frame.u[0])) == d]

    def g(s):
        return min(clear(i, s) for i in pushers)

    far = s0 + d * MAX_PUSH
    if g(far) < 0:
        return None
    s = _bisect_boundary(g, far, s0, iters=60)
    if min(clear(i, s) for i in range(n)) < 0:
        return None
    return s


def _close_precision(hand, pose, obj, step, max_steps, muscle) -> GraspOutcome:
    models = [FingerModel(hand, r, obj) for r in ROLES]
    if obj is not None and any(abs(m.frame.u[1]) > 1e-12 for m in models):
        raise ValidationError("precision closure needs flexion planes parallel to the x-z plane")
    states = list(pose.joint_states)
    _check_no_penetration(models, states)
    r = max(_retraction_of(m.design, s) for m, s in zip(models, states))
    q2l = [locked_q2(hand, role) for role in ROLES]
    full = min(total_tendon_length(m.design, m.design.joint_limits[0][0], q) -
               total_tendon_length(m.design, m.design.joint_limits[0][1], q)
               for m, q in zip(models, q2l))
    shift = 0.0
    shifts = [shift]
    traj = {role: [(r, *states[i].as_tuple())] for i, role in enumerate(ROLES)}
    circuit = HydraulicCircuit.at_rest(muscle)
    steps = 0
    trace = []
    terminated = "blocked"
    while True:
        if steps >= max_steps:
            raise SimulationError(f"no convergence after {max_steps} steps", trace)
        if r >= full:
            terminated = "joint_limit"
            break
        steps += 1
        r_new = min(r + step, full)
        # both muscles see the same load and move together
        dv = volume_for_contraction_step(circuit, 0, r_new - r) + volume_for_contraction_step(circuit, 1, r_new - r)
        trial_states = _precision_pose(hand, r_new)
        s_new = _nearest_shift(models, trial_states, shift)
        if s_new is None:
            good, bad = r, r_new
            good_states, good_shift = states, shift
            for _ in range(30):
                mid = 0.5 * (good + bad)
                st = _precision_pose(hand, mid)
                sm = _nearest_shift(models, st, good_shift)
                if sm is None:
                    bad = mid
                else:
                    good, good_states, good_shift = mid, st, sm
            dv = volume_for_contraction_step(circuit, 0, good - r) + volume_for_contraction_step(circuit, 1, good - r)
            r_new, trial_states, s_new = good, good_states, good_shift
        if dv > 0:
            circuit = distribute_volume(circuit, (0.0, 0.0), dv)
        blocked = r_new < min(r + step, full)
        r, states, shift = r_new, list(trial_states), s_new
        shifts.append(shift)
        for i, role in enumerate(ROLES):
            traj[role].append((r, states[i].q1, states[i].q2))
        trace.append({"step": steps, "retraction": r, "shift": shift})
        if blocked:
            break
    sections = [m.shifted_section(shift) for m in models]
    contacts = [c for m, s, sec in zip(models, states, sections) for c in m.contacts(s, sec)]
    moved = _translate(obj, shift)
    trapped = len(contacts) >= 3 and escape_blocked(moved, states, hand)
    cls = classify_outcome(contacts, states, moved, trapped=trapped)
    return GraspOutcome(
        classification=cls,
        contacts=tuple(contacts),
        final_states=tuple(states),
        mode=GraspMode.PRECISION,
        object=moved,
        retractions=tuple([r] * 4),
        trajectories={k: tuple(v) for k, v in traj.items()},
        object_shifts=tuple(shifts),
        circuit=circuit,
        steps=steps,
        terminated_by=terminated,
        trapped=trapped,
    )


def _translate(obj, dx: float):
    if dx == 0.0:
        return obj
    return obj.translated((dx, 0.0, 0.0))


# --------------------------------------------------------------------------
# classification


def _fibonacci_directions(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    phi = np.arccos(1 - 2 * i / n)
    theta = np.pi * (1 + 5**0.5) * i
    return np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], axis=1)


PALM_HEIGHT = 1e4  # mm, the hand body above the palm face, effectively unbounded


def hits_palm(obj: Object3D, palm_radius: float, tol: float = 1e-6) -> bool:
    """Whether the object overlaps the palm: the solid disc ``r <= palm_radius``, ``z >= 0``.

    Cylinders are tested through their prism vertices and edge midpoints.
    """
    if isinstance(obj, Sphere):
        x, y, z = obj.center
        gap = math.hypot(max(math.hypot(x, y) - palm_radius, 0.0), max(-z, 0.0))
        inside = math.hypot(x, y) <= palm_radius and z >= 0
        return inside or gap < obj.radius - tol
    if isinstance(obj, Prism):
        rect = ConvexPolygon.rectangle(-palm_radius, 0.0, palm_radius, PALM_HEIGHT)
        prof = obj.profile
        if isinstance(prof, Circle):
            return float(segment_clearance(prof.center, prof.center, rect)) < prof.radius - tol
        v = prof.array
        return bool(np.min(segment_clearance(v, np.roll(v, -1, axis=0), rect)) < -tol)
    v = obj.vertices()
    e = obj.edges()
    pts = np.concatenate([v, 0.5 * (v[e[:, 0]] + v[e[:, 1]])])
    r = np.hypot(pts[:, 0], pts[:, 1])
    return bool(np.any((r < palm_radius - tol) & (pts[:, 2] > tol)))


def escape_blocked(obj: Object3D, final_states: Sequence[JointState], hand: HandConfig,
                   directions: int = 360, reach: float = 300.0, resolution: float = 1.0) -> bool:
    """True when every straight translation of the object hits a phalanx or the palm.

    The table is not an obstacle: it drops away once the object is lifted.
    Planar objects are scanned over ``directions`` directions in the x-z
    plane, 3D objects over a Fibonacci sphere of ``directions`` points.
    """
    if isinstance(obj, Prism):
        ang = 2 * np.pi * np.arange(directions) / directions
        dirs = np.stack([np.cos(ang), np.zeros_like(ang), np.sin(ang)], axis=1)
    else:
        dirs = _fibonacci_directions(directions)
    ts = np.arange(resolution, reach + resolution, resolution)
    roles_states = list(zip(ROLES, final_states))
    palm_radius = 0.5 * hand.palm_diameter
    for d in dirs:
        escaped = True
        for t in ts:
            moved = obj.translated(tuple(t * d))
            hit = hits_palm(moved, palm_radius)
            for role, st in roles_states:
                if hit:
                    break
                m = FingerModel(hand, role, moved)
                hit = m.section is not None and float(m.clearance(st.q1, st.q2)) < -1e-6
            if hit:
                escaped = False
                break
        if escaped:
            return False
    return True


def classify_outcome(contacts: Sequence[Contact], final_states: Sequence[JointState], obj: Object3D,
                     hand: Optional[HandConfig] = None, trapped: Optional[bool] = None) -> Classification:
    """Grasp class from the final contacts.

    Miss without contacts, and FingertipPinch when every contact is on a
    fingertip. With three or more contacts, the grasp is Caged when both
    proximal and distal phalanges touch and the object has no straight
    escape route. It is Enveloping when the contacts spread over at least
    two phalanges. Anything else, such as a two-pad pinch, counts as a
    FingertipPinch. The escape scan needs ``hand`` unless its result is
    passed as ``trapped``; with neither, nothing is Caged.
    """
    if not contacts:
        return Classification.MISS
    if all(c.on_tip for c in contacts):
        return Classification.FINGERTIP_PINCH
    phalanges = {(c.finger, c.link) for c in contacts}
    links = {c.link for c in contacts}
    if len(contacts) >= 3:
        if trapped is None and hand is not None and len(links) == 2:
            trapped = escape_blocked(obj, final_states, hand)
        if len(links) == 2 and trapped:
            return Classification.CAGED
        if len(phalanges) >= 2:
            return Classification.ENVELOPING
    return Classification.FINGERTIP_PINCH


# --------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class GraspScenario:
    hand: HandConfig
    mode: GraspMode
    object_spec: dict
    offset: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    step: float = 0.1

    def pose(self, mode: Optional[GraspMode] = None) -> HandPose:
        mode = self.mode if mode is None else GraspMode.parse(mode)
        hand = configure_mode(self.hand, mode)
        return HandPose(hand, tuple(hand.finger(r).rest_state for r in ROLES), default_table_height(hand, mode))

    def build_object(self, z_table: float) -> Object3D:
        """Place the object on the table under the palm, then apply the offsets."""
        spec = self.object_spec
        obj = object_from_dict(spec)
        dx, dy, dz = self.offset
        if isinstance(obj, Sphere):
            c = spec.get("center")
            center = (0.0, 0.0, z_table + obj.radius) if c is None else tuple(c)
            return Sphere((center[0] + dx, center[1] + dy, center[2] + dz), obj.radius)
        if isinstance(obj, Cylinder):
            c = spec.get("center")
            if c is None:
                lowest = obj.vertices()[:, 2].min() - obj.center[2]
                c = (0.0, 0.0, z_table - lowest)
            return Cylinder((c[0] + dx, c[1] + dy, c[2] + dz), obj.axis, obj.radius, obj.length, obj.sides)
        # planar profiles are given relative to the table point under the palm
        return obj.translated((dx, dy, z_table + dz))

    def run(self, mode: Optional[GraspMode] = None, step: Optional[float] = None) -> GraspOutcome:
        mode = self.mode if mode is None else GraspMode.parse(mode)
        pose = self.pose(mode)
        obj = self.build_object(pose.z_table)
        return close_grasp(pose, obj, mode, self.step if step is None else step)


def scenario_from_dict(d: dict, base_dir: Optional[Path] = None) -> GraspScenario:
    try:
        hand_ref = d.get("hand", "default")
        if isinstance(hand_ref, str) and hand_ref != "default" and base_dir is not None:
            p = Path(hand_ref)
            hand_ref = str(p if p.is_absolute() else base_dir / p)
        hand = load_hand(hand_ref) if isinstance(hand_ref, str) else None
        if hand is None:
            from .types import hand_from_dict

            hand = hand_from_dict(hand_ref)
        off = d.get("placement", {})
        offset = (float(off.get("dx", 0.0)), float(off.get("dy", 0.0)), float(off.get("dz", 0.0)))
        return GraspScenario(
            hand=hand,
            mode=GraspMode.parse(d.get("mode", "spherical")),
            object_spec=dict(d["object"]),
            offset=offset,
            step=float(d.get("step", 0.1)),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"bad grasp scenario: {exc}") from exc


def load_scenario(path) -> GraspScenario:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigParseError(f"cannot read scenario {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigParseError(f"scenario {path} must hold a JSON object")
    return scenario_from_dict(data, path.parent)
