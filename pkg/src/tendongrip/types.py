"""Shared domain types, the default hand and hand-file IO.

All angles are radians internally. Lengths are millimetres, forces newtons,
spring constants N/mm, energies N*mm.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterator, Tuple

from .errors import ConfigParseError, ValidationError

Pair = Tuple[float, float]

SCHEMA_VERSION = 1


class FingerType(str, enum.Enum):
    A = "A"
    B = "B"


class FingerRole(str, enum.Enum):
    A_LEFT = "A_left"
    B_LEFT = "B_left"
    A_RIGHT = "A_right"
    B_RIGHT = "B_right"

    @property
    def finger_type(self) -> FingerType:
        return FingerType(self.value[0])

    @property
    def side(self) -> int:
        """-1 for the left pair, +1 for the right pair."""
        return -1 if self.value.endswith("left") else 1

    @property
    def partner(self) -> "FingerRole":
        """The laterally adjacent finger that forms a combined finger when locked."""
        return {
            FingerRole.A_LEFT: FingerRole.B_LEFT,
            FingerRole.B_LEFT: FingerRole.A_LEFT,
            FingerRole.A_RIGHT: FingerRole.B_RIGHT,
            FingerRole.B_RIGHT: FingerRole.A_RIGHT,
        }[self]


ROLES: Tuple[FingerRole, ...] = tuple(FingerRole)


class LockState(str, enum.Enum):
    UNLOCKED = "unlocked"
    LOCKED = "locked"


class GraspMode(str, enum.Enum):
    PRECISION = "precision"
    CYLINDRICAL = "cylindrical"
    SPHERICAL = "spherical"

    @classmethod
    def parse(cls, text) -> "GraspMode":
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).lower())
        except ValueError:
            raise ValidationError(f"unknown grasp mode {text!r}") from None


@dataclass(frozen=True)
class JointState:
    """Proximal (q1) and distal (q2) flexion angles of one finger, rad."""

    q1: float
    q2: float

    def as_tuple(self) -> Pair:
        return (self.q1, self.q2)

    def __iter__(self) -> Iterator[float]:
        return iter((self.q1, self.q2))


@dataclass(frozen=True)
class FingerDesign:
    """Geometric and elastic parameters of one two-joint finger.

    ``tendon_offsets[j]`` is ``(d_prev, d_link)``: the perpendicular offsets of
    the flexion-tendon routing points on the preceding and following link of
    joint ``j``. ``cord_rest_angles`` are the joint angles at which the dorsal
    elastic cord is unstretched; ``None`` means the rest pose (the lower joint
    limits), which is where the finger sits with a slack tendon.
    """

    finger_type: FingerType
    proximal_length: float
    distal_length: float
    width: float = 20.0
    thickness: float = 20.0
    tendon_offsets: Tuple[Pair, Pair] = ((4.0, 4.0), (4.0, 4.0))
    tendon_offset_angles: Pair = (2.4, 2.4)
    elastic_offsets: Pair = (5.0, 5.0)
    spring_constant: float = 0.1
    joint_limits: Tuple[Pair, Pair] = ((-math.pi / 6, math.pi / 3), (0.0, math.pi / 2))
    cord_rest_angles: Pair | None = None

    def __post_init__(self):
        object.__setattr__(self, "finger_type", FingerType(self.finger_type))
        object.__setattr__(
            self, "tendon_offsets", tuple(tuple(map(float, p)) for p in self.tendon_offsets)
        )
        object.__setattr__(self, "tendon_offset_angles", tuple(map(float, self.tendon_offset_angles)))
        object.__setattr__(self, "elastic_offsets", tuple(map(float, self.elastic_offsets)))
        object.__setattr__(
            self, "joint_limits", tuple(tuple(map(float, p)) for p in self.joint_limits)
        )
        if self.cord_rest_angles is not None:
            object.__setattr__(self, "cord_rest_angles", tuple(map(float, self.cord_rest_angles)))
        self._validate()

    def _validate(self):
        for name in ("proximal_length", "distal_length", "width", "thickness"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.spring_constant > 0:
            raise ValidationError(f"spring_constant must be > 0, got {self.spring_constant}")
        if len(self.tendon_offsets) != 2 or any(len(p) != 2 for p in self.tendon_offsets):
            raise ValidationError("tendon_offsets needs two (d_prev, d_link) pairs")
        if any(not d > 0 for p in self.tendon_offsets for d in p):
            raise ValidationError("tendon routing offsets must be > 0")
        if any(d < 0 for d in self.elastic_offsets):
            raise ValidationError("elastic cord offsets must be >= 0")
        for j, (lo, hi) in enumerate(self.joint_limits, start=1):
            if not lo < hi:
                raise ValidationError(f"joint {j} limits must satisfy lo < hi, got [{lo}, {hi}]")
            q0 = self.tendon_offset_angles[j - 1]
            if not q0 > hi:
                raise ValidationError(
                    f"tendon offset angle q{j}^(0)={q0} must exceed joint {j} upper limit {hi}"
                )
            if not q0 - lo < math.pi:
                raise ValidationError(
                    f"tendon offset angle q{j}^(0)={q0} minus lower limit {lo} must stay below pi"
                )
        if self.cord_rest_angles is not None:
            for j, q in enumerate(self.cord_rest_angles, start=1):
                lo, hi = self.joint_limits[j - 1]
                if not lo <= q <= hi:
                    raise ValidationError(f"cord rest angle for joint {j} outside its limits")

    @property
    def length(self) -> float:
        return self.proximal_length + self.distal_length

    @property
    def rest_state(self) -> JointState:
        return JointState(self.joint_limits[0][0], self.joint_limits[1][0])

    @property
    def max_flexion_state(self) -> JointState:
        return JointState(self.joint_limits[0][1], self.joint_limits[1][1])

    @property
    def cord_zero_angles(self) -> Pair:
        if self.cord_rest_angles is None:
            return (self.joint_limits[0][0], self.joint_limits[1][0])
        return self.cord_rest_angles

    def limits(self, joint: int) -> Pair:
        return self.joint_limits[_joint_index(joint)]

    def replace(self, **changes) -> "FingerDesign":
        return dataclasses.replace(self, **changes)


def _joint_index(joint: int) -> int:
    if joint not in (1, 2):
        raise ValueError(f"joint must be 1 or 2, got {joint!r}")
    return joint - 1


DEFAULT_PAIRING = (
    (FingerRole.A_LEFT, FingerRole.A_RIGHT),
    (FingerRole.B_LEFT, FingerRole.B_RIGHT),
)


@dataclass(frozen=True)
class HandConfig:
    """Four fingers on a two-part palm.

    ``fingers`` is ordered as :data:`ROLES`. The B fingers ride on the rotating
    palm section; ``palm_rotation`` runs from 0 (spherical layout) to
    ``phi_max`` where each B finger sits beside its A partner.
    """

    fingers: Tuple[FingerDesign, FingerDesign, FingerDesign, FingerDesign]
    palm_diameter: float = 60.0
    finger_rest_splay: float = math.radians(30.0)
    palm_rotation: float = 0.0
    phi_max: float = math.pi / 3
    lateral_offset: float = 10.0
    lock_state: LockState = LockState.UNLOCKED
    muscle_pairing: Tuple[Tuple[FingerRole, FingerRole], Tuple[FingerRole, FingerRole]] = DEFAULT_PAIRING
    lock_compliance: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "fingers", tuple(self.fingers))
        object.__setattr__(self, "lock_state", LockState(self.lock_state))
        object.__setattr__(
            self,
            "muscle_pairing",
            tuple(tuple(FingerRole(r) for r in pair) for pair in self.muscle_pairing),
        )
        self._validate()

    def _validate(self):
        if len(self.fingers) != 4:
            raise ValidationError("a hand has exactly four fingers")
        for role, design in zip(ROLES, self.fingers):
            if design.finger_type != role.finger_type:
                raise ValidationError(f"finger {role.value} must be of type {role.finger_type.value}")
        if not self.palm_diameter > 0:
            raise ValidationError("palm_diameter must be > 0")
        if not 0 <= self.lateral_offset < self.palm_diameter / 2:
            raise ValidationError("lateral_offset must lie in [0, palm radius)")
        if not self.phi_max > 0:
            raise ValidationError("phi_max must be > 0")
        if not 0 <= self.palm_rotation <= self.phi_max + 1e-12:
            raise ValidationError(
                f"palm_rotation {self.palm_rotation} outside [0, phi_max={self.phi_max}]"
            )
        if self.lock_state is LockState.LOCKED and abs(self.palm_rotation - self.phi_max) > 1e-6:
            raise ValidationError("lock_state=locked is only permitted at palm_rotation = phi_max")
        if self.lock_compliance < 0:
            raise ValidationError("lock_compliance must be >= 0")
        if len(self.muscle_pairing) != 2 or any(len(p) != 2 for p in self.muscle_pairing):
            raise ValidationError("muscle_pairing maps two muscles to two fingers each")
        flat = [r for pair in self.muscle_pairing for r in pair]
        if sorted(flat) != sorted(ROLES):
            raise ValidationError("each finger must appear in exactly one muscle pairing")
        for pair in self.muscle_pairing:
            if pair[0].partner == pair[1]:
                raise ValidationError(
                    "a combined finger must hold one finger from each muscle; "
                    f"{pair[0].value} and {pair[1].value} share a muscle"
                )

    def finger(self, role: FingerRole) -> FingerDesign:
        return self.fingers[ROLES.index(FingerRole(role))]

    def muscle_of(self, role: FingerRole) -> int:
        for m, pair in enumerate(self.muscle_pairing):
            if role in pair:
                return m
        raise KeyError(role)

    @property
    def locked(self) -> bool:
        return self.lock_state is LockState.LOCKED

    def replace(self, **changes) -> "HandConfig":
        return dataclasses.replace(self, **changes)


def default_finger(finger_type: FingerType) -> FingerDesign:
    if FingerType(finger_type) is FingerType.A:
        return FingerDesign(FingerType.A, proximal_length=50.0, distal_length=45.0)
    return FingerDesign(FingerType.B, proximal_length=40.0, distal_length=55.0)


def default_hand() -> HandConfig:
    """The reference hand: 95 mm fingers, 60 mm palm, 30 deg rest splay."""
    return HandConfig(fingers=tuple(default_finger(r.finger_type) for r in ROLES))


# --------------------------------------------------------------------------
# hand-design files

_LENGTH_UNITS = {"mm": 1.0, "cm": 10.0, "m": 1000.0}
_ANGLE_UNITS = {"rad": 1.0, "deg": math.pi / 180.0}
_STIFFNESS_UNITS = {"N/mm": 1.0, "N/m": 1e-3}


def hand_schema() -> dict:
    text = resources.files("tendongrip").joinpath("data/hand.schema.json").read_text()
    return json.loads(text)


def _quantity(obj, table, where):
    unit = obj["unit"]
    if unit not in table:
        raise ValidationError(f"{where}: unsupported unit {unit!r}")
    scale = table[unit]

    def conv(v):
        if isinstance(v, list):
            return tuple(conv(x) for x in v)
        return float(v) * scale

    return conv(obj["value"])


def _finger_from_dict(d, where) -> FingerDesign:
    L, A, K = _LENGTH_UNITS, _ANGLE_UNITS, _STIFFNESS_UNITS
    kwargs = dict(
        finger_type=d["finger_type"],
        proximal_length=_quantity(d["proximal_length"], L, where),
        distal_length=_quantity(d["distal_length"], L, where),
        width=_quantity(d["width"], L, where),
        thickness=_quantity(d["thickness"], L, where),
        tendon_offsets=_quantity(d["tendon_offsets"], L, where),
        tendon_offset_angles=_quantity(d["tendon_offset_angles"], A, where),
        elastic_offsets=_quantity(d["elastic_offsets"], L, where),
        spring_constant=_quantity(d["spring_constant"], K, where),
        joint_limits=_quantity(d["joint_limits"], A, where),
    )
    if d.get("cord_rest_angles") is not None:
        kwargs["cord_rest_angles"] = _quantity(d["cord_rest_angles"], A, where)
    try:
        return FingerDesign(**kwargs)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def hand_from_dict(data: dict) -> HandConfig:
    """Build a validated :class:`HandConfig` from parsed hand-file JSON."""
    import jsonschema

    try:
        jsonschema.validate(data, hand_schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"schema violation at {path}: {exc.message}") from None
    L, A = _LENGTH_UNITS, _ANGLE_UNITS
    fingers = tuple(_finger_from_dict(data["fingers"][r.value], f"fingers.{r.value}") for r in ROLES)
    pairing = tuple(tuple(data["muscle_pairing"][str(m)]) for m in range(2))
    kwargs = dict(
        fingers=fingers,
        palm_diameter=_quantity(data["palm_diameter"], L, "palm_diameter"),
        finger_rest_splay=_quantity(data["finger_rest_splay"], A, "finger_rest_splay"),
        palm_rotation=_quantity(data["palm_rotation"], A, "palm_rotation"),
        phi_max=_quantity(data["phi_max"], A, "phi_max"),
        lateral_offset=_quantity(data["lateral_offset"], L, "lateral_offset"),
        lock_state=data["lock_state"],
        muscle_pairing=pairing,
    )
    if "lock_compliance" in data:
        kwargs["lock_compliance"] = _quantity(data["lock_compliance"], A, "lock_compliance")
    return HandConfig(**kwargs)


def _q(value, unit):
    if isinstance(value, tuple):
        value = [list(v) if isinstance(v, tuple) else v for v in value]
    return {"value": value, "unit": unit}


def _finger_to_dict(f: FingerDesign) -> dict:
    d = {
        "finger_type": f.finger_type.value,
        "proximal_length": _q(f.proximal_length, "mm"),
        "distal_length": _q(f.distal_length, "mm"),
        "width": _q(f.width, "mm"),
        "thickness": _q(f.thickness, "mm"),
        "tendon_offsets": _q(f.tendon_offsets, "mm"),
        "tendon_offset_angles": _q(f.tendon_offset_angles, "rad"),
        "elastic_offsets": _q(f.elastic_offsets, "mm"),
        "spring_constant": _q(f.spring_constant, "N/mm"),
        "joint_limits": _q(f.joint_limits, "rad"),
    }
    if f.cord_rest_angles is not None:
        d["cord_rest_angles"] = _q(f.cord_rest_angles, "rad")
    return d


def hand_to_dict(hand: HandConfig) -> dict:
    """Canonical dict form: mm, rad and N/mm throughout."""
    return {
        "schema_version": SCHEMA_VERSION,
        "palm_diameter": _q(hand.palm_diameter, "mm"),
        "finger_rest_splay": _q(hand.finger_rest_splay, "rad"),
        "palm_rotation": _q(hand.palm_rotation, "rad"),
        "phi_max": _q(hand.phi_max, "rad"),
        "lateral_offset": _q(hand.lateral_offset, "mm"),
        "lock_state": hand.lock_state.value,
        "lock_compliance": _q(hand.lock_compliance, "rad"),
        "muscle_pairing": {str(m): [r.value for r in pair] for m, pair in enumerate(hand.muscle_pairing)},
        "fingers": {r.value: _finger_to_dict(hand.finger(r)) for r in ROLES},
    }


def dumps_hand(hand: HandConfig) -> str:
    return json.dumps(hand_to_dict(hand), indent=2) + "\n"


def save_hand(hand: HandConfig, path) -> None:
    from .io import atomic_write_text

    atomic_write_text(path, dumps_hand(hand))


def load_hand(path) -> HandConfig:
    """Read and validate a hand-design JSON file.

    ``"default"`` is accepted in place of a path and returns :func:`default_hand`.
    """
    if str(path) == "default":
        return default_hand()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"cannot read hand file {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{path}: malformed JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigParseError(f"{path}: top level must be a JSON object")
    return hand_from_dict(data)
