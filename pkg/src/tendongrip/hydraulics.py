"""Quasi-static hydraulic drive: one pump feeding two braided muscles.

Units at the interface: pressure in kPa, force in N, contraction in mm,
volume in mL. Internally volumes are tracked in mm^3 (1 mL = 1000 mm^3).

The muscle volume used here is the work-conjugate volume: dV/dc = F/P, so
the fluid work P dV equals the mechanical work F dc exactly. This keeps the
pressure balance and the volume bookkeeping consistent with each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence, Tuple

from .errors import DomainError, OverpressureError, ValidationError

MM3_PER_ML = 1000.0


@dataclass(frozen=True)
class MuscleParams:
    braid_angle: float = math.radians(20.0)  # initial braid angle theta0, rad
    area: float = 100.0  # nominal cross-section A0, mm^2
    rest_length: float = 40.0  # mm
    max_contraction_ratio: float = 0.25

    def __post_init__(self):
        if not 0.0 < self.braid_angle < math.pi / 2:
            raise ValidationError("braid_angle must lie in (0, pi/2)")
        if self.area <= 0 or self.rest_length <= 0:
            raise ValidationError("muscle area and rest_length must be positive")
        if not 0.0 < self.max_contraction_ratio < self.lockup_ratio:
            raise ValidationError("max_contraction_ratio must lie in (0, lockup ratio)")

    @property
    def a(self) -> float:
        return 3.0 / math.tan(self.braid_angle) ** 2

    @property
    def b(self) -> float:
        return 1.0 / math.sin(self.braid_angle) ** 2

    @property
    def lockup_ratio(self) -> float:
        """Contraction ratio at which the ideal law gives zero force."""
        return 1.0 - math.sqrt(self.b / self.a)

    @property
    def max_contraction(self) -> float:
        return self.max_contraction_ratio * self.rest_length


DEFAULT_MUSCLE = MuscleParams()


def muscle_force(pressure: float, contraction_ratio: float, params: MuscleParams = DEFAULT_MUSCLE) -> float:
    """Ideal braided-muscle pull in N, clamped at zero."""
    if pressure < 0:
        raise DomainError(f"pressure must be >= 0, got {pressure}")
    if not 0.0 <= contraction_ratio < 1.0:
        raise DomainError(f"contraction ratio must lie in [0, 1), got {contraction_ratio}")
    # kPa * mm^2 = 1e-3 N
    f = pressure * params.area * 1e-3 * (params.a * (1.0 - contraction_ratio) ** 2 - params.b)
    return max(f, 0.0)


def muscle_volume(contraction_ratio: float, params: MuscleParams = DEFAULT_MUSCLE) -> float:
    """Work-conjugate volume change from rest, mm^3."""
    e = contraction_ratio
    return params.area * params.rest_length * (params.a * (1.0 - (1.0 - e) ** 3) / 3.0 - params.b * e)


def contraction_for_volume(volume: float, params: MuscleParams = DEFAULT_MUSCLE) -> float:
    """Inverse of :func:`muscle_volume` on [0, lockup], by bisection."""
    lo, hi = 0.0, params.lockup_ratio
    if volume <= 0.0:
        return 0.0
    if volume >= muscle_volume(hi, params):
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if muscle_volume(mid, params) < volume:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class MuscleState:
    pressure: float  # kPa
    contraction: float  # mm
    max_contraction: float  # mm
    force_capacity: float  # N

    def __post_init__(self):
        if not -1e-12 <= self.contraction <= self.max_contraction + 1e-12:
            raise ValidationError(f"contraction {self.contraction} outside [0, {self.max_contraction}]")
        if self.force_capacity < 0:
            raise ValidationError("force_capacity must be >= 0")


def _muscle_state(pressure: float, ratio: float, params: MuscleParams) -> MuscleState:
    return MuscleState(
        pressure=pressure,
        contraction=ratio * params.rest_length,
        max_contraction=params.max_contraction,
        force_capacity=muscle_force(pressure, ratio, params),
    )


@dataclass(frozen=True)
class HydraulicCircuit:
    """Pump plus two muscles on one supply line.

    ``volumes`` holds the fluid absorbed by each muscle in mm^3; their sum is
    the pumped volume.
    """

    pumped_volume: float  # mL
    muscles: Tuple[MuscleState, MuscleState]
    shared_pressure: float  # kPa
    volumes: Tuple[float, float] = (0.0, 0.0)
    params: MuscleParams = field(default=DEFAULT_MUSCLE)

    @classmethod
    def at_rest(cls, params: MuscleParams = DEFAULT_MUSCLE) -> "HydraulicCircuit":
        m = _muscle_state(0.0, 0.0, params)
        return cls(0.0, (m, m), 0.0, (0.0, 0.0), params)

    def ratios(self) -> Tuple[float, float]:
        return tuple(m.contraction / self.params.rest_length for m in self.muscles)

    def volume_capacity(self, i: int) -> float:
        """Volume muscle ``i`` can still absorb before its contraction limit, mm^3."""
        return max(muscle_volume(self.params.max_contraction_ratio, self.params) - self.volumes[i], 0.0)


def _ratio_at_pressure(p: float, load: float, eps0: float, params: MuscleParams) -> float:
    """Contraction ratio where the muscle balances ``load`` at pressure ``p``."""
    if p <= 0.0:
        return eps0
    need = (params.b + load / (p * params.area * 1e-3)) / params.a
    eps = 1.0 - math.sqrt(need)
    return min(max(eps, eps0), params.max_contraction_ratio)


def absorbed_at_pressure(circuit: HydraulicCircuit, loads: Sequence[float], p: float) -> Tuple[float, float]:
    """Volume (mm^3) each muscle would take up if the line were raised to ``p``."""
    out = []
    for i, load in enumerate(loads):
        if math.isinf(load):
            out.append(0.0)
            continue
        eps0 = circuit.ratios()[i]
        eps = _ratio_at_pressure(p, load, eps0, circuit.params)
        out.append(max(muscle_volume(eps, circuit.params) - circuit.volumes[i], 0.0))
    return tuple(out)


def _free(circuit: HydraulicCircuit, loads: Sequence[float], i: int) -> bool:
    return not math.isinf(loads[i]) and circuit.volume_capacity(i) > 0.0


def distribute_volume(circuit: HydraulicCircuit, loads: Sequence[float], dV: float) -> HydraulicCircuit:
    """Inject ``dV`` mL and let the shared pressure rise until it is absorbed.

    A load of ``math.inf`` marks a blocked muscle; it takes no fluid.
    Raises :class:`OverpressureError` when nothing can absorb the volume.
    """
    if dV < 0 or math.isnan(dV):
        raise DomainError(f"dV must be >= 0, got {dV}")
    loads = tuple(float(x) for x in loads)
    if len(loads) != 2 or any(x < 0 or math.isnan(x) for x in loads):
        raise ValidationError("loads must be two non-negative forces")
    if dV == 0.0:
        return circuit
    dv = dV * MM3_PER_ML
    params = circuit.params
    free = [i for i in range(2) if _free(circuit, loads, i)]
    capacity = sum(circuit.volume_capacity(i) for i in free)
    if not free or dv > capacity * (1.0 + 1e-12):
        raise OverpressureError(f"cannot absorb {dV} mL: free capacity {capacity / MM3_PER_ML} mL")

    # bracket and bisect the shared pressure
    hi = max(circuit.shared_pressure, 1e-6)
    while sum(absorbed_at_pressure(circuit, loads, hi)) < dv:
        hi *= 2.0
        if hi > 1e12:
            raise OverpressureError("pressure diverged while absorbing volume")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if sum(absorbed_at_pressure(circuit, loads, mid)) < dv:
            lo = mid
        else:
            hi = mid
    p = hi
    inc = list(absorbed_at_pressure(circuit, loads, p))
    # close the books exactly: the last free muscle takes the remainder
    if len(free) == 1:
        inc = [0.0, 0.0]
        inc[free[0]] = dv
    else:
        k = 0 if inc[0] >= inc[1] else 1
        inc[k] = dv - inc[1 - k]
    volumes = tuple(circuit.volumes[i] + inc[i] for i in range(2))
    ratios = []
    for i in range(2):
        if inc[i] == 0.0:
            ratios.append(circuit.ratios()[i])
        else:
            ratios.append(min(contraction_for_volume(volumes[i], params), params.max_contraction_ratio))
    if len(free) == 1:
        i = free[0]
        gain = params.a * (1.0 - ratios[i]) ** 2 - params.b
        p = loads[i] / (params.area * 1e-3 * gain) if gain > 0 else p
    muscles = tuple(_muscle_state(p, ratios[i], params) for i in range(2))
    return replace(
        circuit,
        pumped_volume=circuit.pumped_volume + dV,
        muscles=muscles,
        shared_pressure=p,
        volumes=volumes,
    )


def volume_for_contraction_step(circuit: HydraulicCircuit, i: int, step: float) -> float:
    """Volume in mL that would advance muscle ``i`` by ``step`` mm on its own."""
    params = circuit.params
    eps = circuit.ratios()[i]
    target = min(eps + step / params.rest_length, params.max_contraction_ratio)
    return max(muscle_volume(target, params) - circuit.volumes[i], 0.0) / MM3_PER_ML


def settle_muscle(circuit: HydraulicCircuit, i: int, contraction: float) -> HydraulicCircuit:
    """Roll muscle ``i`` back to ``contraction`` mm, returning the excess fluid to the pump.

    Used when a finger pair stops part-way through a step: the pump only
    delivers what the muscles actually take up.
    """
    params = circuit.params
    ratio = contraction / params.rest_length
    if ratio > circuit.ratios()[i] + 1e-12:
        raise DomainError("settle_muscle can only reduce a contraction")
    new_vol = muscle_volume(ratio, params)
    excess = circuit.volumes[i] - new_vol
    volumes = list(circuit.volumes)
    volumes[i] = new_vol
    muscles = list(circuit.muscles)
    muscles[i] = _muscle_state(circuit.shared_pressure, ratio, params)
    return replace(
        circuit,
        pumped_volume=circuit.pumped_volume - excess / MM3_PER_ML,
        muscles=tuple(muscles),
        volumes=tuple(volumes),
    )
