"""Elastic energy over joint space and its minimisation along tendon contours.

With the tendon held at a fixed length the finger settles on the level set
``L1(q1) + L2(q2) = T`` at the point of least cord energy. Both tendon terms
decrease strictly with flexion, so every level set is a single monotone
curve across the joint box and can be parameterised by ``q1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, List, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from ._numerics import bisect_decreasing
from .errors import DomainError, RangeError
from .tendon import LIMIT_SLACK, chord_length
from .types import FingerDesign, JointState

CONTOUR_TOL = 1e-9  # rad, bisection tolerance for contour points
ENDPOINT_TOL = 1e-12  # mm, tendon targets this close to an extreme collapse onto the corner


# --------------------------------------------------------------------------
# vectorised primitives (no limit checks; callers validate)

def _tendon(design: FingerDesign, joint: int, q):
    d_prev, d_link = design.tendon_offsets[joint - 1]
    return chord_length(d_link, d_prev, design.tendon_offset_angles[joint - 1] - q)


def _stretch(design: FingerDesign, q1, q2):
    (d1, d2), (z1, z2) = design.elastic_offsets, design.cord_zero_angles
    return (
        2.0 * d1 * (np.sin(0.5 * q1) - np.sin(0.5 * z1))
        + 2.0 * d2 * (np.sin(0.5 * q2) - np.sin(0.5 * z2))
    )


def total_tendon_length(design: FingerDesign, q1, q2):
    """``L1(q1) + L2(q2)`` in mm; broadcasts over arrays."""
    out = _tendon(design, 1, np.asarray(q1, dtype=float)) + _tendon(design, 2, np.asarray(q2, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def energy_array(design: FingerDesign, q1, q2):
    """Cord energy ``k/2 * s**2`` where ``s`` is the shared cord stretch.

    A slack cord (negative stretch) stores nothing.
    """
    s = np.maximum(_stretch(design, np.asarray(q1, dtype=float), np.asarray(q2, dtype=float)), 0.0)
    out = 0.5 * design.spring_constant * s * s
    return float(out) if np.ndim(out) == 0 else out


def _check_state(design: FingerDesign, state: JointState):
    for j, q in enumerate(state.as_tuple(), start=1):
        lo, hi = design.joint_limits[j - 1]
        if not (lo - LIMIT_SLACK <= q <= hi + LIMIT_SLACK):
            raise DomainError(f"q{j}={q} outside joint limits [{lo}, {hi}]")


def elastic_energy(design: FingerDesign, state: JointState) -> float:
    """Energy stored in the extension cord at ``state`` (N*mm).

    Measured from the cord's unstretched pose, which by default is the rest
    pose of the finger.
    """
    _check_state(design, state)
    return energy_array(design, state.q1, state.q2)


def tendon_range(design: FingerDesign) -> Tuple[float, float]:
    """(min, max) total tendon length over the joint box: max flexion and rest."""
    (lo1, hi1), (lo2, hi2) = design.joint_limits
    return total_tendon_length(design, hi1, hi2), total_tendon_length(design, lo1, lo2)


# --------------------------------------------------------------------------
# grid

@dataclass(frozen=True)
class EnergySample:
    state: JointState
    total_tendon_length: float
    elastic_energy: float


@dataclass(frozen=True)
class EnergyGrid:
    q1: np.ndarray
    q2: np.ndarray
    total_tendon_length: np.ndarray  # (n1, n2)
    elastic_energy: np.ndarray  # (n1, n2)

    @property
    def shape(self):
        return self.total_tendon_length.shape

    def sample(self, i: int, j: int) -> EnergySample:
        return EnergySample(
            JointState(float(self.q1[i]), float(self.q2[j])),
            float(self.total_tendon_length[i, j]),
            float(self.elastic_energy[i, j]),
        )

    def samples(self) -> Iterator[EnergySample]:
        """Row-major: q1 outer, q2 inner."""
        n1, n2 = self.shape
        for i in range(n1):
            for j in range(n2):
                yield self.sample(i, j)


def energy_grid(design: FingerDesign, n1: int, n2: int) -> EnergyGrid:
    if n1 < 2 or n2 < 2:
        raise DomainError("energy grid needs at least 2 samples per axis")
    (lo1, hi1), (lo2, hi2) = design.joint_limits
    q1 = np.linspace(lo1, hi1, n1)
    q2 = np.linspace(lo2, hi2, n2)
    Q1, Q2 = np.meshgrid(q1, q2, indexing="ij")
    return EnergyGrid(q1, q2, total_tendon_length(design, Q1, Q2), energy_array(design, Q1, Q2))


# --------------------------------------------------------------------------
# contours

def _check_target(design: FingerDesign, target: float) -> Tuple[float, float]:
    lmin, lmax = tendon_range(design)
    if not (lmin - 1e-9 <= target <= lmax + 1e-9):
        raise RangeError(f"tendon length {target} outside achievable range [{lmin}, {lmax}]")
    return lmin, lmax


def _tendon_scalar(design: FingerDesign, joint: int, q: float) -> float:
    d_prev, d_link = design.tendon_offsets[joint - 1]
    c = math.cos(design.tendon_offset_angles[joint - 1] - q)
    return math.sqrt(max(d_link * d_link + d_prev * d_prev - 2.0 * d_link * d_prev * c, 0.0))


def _solve_joint(design, joint, length):
    lo, hi = design.joint_limits[joint - 1]
    if np.ndim(length) == 0:
        length = float(length)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            if _tendon_scalar(design, joint, mid) > length:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    return bisect_decreasing(lambda q: _tendon(design, joint, q), length, lo, hi)


def _solve_q1(design, target_q1_length):
    return _solve_joint(design, 1, target_q1_length)


def _solve_q2(design, target_q2_length):
    return _solve_joint(design, 2, target_q2_length)


def contour_span(design: FingerDesign, target: float):
    """Endpoints ``((q1a, q2a), (q1b, q2b))`` of the level set, ordered by q1.

    The q1a end has the largest q2. Coordinates that sit on a joint limit are
    returned exactly.
    """
    (lo1, hi1), (lo2, hi2) = design.joint_limits
    f2_hi, f2_lo = _tendon(design, 2, hi2), _tendon(design, 2, lo2)
    rest1 = target - _tendon(design, 1, lo1)
    if rest1 >= f2_hi:
        a = (lo1, float(_solve_q2(design, rest1)) if rest1 < f2_lo else lo2)
    else:
        a = (float(_solve_q1(design, target - f2_hi)), hi2)
    rest2 = target - _tendon(design, 1, hi1)
    if rest2 <= f2_lo:
        b = (hi1, float(_solve_q2(design, rest2)) if rest2 > f2_hi else hi2)
    else:
        b = (float(_solve_q1(design, target - f2_lo)), lo2)
    return a, b


def q2_on_contour(design: FingerDesign, target: float, q1):
    """q2 such that ``(q1, q2)`` lies on the level set (vectorised)."""
    q1 = np.asarray(q1, dtype=float)
    return _solve_q2(design, target - _tendon(design, 1, q1))


def q1_on_contour(design: FingerDesign, target: float, q2):
    q2 = np.asarray(q2, dtype=float)
    return _solve_q1(design, target - _tendon(design, 2, q2))


def sample_contour(design: FingerDesign, target: float, n: int, q1_range=None):
    """Ordered points on the level set, scanned along both axes.

    Returns arrays ``(q1, q2)`` with q1 ascending. ``q1_range`` restricts the
    scan to a sub-arc; its endpoints are always included.
    """
    a, b = contour_span(design, target)
    qa, qb = (a[0], b[0]) if q1_range is None else q1_range
    if qb < qa:
        raise ValueError("empty contour range")
    if q1_range is None:
        pa, pb = a, b
    else:
        pa = (qa, float(q2_on_contour(design, target, qa))) if qa != a[0] else a
        pb = (qb, float(q2_on_contour(design, target, qb))) if qb != b[0] else b
    if qb - qa <= 0:
        return np.array([pa[0]]), np.array([pa[1]])
    s1 = np.linspace(qa, qb, n)[1:-1]
    q2s = q2_on_contour(design, target, s1)
    s2 = np.linspace(pb[1], pa[1], n)[1:-1]
    q1s = q1_on_contour(design, target, s2)
    q1 = np.concatenate([[pa[0]], s1, q1s, [pb[0]]])
    q2 = np.concatenate([[pa[1]], q2s, s2, [pb[1]]])
    order = np.lexsort((-q2, q1))
    q1, q2 = q1[order], q2[order]
    keep = np.ones(len(q1), dtype=bool)
    keep[1:] = (np.diff(q1) > 1e-13) | (np.abs(np.diff(q2)) > 1e-13)
    return q1[keep], q2[keep]


@dataclass(frozen=True)
class Contour:
    target_total_tendon_length: float
    samples: Tuple[JointState, ...]

    def residuals(self, design: FingerDesign) -> np.ndarray:
        q = np.array([s.as_tuple() for s in self.samples])
        return total_tendon_length(design, q[:, 0], q[:, 1]) - self.target_total_tendon_length


def contour(design: FingerDesign, target_L: float, resolution: int = 200) -> Contour:
    """Level set of total tendon length, ordered with q1 increasing (q2 decreasing)."""
    if resolution < 2:
        raise DomainError("contour resolution must be >= 2")
    lmin, lmax = _check_target(design, target_L)
    target_L = min(max(target_L, lmin), lmax)
    q1, q2 = sample_contour(design, target_L, resolution)
    return Contour(target_L, tuple(JointState(float(a), float(b)) for a, b in zip(q1, q2)))


# --------------------------------------------------------------------------
# minimum-energy states

def _pick(q1, q2, e):
    """Index of the least energy; near-ties go to the smallest q1, then q2."""
    emin = e.min()
    tie = e <= emin + 1e-12 * max(1.0, abs(emin))
    idx = np.flatnonzero(tie)
    return idx[np.lexsort((q2[idx], q1[idx]))[0]]


def _refine(design, target, q1, q2, e, i):
    """Polish an interior sample minimum with a bounded scalar search."""
    lo_i, hi_i = max(i - 1, 0), min(i + 1, len(q1) - 1)
    if q1[hi_i] - q1[lo_i] >= abs(q2[lo_i] - q2[hi_i]):
        def fun(x):
            return energy_array(design, x, float(q2_on_contour(design, target, x)))

        res = minimize_scalar(fun, bounds=(q1[lo_i], q1[hi_i]), method="bounded",
                              options={"xatol": CONTOUR_TOL})
        a = float(res.x)
        b = float(q2_on_contour(design, target, a))
    else:
        def fun(y):
            return energy_array(design, float(q1_on_contour(design, target, y)), y)

        res = minimize_scalar(fun, bounds=(q2[hi_i], q2[lo_i]), method="bounded",
                              options={"xatol": CONTOUR_TOL})
        b = float(res.x)
        a = float(q1_on_contour(design, target, b))
    ea = energy_array(design, a, b)
    if ea < e[i]:
        return a, b, ea
    return float(q1[i]), float(q2[i]), float(e[i])


def min_energy_on_arc(design: FingerDesign, target: float, q1_range, n: int = 257):
    """Least-energy point of the level set restricted to ``q1`` in ``q1_range``."""
    q1, q2 = sample_contour(design, target, n, q1_range)
    e = energy_array(design, q1, q2)
    i = _pick(q1, q2, e)
    if 0 < i < len(q1) - 1:
        a, b, ea = _refine(design, target, q1, q2, e, i)
    else:
        a, b, ea = float(q1[i]), float(q2[i]), float(e[i])
    return JointState(a, b), ea


def min_energy_on_contour(design: FingerDesign, target_L: float) -> Tuple[JointState, float]:
    """State of least cord energy with total tendon length ``target_L``."""
    lmin, lmax = _check_target(design, target_L)
    if target_L >= lmax - ENDPOINT_TOL:
        s = design.rest_state
        return s, energy_array(design, s.q1, s.q2)
    if target_L <= lmin + ENDPOINT_TOL:
        s = design.max_flexion_state
        return s, energy_array(design, s.q1, s.q2)
    return min_energy_on_arc(design, target_L, None)


@dataclass(frozen=True)
class TrajectoryPoint:
    retracted_tendon: float
    state: JointState
    elastic_energy: float


@dataclass(frozen=True)
class Trajectory:
    points: Tuple[TrajectoryPoint, ...]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def states(self) -> np.ndarray:
        return np.array([p.state.as_tuple() for p in self.points])


def min_energy_trajectory(design: FingerDesign, steps: int = 100) -> Trajectory:
    """Contour minimisers for tendon retraction swept linearly from 0 to full."""
    if steps < 2:
        raise DomainError("trajectory needs at least 2 steps")
    lmin, lmax = tendon_range(design)
    pts = []
    for i in range(steps):
        r = (lmax - lmin) * i / (steps - 1)
        target = lmax - r if i < steps - 1 else lmin
        state, e = min_energy_on_contour(design, target)
        pts.append(TrajectoryPoint(r, state, e))
    return Trajectory(tuple(pts))


# --------------------------------------------------------------------------
# bistability

def separated_minima(values: Sequence[float], barrier: float) -> List[int]:
    """Indices of local minima of a 1-D profile that survive a barrier filter.

    A minimum counts when every path to a strictly lower (or equal, earlier)
    minimum climbs more than ``barrier`` above it. The global minimum always
    counts.
    """
    v = np.asarray(values, dtype=float)
    n = len(v)
    if n == 0:
        return []
    cand = []
    for i in range(n):
        left = v[i - 1] if i > 0 else np.inf
        right = v[i + 1] if i < n - 1 else np.inf
        if v[i] < left and v[i] <= right:
            cand.append(i)
    keep = []
    for i in cand:
        lower = [j for j in cand if v[j] < v[i] or (v[j] == v[i] and j < i)]
        if not lower:
            keep.append(i)
            continue
        height = np.inf
        for j in lower:
            a, b = sorted((i, j))
            height = min(height, v[a : b + 1].max() - v[i])
        if height > barrier:
            keep.append(i)
    return keep


@dataclass(frozen=True)
class BistabilityReport:
    bistable: bool
    degenerate: bool
    basins: Tuple[JointState, ...]
    target_total_tendon_length: float | None
    barrier_epsilon: float
    basin_counts: Tuple[int, ...] = field(default=())


def _descend(fun, x, lo, hi, h=0.05, tol=1e-7):
    fx = fun(x)
    while h > tol:
        moved = False
        for step in (h, -h):
            y = min(max(x + step, lo), hi)
            if y == x:
                continue
            fy = fun(y)
            if fy < fx:
                x, fx, moved = y, fy, True
                break
        if not moved:
            h *= 0.5
    return x, fx


def contour_minima_multistart(design: FingerDesign, target: float, barrier: float, starts: int = 17):
    """Separated local minima along one contour, found by multi-start descent."""
    a, b = contour_span(design, target)
    lo, hi = a[0], b[0]
    if hi - lo <= 0:
        return [JointState(*a)]

    def fun(x):
        return energy_array(design, x, float(q2_on_contour(design, target, x)))

    found = []
    for x0 in np.linspace(lo, hi, starts):
        x, fx = _descend(fun, float(x0), lo, hi, h=(hi - lo) / (starts - 1))
        if not any(abs(x - y) < 1e-4 for y, _ in found):
            found.append((x, fx))
    found.sort()
    xs = [x for x, _ in found]
    # barrier filter on the found minima, sampling the ridge between neighbours
    prof_x, prof_v, mins = [], [], []
    for k, x in enumerate(xs):
        mins.append(len(prof_x))
        prof_x.append(x)
        prof_v.append(fun(x))
        if k + 1 < len(xs):
            mid = np.linspace(x, xs[k + 1], 64)[1:-1]
            prof_x.extend(mid)
            prof_v.extend(fun(m) for m in mid)
    prof_v = np.array(prof_v)
    survivors = []
    for idx in mins:
        lower = [j for j in mins if prof_v[j] < prof_v[idx] or (prof_v[j] == prof_v[idx] and j < idx)]
        height = min((prof_v[min(idx, j): max(idx, j) + 1].max() - prof_v[idx] for j in lower), default=np.inf)
        if height > barrier:
            survivors.append(prof_x[idx])
    return [JointState(float(x), float(q2_on_contour(design, target, x))) for x in survivors]


def detect_bistability(design: FingerDesign, steps: int = 50) -> BistabilityReport:
    """Look for contours holding two energy basins split by a real barrier.

    The barrier threshold is ``1e-3`` of the largest energy over the joint box.
    """
    grid = energy_grid(design, 201, 201)
    emax = float(grid.elastic_energy.max())
    eps = 1e-3 * emax
    if emax <= 0.0:
        return BistabilityReport(False, True, (), None, 0.0, ())
    lmin, lmax = tendon_range(design)
    best, best_target, best_gap = None, None, -np.inf
    counts = []
    for i in range(1, steps + 1):
        target = lmax - (lmax - lmin) * i / (steps + 1)
        basins = contour_minima_multistart(design, target, eps)
        counts.append(len(basins))
        if len(basins) >= 2:
            es = sorted(energy_array(design, s.q1, s.q2) for s in basins)
            gap = -(es[1] - es[0])  # prefer the most balanced pair of basins
            if gap > best_gap:
                best, best_target, best_gap = basins, target, gap
    if best is None:
        return BistabilityReport(False, False, (), None, eps, tuple(counts))
    return BistabilityReport(True, False, tuple(best), best_target, eps, tuple(counts))
