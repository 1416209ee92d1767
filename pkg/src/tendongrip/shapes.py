"""Convex object primitives and the clearance queries used for contact.

Phalanges are capsules in a finger's flexion plane. A 3D object is reduced
to that plane by projecting the part of it lying inside the finger's slab
(plane offset within half the finger width). For a finger extruded
sideways this is exact: the finger hits the object iff its planar profile
hits the projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.spatial import ConvexHull

from .errors import ValidationError


# --------------------------------------------------------------------------
# planar shapes


@dataclass(frozen=True)
class Circle:
    center: Tuple[float, float]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(map(float, self.center)))
        if not self.radius > 0:
            raise ValidationError("circle radius must be positive")

    def translated(self, dx: float, dy: float) -> "Circle":
        return Circle((self.center[0] + dx, self.center[1] + dy), self.radius)

    def mapped(self, sx: float, ox: float) -> "Circle":
        """Image under x -> sx * x + ox with |sx| = 1."""
        return Circle((sx * self.center[0] + ox, self.center[1]), self.radius)

    def to_dict(self) -> dict:
        return {"type": "circle", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class ConvexPolygon:
    vertices: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValidationError("a polygon needs at least three 2D vertices")
        e = np.roll(v, -1, axis=0) - v
        f = np.roll(e, -1, axis=0)
        cross = e[:, 0] * f[:, 1] - e[:, 1] * f[:, 0]
        if np.any(cross <= 0):
            raise ValidationError("polygon must be strictly convex and counterclockwise")
        object.__setattr__(self, "vertices", tuple(map(tuple, v.tolist())))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    @classmethod
    def rectangle(cls, xmin, ymin, xmax, ymax) -> "ConvexPolygon":
        return cls(((xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)))

    @classmethod
    def hull(cls, points) -> "ConvexPolygon":
        pts = np.asarray(points, dtype=float)
        h = ConvexHull(pts)
        return cls(tuple(map(tuple, pts[h.vertices])))  # scipy returns 2D hulls counterclockwise

    def translated(self, dx: float, dy: float) -> "ConvexPolygon":
        return ConvexPolygon(tuple((x + dx, y + dy) for x, y in self.vertices))

    def mapped(self, sx: float, ox: float) -> "ConvexPolygon":
        v = [(sx * x + ox, y) for x, y in self.vertices]
        return ConvexPolygon(tuple(v if sx > 0 else v[::-1]))

    def to_dict(self) -> dict:
        return {"type": "polygon", "vertices": [list(p) for p in self.vertices]}


Shape2D = Union[Circle, ConvexPolygon]


def _point_segment_distance(p, a, b):
    """Distance from points ``p`` (..., 2) to segments a-b (..., 2)."""
    ab = b - a
    denom = np.maximum(np.sum(ab * ab, axis=-1), 1e-300)
    t = np.clip(np.sum((p - a) * ab, axis=-1) / denom, 0.0, 1.0)
    d = p - (a + t[..., None] * ab)
    return np.sqrt(np.sum(d * d, axis=-1))


def _segment_polygon_distance(a, b, poly: np.ndarray):
    """Signed distance between segments a-b (..., 2) and a convex polygon.

    Positive: Euclidean gap. Negative: minus the smallest separating-axis
    overlap (penetration depth).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    e = np.roll(poly, -1, axis=0) - poly
    normals = np.stack([e[:, 1], -e[:, 0]], axis=-1)
    normals /= np.linalg.norm(normals, axis=-1, keepdims=True)
    seg = b - a
    sn = np.stack([-seg[..., 1], seg[..., 0]], axis=-1)
    sn_len = np.linalg.norm(sn, axis=-1, keepdims=True)
    sn = np.where(sn_len > 1e-300, sn / np.maximum(sn_len, 1e-300), np.array([1.0, 0.0]))

    # polygon edge axes: gap between segment and polygon beyond each edge
    pa = a @ normals.T  # (..., m)
    pb = b @ normals.T
    poly_max = np.sum(poly * normals, axis=-1)  # support of polygon along its own outward normals
    gap_edges = np.minimum(pa, pb) - poly_max
    sep = np.max(gap_edges, axis=-1)
    # segment normal axis (both orientations)
    proj_poly = np.einsum("...k,mk->...m", sn, poly)
    s0 = np.sum(a * sn, axis=-1)
    gap_sn = np.maximum(np.min(proj_poly, axis=-1) - s0, s0 - np.max(proj_poly, axis=-1))
    sep = np.maximum(sep, gap_sn)
    # segment direction axis
    sd = np.where(sn_len > 1e-300, seg / np.maximum(sn_len, 1e-300), np.array([0.0, 1.0]))
    proj_poly_d = np.einsum("...k,mk->...m", sd, poly)
    da, db = np.sum(a * sd, axis=-1), np.sum(b * sd, axis=-1)
    gap_sd = np.maximum(np.min(proj_poly_d, axis=-1) - np.maximum(da, db), np.minimum(da, db) - np.max(proj_poly_d, axis=-1))
    sep = np.maximum(sep, gap_sd)

    # exact distance when separated: endpoint-to-edge and vertex-to-segment
    q0 = poly
    q1 = np.roll(poly, -1, axis=0)
    d_a = np.min(_point_segment_distance(a[..., None, :], q0, q1), axis=-1)
    d_b = np.min(_point_segment_distance(b[..., None, :], q0, q1), axis=-1)
    d_v = np.min(_point_segment_distance(poly, a[..., None, :], b[..., None, :]), axis=-1)
    dist = np.minimum(np.minimum(d_a, d_b), d_v)
    return np.where(sep > 0, dist, sep)


def segment_clearance(a, b, shape: Shape2D, radius: float = 0.0):
    """Signed clearance between capsules (segment a-b, ``radius``) and a shape."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if isinstance(shape, Circle):
        d = _point_segment_distance(np.asarray(shape.center), a, b) - shape.radius
    else:
        d = _segment_polygon_distance(a, b, shape.array)
    return d - radius


def closest_points(a, b, shape: Shape2D):
    """Closest point on the segment a-b and on the shape boundary, 2D."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if isinstance(shape, Circle):
        c = np.asarray(shape.center)
        ab = b - a
        t = np.clip(np.dot(c - a, ab) / max(np.dot(ab, ab), 1e-300), 0.0, 1.0)
        p = a + t * ab
        d = p - c
        n = d / max(np.linalg.norm(d), 1e-300)
        return p, c + shape.radius * n
    poly = shape.array
    best = None
    q1 = np.roll(poly, -1, axis=0)
    for end in (a, b):
        ab = q1 - poly
        t = np.clip(np.sum((end - poly) * ab, axis=1) / np.sum(ab * ab, axis=1), 0.0, 1.0)
        proj = poly + t[:, None] * ab
        dd = np.linalg.norm(proj - end, axis=1)
        k = int(np.argmin(dd))
        if best is None or dd[k] < best[0]:
            best = (dd[k], end, proj[k])
    ab = b - a
    for v in poly:
        t = np.clip(np.dot(v - a, ab) / max(np.dot(ab, ab), 1e-300), 0.0, 1.0)
        p = a + t * ab
        dd = np.linalg.norm(p - v)
        if dd < best[0]:
            best = (dd, p, v)
    return best[1], best[2]


# --------------------------------------------------------------------------
# 3D primitives


@dataclass(frozen=True)
class Sphere:
    center: Tuple[float, float, float]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(map(float, self.center)))
        if not self.radius > 0:
            raise ValidationError("sphere radius must be positive")

    def translated(self, d) -> "Sphere":
        return Sphere(tuple(np.add(self.center, d)), self.radius)

    def to_dict(self) -> dict:
        return {"type": "sphere", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Cylinder:
    """Finite solid cylinder, approximated by a prism with ``sides`` faces."""

    center: Tuple[float, float, float]
    axis: Tuple[float, float, float]
    radius: float
    length: float
    sides: int = 64

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(map(float, self.center)))
        ax = np.asarray(self.axis, dtype=float)
        n = np.linalg.norm(ax)
        if ax.shape != (3,) or not n > 0:
            raise ValidationError("cylinder axis must be a non-zero 3-vector")
        object.__setattr__(self, "axis", tuple(map(float, ax / n)))
        if not (self.radius > 0 and self.length > 0) or self.sides < 8:
            raise ValidationError("cylinder needs positive radius and length, and >= 8 sides")

    def translated(self, d) -> "Cylinder":
        return Cylinder(tuple(np.add(self.center, d)), self.axis, self.radius, self.length, self.sides)

    def vertices(self) -> np.ndarray:
        ax = np.asarray(self.axis)
        helper = np.array([1.0, 0.0, 0.0]) if abs(ax[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = np.cross(ax, helper)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(ax, e1)
        ang = 2 * np.pi * np.arange(self.sides) / self.sides
        ring = self.radius * (np.cos(ang)[:, None] * e1 + np.sin(ang)[:, None] * e2)
        c = np.asarray(self.center)
        h = 0.5 * self.length * ax
        return np.concatenate([c - h + ring, c + h + ring])

    def edges(self):
        n = self.sides
        idx = np.arange(n)
        nxt = (idx + 1) % n
        return np.concatenate([
            np.stack([idx, nxt], 1),
            np.stack([idx + n, nxt + n], 1),
            np.stack([idx, idx + n], 1),
        ])

    def to_dict(self) -> dict:
        return {
            "type": "cylinder",
            "center": list(self.center),
            "axis": list(self.axis),
            "radius": self.radius,
            "length": self.length,
        }


@dataclass(frozen=True)
class Prism:
    """A planar shape in the hand's x-z plane, extruded along y without end."""

    profile: Shape2D

    def translated(self, d) -> "Prism":
        p = self.profile
        return Prism(p.translated(d[0], d[2]))

    def to_dict(self) -> dict:
        return {"type": "planar", "profile": self.profile.to_dict()}


Object3D = Union[Sphere, Cylinder, Prism]


def slab_section(obj: Object3D, base, u, t, half_width: float):
    """Projection of the object's part within the finger slab onto the flexion plane.

    The plane passes through ``base`` and is spanned by ``u`` and +z; ``t`` is
    its normal. Returns a planar shape in (a, b) coordinates, or None when the
    object misses the slab.
    """
    base = np.asarray(base, dtype=float)
    u = np.asarray(u, dtype=float)
    t = np.asarray(t, dtype=float)
    z = np.array([0.0, 0.0, 1.0])
    if isinstance(obj, Sphere):
        d = np.asarray(obj.center) - base
        lat = float(d @ t)
        nearest = max(abs(lat) - half_width, 0.0)
        if nearest >= obj.radius:
            return None
        return Circle((float(d @ u), float(d @ z)), math.sqrt(obj.radius**2 - nearest**2))
    if isinstance(obj, Prism):
        if abs(u[1]) > 1e-12:
            raise ValidationError("planar objects need flexion planes parallel to the x-z plane")
        # a = (x - base_x) / u_x with u_x = +-1
        sx = 1.0 / u[0]
        return obj.profile.mapped(sx, -base[0] * sx).translated(0.0, -base[2])
    if isinstance(obj, Cylinder):
        v = obj.vertices() - base
        lat = v @ t
        pts = [v[np.abs(lat) <= half_width]]
        e = obj.edges()
        la, lb = lat[e[:, 0]], lat[e[:, 1]]
        for s in (-half_width, half_width):
            cross = (la - s) * (lb - s) < 0
            if np.any(cross):
                w = (s - la[cross]) / (lb[cross] - la[cross])
                pts.append(v[e[cross, 0]] + w[:, None] * (v[e[cross, 1]] - v[e[cross, 0]]))
        # faces crossing the slab without any edge inside it are impossible for a prism of >= 8 sides
        pts = np.concatenate(pts)
        if len(pts) < 3:
            return None
        plane = np.stack([pts @ u, pts @ z], axis=1)
        try:
            return ConvexPolygon.hull(plane)
        except Exception:
            return None
    raise ValidationError(f"unsupported object {type(obj).__name__}")


def object_from_dict(d: dict) -> Object3D:
    kind = d.get("type")
    if kind == "sphere":
        if "diameter" in d:
            return Sphere(d.get("center", (0, 0, 0)), 0.5 * float(d["diameter"]))
        return Sphere(d.get("center", (0, 0, 0)), float(d["radius"]))
    if kind == "cylinder":
        r = 0.5 * float(d["diameter"]) if "diameter" in d else float(d["radius"])
        return Cylinder(d.get("center", (0, 0, 0)), d.get("axis", (0, 1, 0)), r, float(d["length"]))
    if kind == "planar":
        return Prism(shape2d_from_dict(d["profile"]))
    raise ValidationError(f"unknown object type {kind!r}")


def shape2d_from_dict(d: dict) -> Shape2D:
    kind = d.get("type")
    if kind == "circle":
        return Circle(tuple(d["center"]), float(d["radius"]))
    if kind == "polygon":
        return ConvexPolygon(tuple(map(tuple, d["vertices"])))
    if kind == "rectangle":
        return ConvexPolygon.rectangle(*map(float, (d["xmin"], d["zmin"], d["xmax"], d["zmax"])))
    raise ValidationError(f"unknown planar shape {kind!r}")
