import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from tendongrip.errors import ValidationError
from tendongrip.shapes import (
    Circle,
    ConvexPolygon,
    Cylinder,
    Prism,
    Sphere,
    closest_points,
    object_from_dict,
    segment_clearance,
    shape2d_from_dict,
    slab_section,
)

SQUARE = ConvexPolygon.rectangle(-1.0, -1.0, 1.0, 1.0)


def _inside(poly: np.ndarray, p: np.ndarray) -> np.ndarray:
    e = np.roll(poly, -1, axis=0) - poly
    rel = p[:, None, :] - poly[None, :, :]
    cross = e[None, :, 0] * rel[..., 1] - e[None, :, 1] * rel[..., 0]
    return np.all(cross >= 0, axis=1)


def _sampled_distance(a, b, poly, n=4000):
    """Dense-sampling oracle: gap between the segment and the polygon, 0 when they meet."""
    s = a + np.linspace(0, 1, n)[:, None] * (b - a)
    if _inside(poly, s).any():
        return 0.0
    q0, q1 = poly, np.roll(poly, -1, axis=0)
    w = np.linspace(0, 1, n // 4)[:, None, None]
    boundary = (q0 + w * (q1 - q0)).reshape(-1, 2)
    # distance from the segment to sampled boundary points, exact per point
    ab = b - a
    t = np.clip(((boundary - a) @ ab) / (ab @ ab), 0, 1)
    return float(np.min(np.linalg.norm(boundary - (a + t[:, None] * ab), axis=1)))


def test_polygon_validation():
    with pytest.raises(ValidationError):
        ConvexPolygon(((0, 0), (0, 1), (1, 1), (1, 0)))  # clockwise
    with pytest.raises(ValidationError):
        ConvexPolygon(((0, 0), (1, 0)))
    with pytest.raises(ValidationError):
        Circle((0, 0), 0.0)


def test_hull_is_counterclockwise():
    rng = np.random.default_rng(3)
    poly = ConvexPolygon.hull(rng.normal(size=(30, 2)))
    assert len(poly.vertices) >= 3


def test_circle_clearance_exact():
    c = Circle((0.0, 5.0), 2.0)
    assert segment_clearance((-3, 0), (3, 0), c) == pytest.approx(3.0)
    assert segment_clearance((-3, 0), (3, 0), c, radius=1.0) == pytest.approx(2.0)
    assert segment_clearance((-3, 4), (3, 4), c) == pytest.approx(-1.0)


def test_square_penetration_depth():
    assert segment_clearance((-3, 0), (3, 0), SQUARE) == pytest.approx(-1.0)
    assert segment_clearance((-3, 0.5), (3, 0.5), SQUARE) == pytest.approx(-0.5)
    assert segment_clearance((2, 2), (3, 3), SQUARE) == pytest.approx(math.sqrt(2))


def test_vectorised_clearance():
    a = np.array([[-3.0, 0.0], [2.0, 2.0]])
    b = np.array([[3.0, 0.0], [3.0, 3.0]])
    out = segment_clearance(a, b, SQUARE)
    assert out.shape == (2,)
    assert out[0] == pytest.approx(-1.0) and out[1] == pytest.approx(math.sqrt(2))


_pt = st.tuples(st.floats(-5, 5), st.floats(-5, 5))


@settings(max_examples=150, deadline=None)
@given(st.lists(_pt, min_size=3, max_size=10), _pt, _pt)
def test_polygon_distance_matches_sampling(cloud, a, b):
    pts = np.array(cloud)
    assume(np.linalg.matrix_rank(pts - pts.mean(0), tol=1e-3) == 2)
    try:
        poly = ConvexPolygon.hull(pts)
    except (ValidationError, Exception):
        assume(False)
    a, b = np.array(a), np.array(b)
    assume(np.linalg.norm(b - a) > 1e-3)
    got = float(segment_clearance(a, b, poly))
    ref = _sampled_distance(a, b, poly.array)
    if ref > 0.05:
        assert got == pytest.approx(ref, abs=0.02)
    elif ref == 0.0:
        assert got <= 1e-9
    if got > 0:
        p, q = closest_points(a, b, poly)
        assert np.linalg.norm(p - q) == pytest.approx(got, abs=1e-9)


def test_closest_points_circle():
    p, q = closest_points(np.array([-3.0, 0.0]), np.array([3.0, 0.0]), Circle((1.0, 5.0), 2.0))
    assert np.allclose(p, [1.0, 0.0]) and np.allclose(q, [1.0, 3.0])


BASE = np.array([0.0, 0.0, 0.0])
U = np.array([1.0, 0.0, 0.0])
T = np.array([0.0, 1.0, 0.0])


@pytest.mark.parametrize("lat,expected", [(0.0, 15.0), (8.0, 15.0), (12.0, math.sqrt(15**2 - 2**2)), (20.0, math.sqrt(15**2 - 10**2))])
def test_sphere_section(lat, expected):
    s = slab_section(Sphere((5.0, lat, -30.0), 15.0), BASE, U, T, 10.0)
    assert s.center == pytest.approx((5.0, -30.0))
    assert s.radius == pytest.approx(expected)


def test_sphere_outside_slab():
    assert slab_section(Sphere((0.0, 26.0, 0.0), 15.0), BASE, U, T, 10.0) is None


def test_cylinder_across_slab_is_a_polygon_disc():
    cyl = Cylinder((0.0, 0.0, -40.0), (0.0, 1.0, 0.0), 12.0, 100.0)
    s = slab_section(cyl, BASE, U, T, 10.0)
    r = np.linalg.norm(np.array(s.vertices) - [0.0, -40.0], axis=1)
    assert np.all(r <= 12.0 + 1e-9) and np.all(r >= 12.0 * math.cos(math.pi / 64) - 1e-9)


def test_cylinder_along_plane_is_a_band():
    cyl = Cylinder((0.0, 0.0, -40.0), (1.0, 0.0, 0.0), 12.0, 60.0)
    s = slab_section(cyl, BASE, U, T, 10.0)
    v = np.array(s.vertices)
    assert v[:, 0].min() == pytest.approx(-30.0) and v[:, 0].max() == pytest.approx(30.0)
    assert v[:, 1].max() - v[:, 1].min() == pytest.approx(24.0, rel=1e-3)


def test_cylinder_missing_slab():
    cyl = Cylinder((0.0, 50.0, -40.0), (1.0, 0.0, 0.0), 12.0, 60.0)
    assert slab_section(cyl, BASE, U, T, 10.0) is None


def test_prism_mirrors_for_inward_frames():
    prism = Prism(ConvexPolygon.rectangle(-5.0, 0.0, 15.0, 2.0))
    left = slab_section(prism, np.array([-20.0, 0.0, 10.0]), -U, -T, 10.0)
    v = np.array(left.vertices)
    # a = (x - base_x) / u_x, b = z - base_z
    assert sorted(set(np.round(v[:, 0], 9))) == [-35.0, -15.0]
    assert sorted(set(np.round(v[:, 1], 9))) == [-10.0, -8.0]


def test_prism_needs_x_aligned_planes():
    prism = Prism(ConvexPolygon.rectangle(-5.0, 0.0, 15.0, 2.0))
    u = np.array([0.5, math.sqrt(3) / 2, 0.0])
    with pytest.raises(ValidationError):
        slab_section(prism, BASE, u, np.cross([0, 0, 1], u), 10.0)


def test_object_parsing():
    assert object_from_dict({"type": "sphere", "diameter": 43}).radius == 21.5
    assert object_from_dict({"type": "sphere", "radius": 5}).radius == 5.0
    cyl = object_from_dict({"type": "cylinder", "diameter": 20, "length": 50, "axis": [0, 0, 2]})
    assert cyl.axis == (0.0, 0.0, 1.0)
    assert isinstance(object_from_dict({"type": "planar", "profile": {"type": "circle", "center": [0, 1], "radius": 1}}), Prism)
    rect = shape2d_from_dict({"type": "rectangle", "xmin": 0, "zmin": 0, "xmax": 2, "zmax": 1})
    assert len(rect.vertices) == 4
    with pytest.raises(ValidationError):
        object_from_dict({"type": "torus"})
    with pytest.raises(ValidationError):
        shape2d_from_dict({"type": "blob"})
