import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tendongrip.errors import DomainError, SingularityError
from tendongrip.tendon import (
    cable_state,
    chord_length,
    cord_length,
    elastic_moment_arm,
    elastic_moment_arm_ratio_form,
    joint_angle_for_tendon,
    tendon_angle,
    tendon_length,
    tendon_moment_arm,
    tendon_moment_arm_equal_offsets,
)
from tendongrip.types import FingerType, JointState, default_finger

A = default_finger(FingerType.A)


def test_chord_examples():
    assert chord_length(4.0, 4.0, 0.0) == 0.0
    assert chord_length(4.0, 4.0, math.pi) == pytest.approx(8.0, abs=1e-12)
    assert float(chord_length(4.0, 4.0, 2.4)) == pytest.approx(4 * math.sqrt(2 * (1 - math.cos(2.4))), rel=1e-12)
    assert float(chord_length(4.0, 4.0, 2.4)) == pytest.approx(8 * math.sin(1.2), rel=1e-12)


def test_tendon_length_at_zero_matches_half_angle_form():
    assert tendon_length(A, 1, 0.0) == pytest.approx(2 * 4 * math.sin(1.2), rel=1e-12)


def test_cord_examples():
    assert cord_length(A, 1, 0.0) == 0.0
    assert cord_length(A, 2, math.pi / 2) == pytest.approx(5 * math.sqrt(2), rel=1e-12)
    assert cord_length(A, 1, math.pi / 3) == pytest.approx(5.0, rel=1e-12)


def test_cord_is_signed_below_zero():
    assert cord_length(A, 1, -math.pi / 6) == pytest.approx(-10 * math.sin(math.pi / 12), rel=1e-12)


def test_moment_arm_examples():
    q = 2.4 - math.pi / 2
    assert tendon_moment_arm(A, 1, q) == pytest.approx(2 * math.sqrt(2), rel=1e-12)
    assert elastic_moment_arm(A, 2, math.pi / 2) == pytest.approx(5 * math.cos(math.pi / 4), rel=1e-12)
    assert elastic_moment_arm_ratio_form(5.0, 0.0) == 5.0


@given(st.floats(-math.pi / 6, math.pi / 3))
def test_general_form_equals_equal_offset_form(q):
    assert tendon_moment_arm(A, 1, q) == pytest.approx(tendon_moment_arm_equal_offsets(4.0, 2.4, q), rel=1e-14)


@given(st.floats(0.01, math.pi / 2))
def test_elastic_closed_form_equals_ratio_form(q):
    assert elastic_moment_arm(A, 2, q) == pytest.approx(elastic_moment_arm_ratio_form(5.0, q), rel=1e-12)


@settings(max_examples=200)
@given(
    st.floats(1.0, 8.0), st.floats(1.0, 8.0), st.floats(1.2, 2.6), st.floats(0.0, 1.0), st.sampled_from([1, 2])
)
def test_moment_arm_is_tendon_derivative(d_prev, d_link, q0, frac, joint):
    # central difference oracle on unequal offsets
    limits = ((-math.pi / 6, 1.0), (0.0, 1.1))
    design = A.replace(
        tendon_offsets=((d_prev, d_link), (d_prev, d_link)), tendon_offset_angles=(q0, q0),
        joint_limits=limits,
    )
    lo, hi = limits[joint - 1]
    q = lo + 1e-5 + frac * (hi - lo - 2e-5)
    h = 1e-6
    fd = (tendon_length(design, joint, q + h) - tendon_length(design, joint, q - h)) / (2 * h)
    assert tendon_moment_arm(design, joint, q) == pytest.approx(abs(fd), rel=1e-6)


@given(st.floats(-math.pi / 6 + 1e-5, math.pi / 3 - 1e-5))
def test_elastic_arm_is_cord_derivative(q):
    h = 1e-6
    fd = (cord_length(A, 1, q + h) - cord_length(A, 1, q - h)) / (2 * h)
    assert elastic_moment_arm(A, 1, q) == pytest.approx(fd, rel=1e-6)


@given(st.floats(-math.pi / 6, math.pi / 3), st.floats(-math.pi / 6, math.pi / 3))
def test_tendon_decreases_with_flexion(a, b):
    if a < b - 1e-9:
        assert tendon_length(A, 1, a) > tendon_length(A, 1, b)


@given(st.floats(0.0, math.pi / 2))
def test_inverse_round_trip(q):
    assert joint_angle_for_tendon(A, 2, tendon_length(A, 2, q)) == pytest.approx(q, abs=1e-9)


def test_tendon_angle_sine_rule():
    q = 0.3
    L = tendon_length(A, 1, q)
    alpha = tendon_angle(A, 1, q)
    assert math.sin(alpha) == pytest.approx(4.0 * math.sin(2.4 - q) / L, rel=1e-12)
    # isosceles routing triangle: base angles are (pi - phi) / 2
    assert alpha == pytest.approx((math.pi - (2.4 - q)) / 2, rel=1e-12)


def test_out_of_limits_rejected():
    with pytest.raises(DomainError):
        tendon_length(A, 2, -0.1)
    with pytest.raises(DomainError):
        cord_length(A, 1, 2.0)


def test_degenerate_triangle():
    design = A.replace(tendon_offset_angles=(2.4, 2.4))
    with pytest.raises(SingularityError):
        tendon_moment_arm_equal_offsets(4.0, 1.0, 1.0)
    assert design.tendon_offset_angles == (2.4, 2.4)


def test_vectorised_matches_scalar():
    qs = np.linspace(0.0, math.pi / 2, 11)
    vec = tendon_length(A, 2, qs)
    assert np.allclose(vec, [tendon_length(A, 2, float(q)) for q in qs], rtol=0, atol=0)


def test_cable_state_at_rest():
    cs = cable_state(A, A.rest_state)
    assert cs.extendable_cord_length == (0.0, 0.0)
    assert cs.retractable_tendon_length[1] == pytest.approx(2 * 4 * math.sin(1.2))
    assert all(m > 0 for m in cs.tendon_moment_arm)
    assert cable_state(A, JointState(0.2, 0.4)).extendable_cord_length[1] > 0
