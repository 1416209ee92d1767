import math

import numpy as np
import pytest

from tendongrip.errors import DomainError, ValidationError
from tendongrip.geometry import (
    HandPose,
    closing_tip_heights,
    configure_mode,
    default_table_height,
    finger_frame,
    finger_points,
    fingertip_positions,
    fingertip_track,
    link_points,
    meeting_height,
    precision_state,
    sweep_palm,
    unhindered_state,
)
from tendongrip.types import ROLES, FingerRole, GraspMode, JointState, LockState


def _rot_z(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def test_rest_tip_distance_closed_form(hand):
    tips = fingertip_positions(HandPose.at_rest(hand))
    d = np.linalg.norm(tips[ROLES.index(FingerRole.A_LEFT)] - tips[ROLES.index(FingerRole.A_RIGHT)])
    # straight fingers splayed 30 deg out from bases sqrt(R^2 - e^2) off the palm axis, 2e apart sideways
    reach = math.sqrt(30.0**2 - 10.0**2) + 95.0 * math.sin(math.radians(30.0))
    assert d == pytest.approx(math.hypot(2 * reach, 20.0), rel=1e-12)
    assert d == pytest.approx(140.0, rel=0.1)


def test_straight_finger_reaches_full_length(hand):
    pts = finger_points(hand, FingerRole.A_LEFT, JointState(0.0, 0.0))
    assert np.linalg.norm(pts[2] - pts[0]) == pytest.approx(95.0, rel=1e-12)
    assert np.linalg.norm(pts[1] - pts[0]) == pytest.approx(50.0, rel=1e-12)
    frame = finger_frame(hand, FingerRole.A_LEFT)
    direction = (pts[2] - pts[0]) / 95.0
    assert np.allclose(direction, math.sin(frame.tilt) * frame.u - math.cos(frame.tilt) * np.array([0, 0, 1]))


@pytest.mark.parametrize("mode", list(GraspMode))
def test_pose_is_point_symmetric_about_palm_axis(hand, mode):
    h = configure_mode(hand, mode)
    s = JointState(0.3, 0.4) if not h.locked else JointState(0.3, 0.0)
    tips = fingertip_positions(HandPose(h, (s,) * 4))
    R = _rot_z(math.pi)
    for left, right in ((FingerRole.A_LEFT, FingerRole.A_RIGHT), (FingerRole.B_LEFT, FingerRole.B_RIGHT)):
        assert np.allclose(R @ tips[ROLES.index(left)], tips[ROLES.index(right)], atol=1e-9)


def test_link_points_vectorised(finger_a):
    q1 = np.array([0.0, 0.5])
    q2 = np.array([0.1, 1.0])
    j2, tip = link_points(finger_a, 0.0, q1, q2)
    for k in range(2):
        j2k, tipk = link_points(finger_a, 0.0, q1[k], q2[k])
        assert np.allclose(j2[k], j2k) and np.allclose(tip[k], tipk)


def test_sweep_zero_is_identity(hand):
    assert sweep_palm(hand, 0.0) == hand
    with pytest.raises(DomainError):
        sweep_palm(hand, -0.1)


def test_b_tip_traces_circle(hand):
    radii = []
    for phi in np.linspace(0.0, hand.phi_max, 100):
        tip = fingertip_positions(HandPose.at_rest(sweep_palm(hand, phi), 0.0))[ROLES.index(FingerRole.B_LEFT)]
        radii.append(math.hypot(tip[0], tip[1]))
    assert np.ptp(radii) < 1e-9


def test_lock_survives_only_at_limit(hand):
    locked = configure_mode(hand, GraspMode.PRECISION)
    assert sweep_palm(locked, hand.phi_max).locked
    assert sweep_palm(locked, 0.5).lock_state is LockState.UNLOCKED


def test_configure_mode(hand):
    assert configure_mode(hand, "spherical").palm_rotation == 0.0
    cyl = configure_mode(hand, "cylindrical")
    assert cyl.palm_rotation == hand.phi_max and not cyl.locked
    assert configure_mode(hand, "precision").locked


def test_partners_side_by_side_when_rotated(hand):
    h = configure_mode(hand, "cylindrical")
    a, b = finger_frame(h, FingerRole.A_LEFT), finger_frame(h, FingerRole.B_LEFT)
    assert np.allclose(a.u, b.u) and np.linalg.norm(a.base - b.base) == pytest.approx(2 * h.lateral_offset)


def test_table_height_definition(hand):
    for mode in GraspMode:
        z = default_table_height(hand, mode)
        zs = closing_tip_heights(hand, mode)
        assert zs.min() - 10.0 == pytest.approx(z)


def test_pose_validation(hand):
    locked = configure_mode(hand, GraspMode.PRECISION)
    with pytest.raises(ValidationError):
        HandPose(locked, (JointState(0.1, 0.0), JointState(0.2, 0.0), JointState(0.1, 0.0), JointState(0.1, 0.0)))
    with pytest.raises(ValidationError):
        HandPose(hand, (JointState(2.0, 0.0),) * 4)
    with pytest.raises(ValidationError):
        HandPose(hand, (JointState(0.0, 0.0),) * 3)


def test_placement_transform(hand):
    T = np.eye(4)
    T[:3, 3] = (1.0, 2.0, 3.0)
    pose = HandPose(hand, tuple(hand.finger(r).rest_state for r in ROLES), 0.0, T)
    base = HandPose(hand, pose.joint_states, 0.0)
    assert np.allclose(fingertip_positions(pose) - fingertip_positions(base), [1.0, 2.0, 3.0])


def test_unhindered_state_ends(finger_a):
    assert unhindered_state(finger_a, 0.0) == finger_a.rest_state
    assert unhindered_state(finger_a, 1e6) == finger_a.max_flexion_state


def test_precision_state_holds_distal(finger_a):
    s = precision_state(finger_a, 2.0, 0.0)
    assert s.q2 == 0.0 and s.q1 > finger_a.rest_state.q1


def test_meeting_heights(hand):
    sph = meeting_height(hand, GraspMode.SPHERICAL)
    cyl = meeting_height(hand, GraspMode.CYLINDRICAL)
    assert 0 < sph < cyl
    with pytest.raises(DomainError):
        meeting_height(hand, GraspMode.PRECISION)


def test_zero_offset_narrows_meeting_gap(hand):
    # the heights do not coincide at zero offset (B fingers keep their own link split), but move closer
    h0 = hand.replace(lateral_offset=0.0)
    gap = meeting_height(hand, "cylindrical") - meeting_height(hand, "spherical")
    gap0 = meeting_height(h0, "cylindrical") - meeting_height(h0, "spherical")
    assert abs(gap0) < abs(gap)


def test_identical_fingers_zero_offset_still_meet_lower_in_spherical(hand):
    # neighbours 60 and 120 deg apart touch before the antipodal pairs do
    fingers = tuple(f.replace(proximal_length=50.0, distal_length=45.0) for f in hand.fingers)
    h = hand.replace(fingers=fingers, lateral_offset=0.0)
    assert meeting_height(h, "spherical") < meeting_height(h, "cylindrical")


def test_fingertip_track_rows(hand):
    rows = fingertip_track(hand, "spherical", steps=5)
    assert len(rows) == 20 and rows[0][0] == 0.0
