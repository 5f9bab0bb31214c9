import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dubins3d.geom import (
    EulerZYX,
    axis_angle_exp,
    euler_to_frame,
    frame_to_euler,
    homogeneous,
    is_rotation,
    orthonormal_complement,
    reorthonormalize,
    rotation_angle_about,
)

angles = st.floats(-math.pi, math.pi, allow_nan=False)
unit_vectors = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3).filter(lambda v: np.linalg.norm(v) > 0.1).map(
    lambda v: np.array(v) / np.linalg.norm(v)
)


def elementary(axis, a):
    c, s = math.cos(a), math.sin(a)
    if axis == "x":
        return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])
    if axis == "y":
        return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def test_identity_angles_give_identity():
    assert np.allclose(euler_to_frame(EulerZYX(0, 0, 0)), np.eye(3), atol=1e-15)


def test_quarter_yaw_axes():
    R = euler_to_frame(EulerZYX(math.pi / 2, 0, 0))
    assert np.allclose(R[:, 0], [0, 1, 0], atol=1e-15)
    assert np.allclose(R[:, 1], [-1, 0, 0], atol=1e-15)
    assert np.allclose(R[:, 2], [0, 0, 1], atol=1e-15)


def test_frame_matches_elementary_composition():
    y, p, r = map(math.radians, (30, 10, 15))
    expected = elementary("z", y) @ elementary("y", -p) @ elementary("x", r)
    assert np.allclose(euler_to_frame(EulerZYX(y, p, r)), expected, atol=1e-14)


def test_positive_pitch_climbs():
    R = euler_to_frame(EulerZYX.from_degrees(0, 10, 0))
    assert R[2, 0] > 0


@settings(max_examples=200, deadline=None)
@given(angles, st.floats(-1.5, 1.5), angles)
def test_euler_round_trip(yaw, pitch, roll):
    R = euler_to_frame(EulerZYX(yaw, pitch, roll))
    assert is_rotation(R)
    R2 = euler_to_frame(frame_to_euler(R))
    assert np.linalg.norm(R - R2) <= 1e-9


def test_axis_angle_examples():
    assert np.allclose(axis_angle_exp([0, 0, 1], math.pi / 2) @ [1, 0, 0], [0, 1, 0], atol=1e-15)
    assert np.allclose(axis_angle_exp([0.6, 0.8, 0.0], 0.0), np.eye(3))
    perm = axis_angle_exp(np.ones(3) / math.sqrt(3), 2 * math.pi / 3)
    assert np.allclose(perm, [[0, 0, 1], [1, 0, 0], [0, 1, 0]], atol=1e-12)


def test_axis_angle_rejects_non_unit_axis():
    with pytest.raises(ValueError):
        axis_angle_exp([1.0, 1.0, 0.0], 0.3)


@settings(max_examples=200, deadline=None)
@given(unit_vectors, angles, angles)
def test_same_axis_rotations_add(axis, a, b):
    lhs = axis_angle_exp(axis, a) @ axis_angle_exp(axis, b)
    assert np.linalg.norm(lhs - axis_angle_exp(axis, a + b)) <= 1e-9
    assert is_rotation(lhs)


def test_orthonormal_complement_seeds():
    assert np.allclose(orthonormal_complement([0, 0, 1]), [1, 0, 0])
    assert np.allclose(orthonormal_complement([1, 0, 0]), [0, 1, 0])


@settings(max_examples=300, deadline=None)
@given(unit_vectors)
def test_orthonormal_complement_is_perpendicular(v):
    w = orthonormal_complement(v)
    assert abs(w @ v) <= 1e-12
    assert abs(np.linalg.norm(w) - 1) <= 1e-12


def test_reorthonormalize_projects_to_rotation(rng):
    R = euler_to_frame(EulerZYX(0.3, 0.2, -0.1)) + 1e-6 * rng.standard_normal((3, 3))
    Q = reorthonormalize(R)
    assert is_rotation(Q)
    assert np.linalg.norm(Q - R) < 1e-5


def test_homogeneous_bottom_row():
    H = homogeneous(np.eye(3), [1, 2, 3])
    assert np.array_equal(H[3], [0, 0, 0, 1])
    assert np.array_equal(H[:3, 3], [1, 2, 3])


@settings(max_examples=100, deadline=None)
@given(unit_vectors, st.floats(-3.1, 3.1))
def test_rotation_angle_about_recovers_angle(axis, a):
    assert rotation_angle_about(axis_angle_exp(axis, a), axis) == pytest.approx(a, abs=1e-12)
