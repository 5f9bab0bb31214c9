"""Rotations, rigid transforms and ZYX angle conversions.

Vectors are plain ``numpy`` arrays of shape ``(3,)``; rotation matrices are
``(3, 3)`` arrays whose columns are the body axes expressed in the world
frame.  Homogeneous transforms are ``(4, 4)`` arrays with bottom row
``(0, 0, 0, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ORTHO_TOL = 1e-9
# |v . X| above which the complement is seeded from the global Y axis instead.
SEED_SWITCH = 0.9

_EX = np.array([1.0, 0.0, 0.0])
_EY = np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True)
class EulerZYX:
    """Yaw, pitch and roll in radians.

    Positive pitch raises the nose, i.e. it is a rotation about the body
    ``-y`` axis.
    """

    yaw: float
    pitch: float
    roll: float

    @classmethod
    def from_degrees(cls, yaw: float, pitch: float, roll: float) -> "EulerZYX":
        return cls(math.radians(yaw), math.radians(pitch), math.radians(roll))

    def degrees(self) -> tuple[float, float, float]:
        return (math.degrees(self.yaw), math.degrees(self.pitch), math.degrees(self.roll))


def rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def skew(v) -> np.ndarray:
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / n


def euler_to_frame(angles: EulerZYX) -> np.ndarray:
    """Frame ``[T Y U]`` for ZYX angles: ``Rz(yaw) Ry(-pitch) Rx(roll)``."""
    return rot_z(angles.yaw) @ rot_y(-angles.pitch) @ rot_x(angles.roll)


def frame_to_euler(R: np.ndarray) -> EulerZYX:
    """Inverse of :func:`euler_to_frame`; undefined at ``|pitch| = pi/2``."""
    pitch = math.asin(max(-1.0, min(1.0, R[2, 0])))
    yaw = math.atan2(R[1, 0], R[0, 0])
    roll = math.atan2(R[2, 1], R[2, 2])
    return EulerZYX(yaw, pitch, roll)


def axis_angle_exp(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation about a unit ``axis`` by ``angle`` radians."""
    a = np.asarray(axis, dtype=float)
    if abs(np.linalg.norm(a) - 1.0) > ORTHO_TOL:
        raise ValueError(f"rotation axis must be unit length, got norm {np.linalg.norm(a)!r}")
    K = skew(a)
    return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)


def orthonormal_complement(v) -> np.ndarray:
    """Unit vector perpendicular to unit ``v`` by Gram-Schmidt on a global axis."""
    v = np.asarray(v, dtype=float)
    seed = _EY if abs(v @ _EX) > SEED_SWITCH else _EX
    w = seed - (seed @ v) * v
    return w / np.linalg.norm(w)


def orthonormality_error(R: np.ndarray) -> float:
    return float(np.linalg.norm(R.T @ R - np.eye(3)))


def is_rotation(R: np.ndarray, tol: float = ORTHO_TOL) -> bool:
    return orthonormality_error(R) <= tol and abs(np.linalg.det(R) - 1.0) <= tol


def reorthonormalize(R: np.ndarray) -> np.ndarray:
    """Closest rotation matrix (polar factor) to ``R``."""
    U, _, Vt = np.linalg.svd(R)
    Q = U @ Vt
    if np.linalg.det(Q) < 0.0:
        U[:, -1] *= -1.0
        Q = U @ Vt
    return Q


def homogeneous(R: np.ndarray, p) -> np.ndarray:
    H = np.eye(4)
    H[:3, :3] = R
    H[:3, 3] = p
    return H


def rotation_angle_about(Q: np.ndarray, axis: np.ndarray) -> np.ndarray:
    """Angle of rotation(s) ``Q`` (``(..., 3, 3)``) assumed to be about unit ``axis``."""
    vee = np.stack(
        [Q[..., 2, 1] - Q[..., 1, 2], Q[..., 0, 2] - Q[..., 2, 0], Q[..., 1, 0] - Q[..., 0, 1]],
        axis=-1,
    )
    tr = Q[..., 0, 0] + Q[..., 1, 1] + Q[..., 2, 2]
    return np.arctan2(0.5 * (vee @ axis), 0.5 * (tr - 1.0))
