"""Rotation-minimizing-frame vehicle model.

The vehicle state is a position ``X`` plus the frame ``R = [T Y U]``.  Along
arc length, with constant curvatures ``(kappa_g, kappa_n)``::

    X' = T,  T' = kappa_g Y + kappa_n U,  Y' = -kappa_g T,  U' = -kappa_n T

which has the closed-form solution ``H_end = H_start @ segment_transform(...)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geom import EulerZYX, euler_to_frame, homogeneous, is_rotation, reorthonormalize

# Curvature magnitudes below this are treated as a straight segment.
K_EPS = 1e-10
BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class VehicleParams:
    """Minimum pitch and yaw turn radii in meters."""

    r_pitch: float
    r_yaw: float

    def __post_init__(self):
        for name in ("r_pitch", "r_yaw"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")

    @property
    def kappa_n_max(self) -> float:
        return 1.0 / self.r_pitch

    @property
    def kappa_g_max(self) -> float:
        return 1.0 / self.r_yaw

    @property
    def saturated_radius(self) -> float:
        """Turn radius with both curvatures at their bounds."""
        return 1.0 / math.hypot(self.kappa_g_max, self.kappa_n_max)

    @property
    def default_step(self) -> float:
        return min(self.r_pitch, self.r_yaw) / 50.0


@dataclass(frozen=True)
class CurvaturePair:
    kappa_g: float
    kappa_n: float

    @property
    def K(self) -> float:
        return math.hypot(self.kappa_g, self.kappa_n)

    def check(self, params: VehicleParams) -> None:
        if abs(self.kappa_g) > params.kappa_g_max + BOUND_SLACK:
            raise ValueError(f"|kappa_g|={abs(self.kappa_g)} exceeds 1/R_yaw={params.kappa_g_max}")
        if abs(self.kappa_n) > params.kappa_n_max + BOUND_SLACK:
            raise ValueError(f"|kappa_n|={abs(self.kappa_n)} exceeds 1/R_pitch={params.kappa_n_max}")


# label -> (sign of kappa_g, sign of kappa_n)
PRIMITIVE_SIGNS = {
    "L_si": (1, 1),
    "R_si": (-1, 1),
    "L_so": (1, -1),
    "R_so": (-1, -1),
    "G_si": (0, 1),
    "G_so": (0, -1),
    "L_p": (1, 0),
    "R_p": (-1, 0),
    "S": (0, 0),
}


@dataclass(frozen=True)
class MotionPrimitive:
    label: str
    curvatures: CurvaturePair


def motion_primitive(label: str, params: VehicleParams) -> MotionPrimitive:
    sg, sn = PRIMITIVE_SIGNS[label]
    return MotionPrimitive(label, CurvaturePair(sg * params.kappa_g_max, sn * params.kappa_n_max))


def motion_primitives(params: VehicleParams) -> list[MotionPrimitive]:
    return [motion_primitive(label, params) for label in PRIMITIVE_SIGNS]


@dataclass(frozen=True)
class Configuration:
    """Position ``X`` and frame ``R`` whose columns are ``T, Y, U``."""

    X: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "X", np.asarray(self.X, dtype=float).reshape(3))
        object.__setattr__(self, "R", np.asarray(self.R, dtype=float).reshape(3, 3))

    @classmethod
    def from_euler(cls, position, angles: EulerZYX) -> "Configuration":
        return cls(np.asarray(position, dtype=float), euler_to_frame(angles))

    @classmethod
    def from_degrees(cls, position, yaw: float, pitch: float, roll: float) -> "Configuration":
        return cls.from_euler(position, EulerZYX.from_degrees(yaw, pitch, roll))

    @classmethod
    def from_matrix(cls, H: np.ndarray) -> "Configuration":
        return cls(H[:3, 3].copy(), H[:3, :3].copy())

    @property
    def T(self) -> np.ndarray:
        return self.R[:, 0]

    @property
    def Y(self) -> np.ndarray:
        return self.R[:, 1]

    @property
    def U(self) -> np.ndarray:
        return self.R[:, 2]

    def matrix(self) -> np.ndarray:
        return homogeneous(self.R, self.X)

    def is_valid(self, tol: float = 1e-9) -> bool:
        return is_rotation(self.R, tol) and bool(np.all(np.isfinite(self.X)))

    def distance(self, other: "Configuration") -> tuple[float, float]:
        """Position error (m) and frame Frobenius error to ``other``."""
        return (
            float(np.linalg.norm(self.X - other.X)),
            float(np.linalg.norm(self.R - other.R)),
        )


@dataclass(frozen=True)
class SphereChoice:
    """Tangent sphere at one endpoint: ``delta_io`` (inner +1 / outer -1) or ``delta_lr`` (left +1 / right -1)."""

    delta_io: int = 0
    delta_lr: int = 0

    def __post_init__(self):
        if self.delta_io not in (-1, 0, 1) or self.delta_lr not in (-1, 0, 1):
            raise ValueError("sphere flags must be -1, 0 or +1")
        if (self.delta_io == 0) == (self.delta_lr == 0):
            raise ValueError("exactly one of delta_io, delta_lr must be nonzero")

    @property
    def is_pitch(self) -> bool:
        return self.delta_io != 0

    @property
    def delta(self) -> int:
        """The nonzero flag."""
        return self.delta_io if self.is_pitch else self.delta_lr

    @property
    def name(self) -> str:
        if self.is_pitch:
            return "inner" if self.delta_io > 0 else "outer"
        return "left" if self.delta_lr > 0 else "right"

    def radius(self, params: VehicleParams) -> float:
        return params.r_pitch if self.is_pitch else params.r_yaw

    def flipped(self) -> "SphereChoice":
        return SphereChoice(-self.delta_io, -self.delta_lr)

    @classmethod
    def named(cls, name: str) -> "SphereChoice":
        return {
            "inner": cls(1, 0),
            "outer": cls(-1, 0),
            "left": cls(0, 1),
            "right": cls(0, -1),
        }[name]


@dataclass(frozen=True)
class SphereSelection:
    """Sphere flags at both endpoints."""

    initial: SphereChoice
    final: SphereChoice

    @classmethod
    def from_flags(cls, delta_io_initial, delta_lr_initial, delta_io_final, delta_lr_final):
        return cls(
            SphereChoice(delta_io_initial, delta_lr_initial),
            SphereChoice(delta_io_final, delta_lr_final),
        )

    @property
    def same_type(self) -> bool:
        return self.initial == self.final

    @property
    def opposite_type(self) -> bool:
        return self.initial == self.final.flipped()


def tangent_sphere_center(config: Configuration, choice: SphereChoice, params: VehicleParams) -> np.ndarray:
    """Center ``X + d_io R_pitch U + d_lr R_yaw Y`` of the selected tangent sphere."""
    if not isinstance(choice, SphereChoice):
        raise TypeError("choice must be a SphereChoice")
    return config.X + choice.delta_io * params.r_pitch * config.U + choice.delta_lr * params.r_yaw * config.Y


def segment_transform(curv: CurvaturePair, arc_length: float, params: VehicleParams | None = None) -> np.ndarray:
    """Local 4x4 transform after ``arc_length`` at constant curvatures."""
    if arc_length < 0.0 or not math.isfinite(arc_length):
        raise ValueError(f"arc_length must be finite and >= 0, got {arc_length!r}")
    if params is not None:
        curv.check(params)
    kg, kn = curv.kappa_g, curv.kappa_n
    K = curv.K
    if K < K_EPS:
        H = np.eye(4)
        H[0, 3] = arc_length
        return H
    phi = arc_length * K
    c, s = math.cos(phi), math.sin(phi)
    # 1 - cos(phi) without cancellation at small phi
    omc = 2.0 * math.sin(0.5 * phi) ** 2
    K2 = K * K
    return np.array(
        [
            [c, -kg * s / K, -kn * s / K, s / K],
            [kg * s / K, (kn * kn + c * kg * kg) / K2, -kg * kn * omc / K2, kg * omc / K2],
            [kn * s / K, -kg * kn * omc / K2, (kg * kg + kn * kn * c) / K2, kn * omc / K2],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def segment_transforms(kappa_g: float, kappa_n: float, arc_lengths: np.ndarray) -> np.ndarray:
    """Vectorized :func:`segment_transform` over many arc lengths, shape ``(n, 4, 4)``."""
    s = np.asarray(arc_lengths, dtype=float)
    H = np.zeros(s.shape + (4, 4))
    H[..., 3, 3] = 1.0
    K = math.hypot(kappa_g, kappa_n)
    if K < K_EPS:
        H[..., 0, 0] = H[..., 1, 1] = H[..., 2, 2] = 1.0
        H[..., 0, 3] = s
        return H
    kg, kn, K2 = kappa_g, kappa_n, K * K
    c, sn = np.cos(s * K), np.sin(s * K)
    omc = 2.0 * np.sin(0.5 * s * K) ** 2
    H[..., 0, 0] = c
    H[..., 0, 1] = -kg * sn / K
    H[..., 0, 2] = -kn * sn / K
    H[..., 0, 3] = sn / K
    H[..., 1, 0] = kg * sn / K
    H[..., 1, 1] = (kn * kn + c * kg * kg) / K2
    H[..., 1, 2] = -kg * kn * omc / K2
    H[..., 1, 3] = kg * omc / K2
    H[..., 2, 0] = kn * sn / K
    H[..., 2, 1] = -kg * kn * omc / K2
    H[..., 2, 2] = (kg * kg + kn * kn * c) / K2
    H[..., 2, 3] = kn * omc / K2
    return H


def verify_sphere_membership(curv: CurvaturePair, params: VehicleParams, n_samples: int = 721) -> float:
    """Max distance of a full-period segment from its tangent sphere.

    Uses the pitch sphere when ``|kappa_n|`` is saturated, otherwise the yaw
    sphere (which then requires ``|kappa_g|`` saturated).
    """
    tol = 1e-12
    if abs(abs(curv.kappa_n) - params.kappa_n_max) <= tol * params.kappa_n_max:
        radius = params.r_pitch
        center = np.array([0.0, 0.0, math.copysign(radius, curv.kappa_n)])
    elif abs(abs(curv.kappa_g) - params.kappa_g_max) <= tol * params.kappa_g_max:
        radius = params.r_yaw
        center = np.array([0.0, math.copysign(radius, curv.kappa_g), 0.0])
    else:
        raise ValueError("neither curvature is saturated; no tangent sphere applies")
    phi = np.linspace(0.0, 2.0 * math.pi, n_samples)
    H = segment_transforms(curv.kappa_g, curv.kappa_n, phi / curv.K)
    d = np.linalg.norm(H[:, :3, 3] - center, axis=1)
    return float(np.max(np.abs(d - radius)))


@dataclass
class Trajectory:
    """Arc-length ordered samples: positions ``X (n,3)``, frames ``R (n,3,3)`` and curvatures."""

    s: np.ndarray
    X: np.ndarray
    R: np.ndarray
    kappa_g: np.ndarray
    kappa_n: np.ndarray
    # arc lengths where one piece ends and the next begins
    junctions: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.s)

    def config(self, i: int) -> Configuration:
        return Configuration(self.X[i].copy(), self.R[i].copy())

    @property
    def start(self) -> Configuration:
        return self.config(0)

    @property
    def end(self) -> Configuration:
        return self.config(-1)

    @property
    def length(self) -> float:
        return float(self.s[-1] - self.s[0])

    @classmethod
    def single(cls, config: Configuration) -> "Trajectory":
        return cls(
            np.zeros(1), config.X[None, :].copy(), config.R[None, :, :].copy(), np.zeros(1), np.zeros(1)
        )

    def shifted(self, ds: float) -> "Trajectory":
        return Trajectory(self.s + ds, self.X, self.R, self.kappa_g, self.kappa_n, [j + ds for j in self.junctions])

    @staticmethod
    def concatenate(pieces: list["Trajectory"]) -> "Trajectory":
        """Join pieces end to start; the first sample of each later piece is dropped."""
        s, X, R, kg, kn, junctions = [], [], [], [], [], []
        offset = 0.0
        for i, p in enumerate(pieces):
            q = p.shifted(offset - p.s[0])
            lo = 0 if i == 0 else 1
            if i > 0:
                junctions.append(offset)
            s.append(q.s[lo:])
            X.append(q.X[lo:])
            R.append(q.R[lo:])
            kg.append(q.kappa_g[lo:])
            kn.append(q.kappa_n[lo:])
            junctions.extend(q.junctions)
            offset = q.s[-1]
        return Trajectory(
            np.concatenate(s), np.concatenate(X), np.concatenate(R), np.concatenate(kg), np.concatenate(kn), junctions
        )

    def arc_length(self) -> float:
        """Numeric arc length treating each sample interval as a circular arc."""
        return float(np.sum(interval_arc_lengths(self.X, self.R[:, :, 0])))

    def chord_length(self) -> float:
        return float(np.sum(np.linalg.norm(np.diff(self.X, axis=0), axis=1)))


def interval_arc_lengths(X: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Per-interval arc length from chords and the turn angle between unit tangents."""
    chord = np.linalg.norm(np.diff(X, axis=0), axis=1)
    cosang = np.clip(np.sum(T[:-1] * T[1:], axis=1), -1.0, 1.0)
    half = 0.5 * np.arccos(cosang)
    factor = np.where(half > 1e-8, half / np.sin(np.maximum(half, 1e-300)), 1.0 + half * half / 6.0)
    return chord * factor


def arc_samples(length: float, step: float) -> np.ndarray:
    """``0, step, 2 step, ...`` with the last sample exactly at ``length``."""
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step!r}")
    if length <= 0.0:
        return np.zeros(1)
    n = max(1, math.ceil(length / step - 1e-9))
    s = np.arange(n + 1, dtype=float) * step
    s[-1] = length
    return s[s <= length]


def sample_segment(
    start: Configuration, curv: CurvaturePair, arc_length: float, step: float, params: VehicleParams | None = None
) -> Trajectory:
    """Dense samples of a constant-curvature segment from ``start``."""
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step!r}")
    if arc_length < 0.0:
        raise ValueError("arc_length must be >= 0")
    if params is not None:
        curv.check(params)
    s = arc_samples(arc_length, step)
    H = start.matrix() @ segment_transforms(curv.kappa_g, curv.kappa_n, s)
    R = H[:, :3, :3]
    if len(s) > 1 and np.max(np.abs(np.einsum("nji,njk->nik", R, R) - np.eye(3))) > 1e-9:
        R = np.array([reorthonormalize(r) for r in R])
    n = len(s)
    return Trajectory(s, H[:, :3, 3], R, np.full(n, curv.kappa_g), np.full(n, curv.kappa_n))
