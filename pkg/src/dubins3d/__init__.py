"""Shortest paths between 3D vehicle configurations under bounded pitch and yaw rates."""

from .candidate import CandidatePath, ClassInfeasible
from .cylinder import best_cylinder_path
from .dubins2d import PlanarConfig, PlanarDubinsPath, solve_planar_dubins
from .envelope import best_sphere_envelope_path
from .geom import EulerZYX, axis_angle_exp, euler_to_frame, frame_to_euler
from .plane import best_plane_path
from .planner import PlannerConfig, PlannerInfeasible, PlanResult, ValidationReport, plan, validate_trajectory
from .rmf import (
    Configuration,
    CurvaturePair,
    SphereChoice,
    SphereSelection,
    Trajectory,
    VehicleParams,
    motion_primitive,
    segment_transform,
    tangent_sphere_center,
    verify_sphere_membership,
)
from .sphere import SphericalConfig, SphericalPath, SphericalPathParams, UnsupportedRadius, solve_spherical_dubins

__all__ = [
    "CandidatePath", "ClassInfeasible", "Configuration", "CurvaturePair", "EulerZYX", "PlanarConfig",
    "PlanarDubinsPath", "PlanResult", "PlannerConfig", "PlannerInfeasible", "SphereChoice", "SphereSelection",
    "SphericalConfig", "SphericalPath", "SphericalPathParams", "Trajectory", "UnsupportedRadius",
    "ValidationReport", "VehicleParams", "axis_angle_exp", "best_cylinder_path", "best_plane_path",
    "best_sphere_envelope_path", "euler_to_frame", "frame_to_euler", "motion_primitive", "plan",
    "segment_transform", "solve_planar_dubins", "solve_spherical_dubins", "tangent_sphere_center",
    "validate_trajectory", "verify_sphere_membership",
]
