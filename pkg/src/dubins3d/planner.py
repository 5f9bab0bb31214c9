"""Minimum over the three path classes and all sphere pairings, plus a feasibility audit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .candidate import CandidatePath, ClassInfeasible
from .cylinder import best_cylinder_path
from .cylinder import default_grids as cylinder_grids
from .envelope import best_sphere_envelope_path
from .envelope import default_grids as envelope_grids
from .plane import best_plane_path
from .plane import default_grids as plane_grids
from .rmf import Configuration, SphereChoice, SphereSelection, Trajectory, VehicleParams, interval_arc_lengths
from .sphere import UnsupportedRadius

_S = SphereChoice.named
SAME_TYPE = tuple(SphereSelection(_S(n), _S(n)) for n in ("inner", "outer", "left", "right"))
OPPOSITE_TYPE = (
    SphereSelection(_S("inner"), _S("outer")),
    SphereSelection(_S("outer"), _S("inner")),
    SphereSelection(_S("left"), _S("right")),
    SphereSelection(_S("right"), _S("left")),
)

# class family -> (solver, pairings, default grid builder, parameter ranges)
_CLASSES = {
    "cyc": (best_cylinder_path, SAME_TYPE, cylinder_grids),
    "pl": (best_plane_path, OPPOSITE_TYPE, plane_grids),
    "sphere": (best_sphere_envelope_path, SAME_TYPE, envelope_grids),
}
CLASS_ORDER = ("cyc", "pl", "sphere")
# relative gap to the best grid length within which candidates are refined
REFINE_MARGIN = 0.02


class PlannerInfeasible(RuntimeError):
    pass


@dataclass(frozen=True)
class PlannerConfig:
    """Grid sizes and sampling step.

    ``sphere_phi_disc`` sets the heading grid of the intermediary-sphere
    class separately (defaults to ``phi_disc``); its heading range is
    periodic whereas the other classes use closed intervals.
    """

    theta_disc: int = 15
    phi_disc: int = 15
    step: float | None = None
    refine: bool = False
    sphere_phi_disc: int | None = None

    def __post_init__(self):
        if self.theta_disc < 2 or self.phi_disc < 2:
            raise ValueError("theta_disc and phi_disc must be at least 2")
        if self.sphere_phi_disc is not None and self.sphere_phi_disc < 2:
            raise ValueError("sphere_phi_disc must be at least 2")
        if self.step is not None and not self.step > 0.0:
            raise ValueError("step must be positive")

    def phi_for(self, family: str) -> int:
        if family == "sphere" and self.sphere_phi_disc is not None:
            return self.sphere_phi_disc
        return self.phi_disc

    def nested_refinement(self) -> "PlannerConfig":
        """Grids that contain every point of the current grids.

        Periodic grids double their point count; closed-interval grids go
        from ``m`` to ``2m - 1`` points.
        """
        return replace(
            self,
            theta_disc=2 * self.theta_disc,
            phi_disc=2 * self.phi_disc - 1,
            sphere_phi_disc=2 * self.phi_for("sphere"),
        )


@dataclass
class ClassSummary:
    class_label: str
    feasible: bool
    total_length: float | None = None
    reason: str | None = None
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "class_label": self.class_label,
            "feasible": self.feasible,
            "total_length": self.total_length,
            "reason": self.reason,
            "parameters": dict(self.parameters),
        }


@dataclass
class PlanResult:
    best: CandidatePath
    all_feasible: list

    def __iter__(self):
        return iter((self.best, self.all_feasible))


def _label(family: str, sel: SphereSelection) -> str:
    if family == "pl":
        return f"pl_{sel.initial.name}_{sel.final.name}"
    return f"{family}_{sel.initial.name}"


def _golden_refine(family, start, goal, sel, params, cand: CandidatePath, cfg: PlannerConfig) -> CandidatePath:
    """One coordinate pass of golden-section search around the winning grid point."""
    solver, _, grid_fn = _CLASSES[family]
    grids = grid_fn(cfg.theta_disc, cfg.phi_for(family))
    point = {k: float(cand.parameters[k]) for k in grids}
    best_len = cand.total_length

    def length_at(pt):
        try:
            return solver(start, goal, sel, params, build=False, grids={k: [v] for k, v in pt.items()}).total_length
        except (ClassInfeasible, UnsupportedRadius):
            return math.inf

    g = (math.sqrt(5.0) - 1.0) / 2.0
    for key, values in grids.items():
        h = float(values[1] - values[0]) if len(values) > 1 else 0.0
        lo, hi = point[key] - h, point[key] + h
        if key.startswith("phi") and family != "sphere":
            lo, hi = max(lo, float(values[0])), min(hi, float(values[-1]))
        a, b = lo, hi
        c, d = b - g * (b - a), a + g * (b - a)
        fc, fd = length_at({**point, key: c}), length_at({**point, key: d})
        for _ in range(24):
            if fc <= fd:
                b, d, fd = d, c, fc
                c = b - g * (b - a)
                fc = length_at({**point, key: c})
            else:
                a, c, fc = c, d, fd
                d = a + g * (b - a)
                fd = length_at({**point, key: d})
        x, fx = (c, fc) if fc <= fd else (d, fd)
        if fx < best_len:
            best_len = fx
            point[key] = x
    if best_len < cand.total_length:
        return solver(start, goal, sel, params, build=True, step=cfg.step, grids={k: [v] for k, v in point.items()})
    return cand


def plan(start: Configuration, goal: Configuration, params: VehicleParams, cfg: PlannerConfig | None = None) -> PlanResult:
    """Shortest candidate over all classes and pairings.

    Ties go to the earlier class (cylinder, plane, intermediary sphere) and
    then the earlier pairing (inner, outer, left, right).
    """
    cfg = cfg or PlannerConfig()
    for name, c in (("start", start), ("goal", goal)):
        if not c.is_valid():
            raise ValueError(f"{name} configuration has an invalid frame")
    summaries: list[ClassSummary] = []
    found: list[tuple[CandidatePath, str, SphereSelection, ClassSummary]] = []
    for family in CLASS_ORDER:
        solver, pairings, _ = _CLASSES[family]
        for sel in pairings:
            label = _label(family, sel)
            try:
                cand = solver(start, goal, sel, params, cfg.theta_disc, cfg.phi_for(family), step=cfg.step, build=False)
            except ClassInfeasible as exc:
                summaries.append(ClassSummary(label, False, reason=exc.reason))
                continue
            except UnsupportedRadius:
                summaries.append(ClassSummary(label, False, reason="unsupported_radius"))
                continue
            summary = ClassSummary(label, True, cand.total_length, parameters=dict(cand.parameters))
            summaries.append(summary)
            found.append((cand, family, sel, summary))
    if cfg.refine and found:
        # only candidates near the grid optimum can win after local refinement
        cutoff = min(c.total_length for c, *_ in found) * (1.0 + REFINE_MARGIN)
        for i, (cand, family, sel, summary) in enumerate(found):
            if cand.parameters and cand.total_length <= cutoff:
                cand = _golden_refine(family, start, goal, sel, params, cand, cfg)
                summary.total_length, summary.parameters = cand.total_length, dict(cand.parameters)
                found[i] = (cand, family, sel, summary)
    best: CandidatePath | None = None
    best_key = None
    for cand, family, sel, _ in found:
        if best is None or cand.total_length < best.total_length:
            best, best_key = cand, (family, sel)
    if best is None:
        raise PlannerInfeasible("no path class produced a feasible path")
    family, sel = best_key
    if best.trajectory is None:
        solver = _CLASSES[family][0]
        if best.parameters:
            best = solver(start, goal, sel, params, build=True, step=cfg.step, grids={k: [v] for k, v in best.parameters.items() if k != "image"})
        else:
            best = solver(start, goal, sel, params, build=True, step=cfg.step)
    return PlanResult(best, summaries)


@dataclass
class ValidationReport:
    kappa_g_max: float
    kappa_n_max: float
    kappa_g_bound: float
    kappa_n_bound: float
    reported_kappa_g_max: float
    reported_kappa_n_max: float
    ortho_error_max: float
    junction_jump_max: float
    roll_rate_max: float
    numeric_length: float
    start_error: tuple | None = None
    end_error: tuple | None = None
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def curvature_estimates(traj: Trajectory):
    """Per-interval estimates of ``kappa_g``, ``kappa_n`` and roll rate from samples alone.

    The curvatures project the tangent change onto the averaged ``Y`` and
    ``U`` axes and rescale by ``angle / sin(angle)`` with the tangent turning
    angle, which makes them exact for constant-curvature arcs.  The roll
    rate is the ``x`` component of the relative rotation between frames per
    unit length.  Intervals of zero length are dropped.
    """
    R = traj.R
    ds = np.diff(traj.s)
    keep = ds > 0.0
    T, Y, U = R[:, :, 0], R[:, :, 1], R[:, :, 2]
    dT = np.diff(T, axis=0)
    Ym, Um = 0.5 * (Y[:-1] + Y[1:]), 0.5 * (U[:-1] + U[1:])
    cosang = np.clip(np.sum(T[:-1] * T[1:], axis=1), -1.0, 1.0)
    ang = np.arccos(cosang)
    sinc = np.where(ang > 1e-6, np.sin(ang) / np.maximum(ang, 1e-300), 1.0 - ang * ang / 6.0)
    kg = np.sum(dT * Ym, axis=1) / sinc
    kn = np.sum(dT * Um, axis=1) / sinc
    Q = np.einsum("nji,njk->nik", R[:-1], R[1:])
    roll = 0.5 * (Q[:, 2, 1] - Q[:, 1, 2])
    dsk = np.where(keep, ds, 1.0)
    return kg[keep] / dsk[keep], kn[keep] / dsk[keep], roll[keep] / dsk[keep]


def validate_trajectory(
    traj: Trajectory,
    params: VehicleParams,
    tol: float = 1e-6,
    start: Configuration | None = None,
    goal: Configuration | None = None,
    endpoint_tol: float = 1e-5,
    roll_tol: float | None = None,
) -> ValidationReport:
    """Numerical audit of a sampled trajectory against the vehicle limits.

    ``tol`` is relative to the curvature bounds.  The roll rate is reported
    always and flagged only when ``roll_tol`` is given.
    """
    if len(traj) < 2:
        raise ValueError("trajectory needs at least two samples")
    kg, kn, roll = curvature_estimates(traj)
    gb, nb = params.kappa_g_max, params.kappa_n_max
    R = traj.R
    ortho = float(np.max(np.linalg.norm(np.einsum("nji,njk->nik", R, R) - np.eye(3), axis=(1, 2))))
    arcs = interval_arc_lengths(traj.X, R[:, :, 0])
    ds = np.diff(traj.s)
    jump = float(np.max(np.abs(arcs - ds))) if len(ds) else 0.0
    rep = ValidationReport(
        kappa_g_max=float(np.max(np.abs(kg))) if len(kg) else 0.0,
        kappa_n_max=float(np.max(np.abs(kn))) if len(kn) else 0.0,
        kappa_g_bound=gb,
        kappa_n_bound=nb,
        reported_kappa_g_max=float(np.max(np.abs(traj.kappa_g))),
        reported_kappa_n_max=float(np.max(np.abs(traj.kappa_n))),
        ortho_error_max=ortho,
        junction_jump_max=jump,
        roll_rate_max=float(np.max(np.abs(roll))) if len(roll) else 0.0,
        numeric_length=float(np.sum(arcs)),
    )
    v = rep.violations
    if rep.kappa_g_max > gb * (1.0 + tol):
        v.append(f"kappa_g {rep.kappa_g_max:.9g} exceeds {gb:.9g}")
    if rep.kappa_n_max > nb * (1.0 + tol):
        v.append(f"kappa_n {rep.kappa_n_max:.9g} exceeds {nb:.9g}")
    if rep.reported_kappa_g_max > gb * (1.0 + tol) or rep.reported_kappa_n_max > nb * (1.0 + tol):
        v.append("reported curvature exceeds its bound")
    if ortho > 1e-9:
        v.append(f"frame orthonormality error {ortho:.3g}")
    # sample spacing must agree with the arc between samples
    if jump > 1e-6 * max(1.0, float(np.max(ds)) if len(ds) else 1.0):
        v.append(f"discontinuity between samples {jump:.3g} m")
    if start is not None:
        rep.start_error = traj.start.distance(start)
        if max(rep.start_error) > endpoint_tol:
            v.append(f"start mismatch {rep.start_error}")
    if goal is not None:
        rep.end_error = traj.end.distance(goal)
        if max(rep.end_error) > endpoint_tol:
            v.append(f"end mismatch {rep.end_error}")
    if roll_tol is not None and rep.roll_rate_max > roll_tol:
        v.append(f"roll rate {rep.roll_rate_max:.3g} exceeds {roll_tol:.3g}")
    return rep
