"""Paths through an intermediary sphere touching two same-type spheres.

The intermediary sphere has the same radius as the end spheres and touches
both, so its center lies on a circle around the line of centers.  The
vehicle crosses onto it at the midpoint between centers and the surface
normal flips sign there (an inner sphere is followed by an outer one and so
on).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .candidate import CandidatePath, ClassInfeasible, EndSpheres, class_label, minimize_pieces
from .cylinder import theta_grid
from .geom import orthonormal_complement
from .rmf import Configuration, SphereSelection, Trajectory, VehicleParams
from .sphere import SphereBatch, SphericalConfig, lift_spherical_path, on_sphere_config, sabban_frames

TWO_PI = 2.0 * math.pi
REACH_SLACK = 1e-12
# axis used when the two end spheres coincide and the line of centers is undefined
COINCIDENT_AXIS = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class IntermediarySphereGeometry:
    alpha: float
    locus_center: np.ndarray
    locus_radius: float
    x_axis: np.ndarray
    y_axis: np.ndarray
    k: np.ndarray
    R_bar: float
    r_i: np.ndarray
    r_f: np.ndarray

    @classmethod
    def between(cls, r_i: np.ndarray, r_f: np.ndarray, R_bar: float) -> "IntermediarySphereGeometry":
        r_i, r_f = np.asarray(r_i, float), np.asarray(r_f, float)
        d = float(np.linalg.norm(r_f - r_i))
        if d > 4.0 * R_bar * (1.0 + REACH_SLACK):
            raise ClassInfeasible("too_far", f"center distance {d:.6g} > {4.0 * R_bar:.6g}")
        # below this offset the axis direction is numerically meaningless and any axis is valid
        k = (r_f - r_i) / d if d > 1e-12 * R_bar else COINCIDENT_AXIS.copy()
        alpha = math.acos(min(1.0, d / (4.0 * R_bar)))
        x = orthonormal_complement(k)
        y = np.cross(k, x)
        return cls(alpha, 0.5 * (r_i + r_f), 2.0 * R_bar * math.sin(alpha), x, y, k, float(R_bar), r_i, r_f)


@dataclass(frozen=True)
class SphereEnvelopeBoundary:
    theta: float
    phi_ic: float
    phi_oc: float


def contact_frames(geom: IntermediarySphereGeometry, theta):
    """Intermediary center, contact points and in-tangent-plane reference directions.

    Returns ``X_c, X_ic, X_oc, x_ic, x_oc``.  ``x_ic`` is the unit tangent at
    ``X_ic`` pointing along the line of centers, written as
    ``sin(alpha) k - cos(alpha) e`` with ``e`` the radial direction of the
    locus; this equals the quotient form with ``R_bar tan(alpha)`` in the
    denominator but stays defined at ``alpha = 0``.
    """
    theta = np.asarray(theta, float)
    e = np.cos(theta)[..., None] * geom.x_axis + np.sin(theta)[..., None] * geom.y_axis
    X_c = geom.locus_center + geom.locus_radius * e
    X_ic = 0.5 * (geom.r_i + X_c)
    X_oc = 0.5 * (geom.r_f + X_c)
    sa, ca = math.sin(geom.alpha), math.cos(geom.alpha)
    x_ic = sa * geom.k - ca * e
    x_oc = -sa * geom.k - ca * e
    return X_c, X_ic, X_oc, x_ic, x_oc


def tangents(X, center, x_ref, phi, R_bar):
    """``cos(phi) x_ref + sin(phi) ((X - center) x x_ref) / R_bar``, broadcasting."""
    side = np.cross(X - center, x_ref) / R_bar
    phi = np.asarray(phi, float)[..., None]
    return np.cos(phi) * x_ref + np.sin(phi) * side


def intermediary_sphere_configs(geom: IntermediarySphereGeometry, bnd: SphereEnvelopeBoundary, r_i=None, r_f=None, R_bar=None):
    """``(X_c, X_ic, T_ic, X_oc, T_oc)`` for one boundary choice."""
    for given, have in ((r_i, geom.r_i), (r_f, geom.r_f)):
        if given is not None and not np.allclose(given, have):
            raise ValueError("sphere center does not match the geometry")
    if R_bar is not None and not math.isclose(R_bar, geom.R_bar):
        raise ValueError("radius does not match the geometry")
    X_c, X_ic, X_oc, x_ic, x_oc = contact_frames(geom, bnd.theta)
    T_ic = tangents(X_ic, geom.r_i, x_ic, bnd.phi_ic, geom.R_bar)
    T_oc = tangents(X_oc, geom.r_f, x_oc, bnd.phi_oc, geom.R_bar)
    return X_c, X_ic, T_ic, X_oc, T_oc


def sphere_phi_grid(m: int) -> np.ndarray:
    if m < 1:
        raise ValueError("phi_disc must be positive")
    return TWO_PI * np.arange(m) / m


def default_grids(theta_disc: int, phi_disc: int) -> dict:
    ph = sphere_phi_grid(phi_disc)
    return {"theta": theta_grid(theta_disc), "phi_ic": ph, "phi_oc": ph}


def best_sphere_envelope_path(
    start: Configuration,
    goal: Configuration,
    sel: SphereSelection,
    params: VehicleParams,
    theta_disc: int = 15,
    phi_disc: int = 15,
    step: float | None = None,
    build: bool = True,
    grids: dict | None = None,
) -> CandidatePath:
    """Shortest sphere-sphere-sphere path over the parameter grid.

    ``grids`` overrides the uniform grids with explicit ``theta, phi_ic, phi_oc`` values.
    """
    if not sel.same_type:
        raise ValueError("intermediary-sphere paths connect spheres of the same type")
    ends = EndSpheres(start, goal, sel, params)
    R = ends.R_bar
    geom = IntermediarySphereGeometry.between(ends.r_i, ends.r_f, R)
    g = grids or default_grids(theta_disc, phi_disc)
    thetas, ph_i, ph_o = (np.atleast_1d(np.asarray(g[k], float)) for k in ("theta", "phi_ic", "phi_oc"))
    n, mi, mo = len(thetas), len(ph_i), len(ph_o)

    X_c, X_ic, X_oc, x_ic, x_oc = contact_frames(geom, thetas)  # (n, 3)
    T_in = tangents(X_ic[:, None, :], geom.r_i, x_ic[:, None, :], ph_i[None, :], R)  # (n, mi, 3)
    T_out = tangents(X_oc[:, None, :], geom.r_f, x_oc[:, None, :], ph_o[None, :], R)
    first = ends.initial_batch(np.repeat(X_ic, mi, axis=0), T_in.reshape(-1, 3))
    last = ends.final_batch(np.repeat(X_oc, mo, axis=0), T_out.reshape(-1, 3))

    j, pi, po = (a.ravel() for a in np.meshgrid(np.arange(n), np.arange(mi), np.arange(mo), indexing="ij"))
    Xc = X_c[j]
    F0 = sabban_frames(X_ic[j], T_in[j, pi], Xc, R)
    F1 = sabban_frames(X_oc[j], T_out[j, po], Xc, R)
    mid_choice = sel.initial.flipped()
    middle = SphereBatch(F0, F1, ends.sphere_params(mid_choice))

    ia, ib = j * mi + pi, j * mo + po
    c, total = minimize_pieces(first, last, ia, ib, middle_batch=middle)
    if not np.isfinite(total):
        raise ClassInfeasible("no_feasible_grid_point")

    jc, pic, poc = int(j[c]), int(pi[c]), int(po[c])
    bnd = SphereEnvelopeBoundary(float(thetas[jc]), float(ph_i[pic]), float(ph_o[poc]))
    p_first, p_mid, p_last = first.path(int(ia[c])), middle.path(c), last.path(int(ib[c]))
    cand = CandidatePath(
        class_label("sphere", sel),
        total,
        {"theta": bnd.theta, "phi_ic": bnd.phi_ic, "phi_oc": bnd.phi_oc},
        [
            {"surface": "initial_sphere", "word": p_first.word, "length": p_first.total_length},
            {"surface": "intermediary_sphere", "word": p_mid.word, "length": p_mid.total_length},
            {"surface": "final_sphere", "word": p_last.word, "length": p_last.total_length},
        ],
    )
    if build:
        step = step or params.default_step
        t1 = lift_spherical_path(p_first, on_sphere_config(start, ends.r_i), ends.r_i, sel.initial, step)
        t2 = lift_spherical_path(
            p_mid, SphericalConfig(X_ic[jc] - X_c[jc], T_in[jc, pic]), X_c[jc], mid_choice, step
        )
        t3 = lift_spherical_path(
            p_last, SphericalConfig(X_oc[jc] - ends.r_f, T_out[jc, poc]), ends.r_f, sel.final, step
        )
        cand.trajectory = Trajectory.concatenate([t1, t2, t3])
    return cand
