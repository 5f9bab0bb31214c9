"""Paths through a plane tangent to two opposite-type spheres.

The spheres lie on opposite sides of the plane.  Its tangency points with
the spheres are ``X_ic`` and ``X_oc``; rotating the plane about the line of
centers moves them around two circles, parameterized by ``theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .candidate import CandidatePath, ClassInfeasible, EndSpheres, class_label, minimize_pieces
from .cylinder import phi_grid, planar_radius, theta_grid
from .dubins2d import WORDS, PlanarConfig, PlanarDubinsPath, dubins_lengths, sample_planar_arrays
from .geom import orthonormal_complement
from .rmf import Configuration, SphereChoice, SphereSelection, Trajectory, VehicleParams
from .sphere import SphericalConfig, lift_spherical_path, on_sphere_config

# relative slack when the spheres exactly touch
TOUCH_SLACK = 1e-12


@dataclass(frozen=True)
class CrossTangentGeometry:
    A: np.ndarray
    B: np.ndarray
    alpha: float
    x_axis: np.ndarray
    y_axis: np.ndarray
    R_bar: float
    r_i: np.ndarray
    r_f: np.ndarray

    @classmethod
    def between(cls, r_i: np.ndarray, r_f: np.ndarray, R_bar: float) -> "CrossTangentGeometry":
        r_i, r_f = np.asarray(r_i, float), np.asarray(r_f, float)
        d = float(np.linalg.norm(r_f - r_i))
        if d < 2.0 * R_bar * (1.0 - TOUCH_SLACK):
            raise ClassInfeasible("spheres_intersect", f"center distance {d:.6g} < {2.0 * R_bar:.6g}")
        k = (r_f - r_i) / d
        alpha = math.acos(min(1.0, 2.0 * R_bar / d))
        x = orthonormal_complement(k)
        y = np.cross(k, x)
        off = R_bar * math.cos(alpha) * k
        return cls(r_i + off, r_f - off, alpha, x, y, float(R_bar), r_i, r_f)

    @property
    def k(self) -> np.ndarray:
        return np.cross(self.x_axis, self.y_axis)

    @property
    def locus_radius(self) -> float:
        return self.R_bar * math.sin(self.alpha)


@dataclass(frozen=True)
class PlaneBoundary:
    theta: float
    phi_ic: float
    phi_oc: float


def plane_frames(geom: CrossTangentGeometry, theta):
    """Tangency points and in-plane basis for angles ``theta``.

    Returns ``X_ic, X_oc, t, n, b`` where ``t`` points from ``X_ic`` to
    ``X_oc``, ``n = (X_ic - r_i) / R_bar`` is the plane normal and
    ``b = n x t``.
    """
    theta = np.asarray(theta, float)
    e = np.cos(theta)[..., None] * geom.x_axis + np.sin(theta)[..., None] * geom.y_axis
    rs = geom.locus_radius
    X_ic = geom.A + rs * e
    X_oc = geom.B - rs * e
    n = (X_ic - geom.r_i) / geom.R_bar
    # unit(X_oc - X_ic) in closed form; also defined when the spheres touch
    t = math.sin(geom.alpha) * geom.k - math.cos(geom.alpha) * e
    b = np.cross(n, t)
    return X_ic, X_oc, t, n, b


def cross_tangent_configs(geom: CrossTangentGeometry, bnd: PlaneBoundary, r_i=None, r_f=None):
    """``(X_ic, T_ic, X_oc, T_oc)`` for one boundary choice."""
    if r_i is not None and not np.allclose(r_i, geom.r_i):
        raise ValueError("r_i does not match the geometry")
    if r_f is not None and not np.allclose(r_f, geom.r_f):
        raise ValueError("r_f does not match the geometry")
    X_ic, X_oc, t, n, b = plane_frames(geom, bnd.theta)
    T_ic = math.cos(bnd.phi_ic) * t + math.sin(bnd.phi_ic) * b
    T_oc = math.cos(bnd.phi_oc) * t + math.sin(bnd.phi_oc) * b
    return X_ic, T_ic, X_oc, T_oc


def lift_plane_path(samples, X_ic, t, n, b, choice: SphereChoice) -> Trajectory:
    """Planar samples ``(u, v, psi)`` on the plane through ``X_ic`` spanned by ``t, b``.

    ``choice`` is the initial sphere's type; the plane normal axis is
    ``-delta n``.
    """
    X = X_ic + samples.u[:, None] * t + samples.v[:, None] * b
    cp, sp = np.cos(samples.psi)[:, None], np.sin(samples.psi)[:, None]
    T = cp * t + sp * b
    d = choice.delta
    zero = np.zeros_like(samples.s)
    if choice.is_pitch:
        U = np.broadcast_to(-d * n, T.shape)
        Y = np.cross(U, T)
        kappa_g, kappa_n = -d * samples.kappa, zero
    else:
        Y = np.broadcast_to(-d * n, T.shape)
        U = np.cross(T, Y)
        kappa_g, kappa_n = zero, d * samples.kappa
    return Trajectory(samples.s.copy(), X, np.stack([T, Y, U], axis=-1), kappa_g, kappa_n)


def default_grids(theta_disc: int, phi_disc: int) -> dict:
    ph = phi_grid(phi_disc, -0.5 * math.pi, 0.5 * math.pi)
    return {"theta": theta_grid(theta_disc), "phi_ic": ph, "phi_oc": ph}


def best_plane_path(
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
    """Shortest sphere-plane-sphere path over the parameter grid.

    ``grids`` overrides the uniform grids with explicit ``theta, phi_ic, phi_oc`` values.
    """
    if not sel.opposite_type:
        raise ValueError("cross-tangent planes connect spheres of opposite type")
    ends = EndSpheres(start, goal, sel, params)
    geom = CrossTangentGeometry.between(ends.r_i, ends.r_f, ends.R_bar)
    radius = planar_radius(sel.initial, params)
    g = grids or default_grids(theta_disc, phi_disc)
    thetas, ph_i, ph_o = (np.atleast_1d(np.asarray(g[k], float)) for k in ("theta", "phi_ic", "phi_oc"))
    n, mi, mo = len(thetas), len(ph_i), len(ph_o)

    X_ic, X_oc, t, nrm, b = plane_frames(geom, thetas)  # (n, 3)
    T_in = np.cos(ph_i)[None, :, None] * t[:, None, :] + np.sin(ph_i)[None, :, None] * b[:, None, :]
    T_out = np.cos(ph_o)[None, :, None] * t[:, None, :] + np.sin(ph_o)[None, :, None] * b[:, None, :]
    first = ends.initial_batch(np.repeat(X_ic, mi, axis=0), T_in.reshape(-1, 3))
    last = ends.final_batch(np.repeat(X_oc, mo, axis=0), T_out.reshape(-1, 3))

    D = np.einsum("ij,ij->i", X_oc - X_ic, t)  # (n,)
    P0 = ph_i[None, :, None]
    P1 = ph_o[None, None, :]
    lengths, seg = dubins_lengths(0.0, 0.0, P0, D[:, None, None], 0.0, P1, radius)  # (6, n, mi, mo)
    w = np.argmin(lengths, axis=0)
    Lpl = np.take_along_axis(lengths, w[None], axis=0)[0]

    j, pi, po = (a.ravel() for a in np.meshgrid(np.arange(n), np.arange(mi), np.arange(mo), indexing="ij"))
    ia, ib = j * mi + pi, j * mo + po
    c, total = minimize_pieces(first, last, ia, ib, middle=Lpl[j, pi, po])
    if not np.isfinite(total):
        raise ClassInfeasible("no_feasible_grid_point")

    jc, pic, poc = int(j[c]), int(pi[c]), int(po[c])
    wi = int(w[jc, pic, poc])
    planar = PlanarDubinsPath(WORDS[wi], tuple(float(x) for x in seg[wi, :, jc, pic, poc]), radius)
    bnd = PlaneBoundary(float(thetas[jc]), float(ph_i[pic]), float(ph_o[poc]))
    p_first, p_last = first.path(int(ia[c])), last.path(int(ib[c]))
    cand = CandidatePath(
        class_label("pl", sel),
        total,
        {"theta": bnd.theta, "phi_ic": bnd.phi_ic, "phi_oc": bnd.phi_oc},
        [
            {"surface": "initial_sphere", "word": p_first.word, "length": p_first.total_length},
            {"surface": "plane", "word": planar.word, "length": planar.total_length},
            {"surface": "final_sphere", "word": p_last.word, "length": p_last.total_length},
        ],
    )
    if build:
        step = step or params.default_step
        t1 = lift_spherical_path(p_first, on_sphere_config(start, ends.r_i), ends.r_i, sel.initial, step)
        smp = sample_planar_arrays(planar, PlanarConfig(0.0, 0.0, bnd.phi_ic), step)
        t2 = lift_plane_path(smp, X_ic[jc], t[jc], nrm[jc], b[jc], sel.initial)
        t3 = lift_spherical_path(
            p_last, SphericalConfig(X_oc[jc] - ends.r_f, T_out[jc, poc]), ends.r_f, sel.final, step
        )
        cand.trajectory = Trajectory.concatenate([t1, t2, t3])
    return cand
