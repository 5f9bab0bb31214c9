"""Paths through a cylinder tangent to two same-type spheres.

The vehicle leaves the initial sphere on the cylinder's base circle, follows
a planar Dubins path on the unrolled cylinder and enters the final sphere on
the top circle.  Entry and exit are parameterized by a circle angle
``theta`` and a heading ``phi`` measured from the circumferential direction
towards the cylinder axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .candidate import CandidatePath, ClassInfeasible, EndSpheres, class_label, minimize_pieces
from .dubins2d import WORDS, PlanarConfig, PlanarDubinsPath, PlanarSamples, dubins_lengths, sample_planar_arrays, wrap_angle
from .geom import orthonormal_complement
from .rmf import Configuration, SphereChoice, SphereSelection, Trajectory, VehicleParams
from .sphere import SphericalConfig, lift_spherical_path, on_sphere_config

TWO_PI = 2.0 * math.pi
# relative center separation below which the cylinder axis is undefined
ZERO_HEIGHT = 1e-9


@dataclass(frozen=True)
class CylinderGeometry:
    base_center: np.ndarray
    k: np.ndarray
    h: float
    R_bar: float
    body_frame: np.ndarray  # columns x, y, z with z = k

    @classmethod
    def between(cls, r_i: np.ndarray, r_f: np.ndarray, R_bar: float) -> "CylinderGeometry":
        d = np.asarray(r_f, float) - np.asarray(r_i, float)
        h = float(np.linalg.norm(d))
        if h <= ZERO_HEIGHT * R_bar:
            raise ClassInfeasible("zero_height", "sphere centers coincide")
        k = d / h
        x = orthonormal_complement(k)
        y = np.cross(k, x)
        return cls(np.asarray(r_i, float), k, h, float(R_bar), np.column_stack([x, y, k]))

    def to_global(self, X_body: np.ndarray) -> np.ndarray:
        return X_body @ self.body_frame.T + self.base_center

    def vec_to_global(self, V_body: np.ndarray) -> np.ndarray:
        return V_body @ self.body_frame.T


@dataclass(frozen=True)
class CylinderBoundary:
    theta_ic: float
    phi_ic: float
    theta_oc: float
    phi_oc: float

    @property
    def delta_theta(self) -> float:
        """``theta_oc - theta_ic`` wrapped to ``(-pi, pi]``."""
        return wrap_angle(self.theta_oc - self.theta_ic)


def circle_states(geom: CylinderGeometry, theta, phi, top: bool):
    """Global positions and tangents on the base (or top) circle, broadcasting over angles."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    ct, st = np.cos(theta), np.sin(theta)
    Xb = np.stack([geom.R_bar * ct, geom.R_bar * st, np.full_like(ct, geom.h if top else 0.0)], axis=-1)
    Tb = np.stack([-st * np.cos(phi), ct * np.cos(phi), np.sin(phi)], axis=-1)
    return geom.to_global(Xb), geom.vec_to_global(Tb)


def cylinder_boundary_configs(geom: CylinderGeometry, b: CylinderBoundary):
    """``(X_ic, T_ic, X_oc, T_oc)`` in the global frame."""
    X_ic, T_ic = circle_states(geom, b.theta_ic, b.phi_ic, top=False)
    X_oc, T_oc = circle_states(geom, b.theta_oc, b.phi_oc, top=True)
    return X_ic, T_ic, X_oc, T_oc


def unwrap_angles(delta_theta):
    """The two unrolled images ``(theta_1, theta_2)`` of a wrapped angle difference."""
    d = np.asarray(wrap_angle(delta_theta), float)
    t1 = np.where(d >= 0.0, d, d + TWO_PI)
    # at zero offset the second image is a full extra wrap
    t2 = np.where(d >= 0.0, d - TWO_PI, d)
    if t1.ndim == 0:
        return float(t1), float(t2)
    return t1, t2


def unwrap_goal(b: CylinderBoundary, geom: CylinderGeometry) -> tuple[PlanarConfig, PlanarConfig]:
    """Both planar images of the exit state; the entry maps to ``(0, 0, phi_ic)``."""
    t1, t2 = unwrap_angles(b.delta_theta)
    return (
        PlanarConfig(geom.R_bar * t1, geom.h, b.phi_oc),
        PlanarConfig(geom.R_bar * t2, geom.h, b.phi_oc),
    )


def unwrap_start(b: CylinderBoundary) -> PlanarConfig:
    return PlanarConfig(0.0, 0.0, b.phi_ic)


def _as_samples(planar) -> PlanarSamples:
    if isinstance(planar, PlanarSamples):
        return planar
    s = np.array([p[0] for p in planar], float)
    cfg = [p[1] for p in planar]
    u = np.array([c.u for c in cfg])
    v = np.array([c.v for c in cfg])
    psi = np.array([c.psi for c in cfg])
    # curvature from heading differences when only configurations are given
    kappa = np.zeros_like(s)
    if len(s) > 1:
        ds = np.diff(s)
        k = np.where(ds > 0, np.asarray(wrap_angle(np.diff(psi))) / np.where(ds > 0, ds, 1.0), 0.0)
        kappa[1:] = k
        kappa[0] = k[0]
    return PlanarSamples(s, u, v, psi, kappa)


def wrap_path(planar, geom: CylinderGeometry, b: CylinderBoundary, choice: SphereChoice) -> Trajectory:
    """Map planar samples (starting at the origin) onto the cylinder with the full frame.

    ``planar`` is a :class:`PlanarSamples` or a sequence of ``(s, PlanarConfig)``.
    ``choice`` is the sphere type shared by both ends.
    """
    smp = _as_samples(planar)
    if abs(smp.u[0]) > 1e-9 * max(1.0, geom.R_bar) or abs(smp.v[0]) > 1e-9 * max(1.0, geom.R_bar):
        raise ValueError("planar path must start at the origin of the unrolled plane")
    R = geom.R_bar
    Th = b.theta_ic + smp.u / R
    c, s = np.cos(Th), np.sin(Th)
    cp, sp = np.cos(smp.psi), np.sin(smp.psi)
    Xb = np.stack([R * c, R * s, smp.v], axis=-1)
    Tb = np.stack([-s * cp, c * cp, sp], axis=-1)
    radial = np.stack([c, s, np.zeros_like(c)], axis=-1)
    d = choice.delta
    if choice.is_pitch:
        Ub = -d * radial
        Yb = np.cross(Ub, Tb)
        kappa_n = d * cp * cp / R
        kappa_g = -d * smp.kappa
    else:
        Yb = -d * radial
        Ub = np.cross(Tb, Yb)
        kappa_g = d * cp * cp / R
        kappa_n = d * smp.kappa
    X = geom.to_global(Xb)
    Rm = np.einsum("ij,njk->nik", geom.body_frame, np.stack([Tb, Yb, Ub], axis=-1))
    return Trajectory(smp.s.copy(), X, Rm, np.asarray(kappa_g, float), np.asarray(kappa_n, float))


def planar_radius(choice: SphereChoice, params: VehicleParams) -> float:
    """Turn radius on the unrolled cylinder (or cross-tangent plane) for the sphere type."""
    return params.r_yaw if choice.is_pitch else params.r_pitch


def theta_grid(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("theta_disc must be positive")
    return TWO_PI * np.arange(n) / n


def phi_grid(m: int, lo: float, hi: float) -> np.ndarray:
    if m < 2:
        raise ValueError("phi_disc must be at least 2")
    return lo + (hi - lo) * np.arange(m) / (m - 1)


def _planar_table(geom: CylinderGeometry, dtheta: np.ndarray, phi_in: np.ndarray, phi_out: np.ndarray, radius: float):
    """Planar lengths over (angle offset, phi_ic, phi_oc) with the winning image and word."""
    t1, t2 = unwrap_angles(dtheta)
    u1 = np.stack([np.atleast_1d(t1), np.atleast_1d(t2)], axis=-1) * geom.R_bar  # (k, 2)
    U1 = u1[:, None, None, :]
    P0 = phi_in[None, :, None, None]
    P1 = phi_out[None, None, :, None]
    lengths, seg = dubins_lengths(0.0, 0.0, P0, U1, geom.h, P1, radius)  # (6, k, mi, mo, 2)
    w = np.argmin(lengths, axis=0)
    L = np.take_along_axis(lengths, w[None], axis=0)[0]
    img = np.argmin(L, axis=-1)
    Lbest = np.take_along_axis(L, img[..., None], axis=-1)[..., 0]
    wbest = np.take_along_axis(w, img[..., None], axis=-1)[..., 0]
    return Lbest, img, wbest, seg


def default_grids(theta_disc: int, phi_disc: int) -> dict:
    th, ph = theta_grid(theta_disc), phi_grid(phi_disc, 0.0, math.pi)
    return {"theta_ic": th, "phi_ic": ph, "theta_oc": th, "phi_oc": ph}


def _identical(start: Configuration, goal: Configuration) -> bool:
    dx, dr = start.distance(goal)
    return dx <= 1e-12 * max(1.0, float(np.linalg.norm(start.X))) and dr <= 1e-12


def best_cylinder_path(
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
    """Shortest sphere-cylinder-sphere path over the parameter grid.

    ``grids`` overrides the uniform grids with explicit values for
    ``theta_ic, phi_ic, theta_oc, phi_oc``.
    """
    if not sel.same_type:
        raise ValueError("cylinder paths connect spheres of the same type")
    label = class_label("cyc", sel)
    if _identical(start, goal):
        return CandidatePath(label, 0.0, {}, [], Trajectory.single(start) if build else None)
    ends = EndSpheres(start, goal, sel, params)
    geom = CylinderGeometry.between(ends.r_i, ends.r_f, ends.R_bar)
    radius = planar_radius(sel.initial, params)
    g = grids or default_grids(theta_disc, phi_disc)
    th_i, ph_i, th_o, ph_o = (np.atleast_1d(np.asarray(g[k], float)) for k in ("theta_ic", "phi_ic", "theta_oc", "phi_oc"))
    ni, mi, no, mo = len(th_i), len(ph_i), len(th_o), len(ph_o)

    A, B = np.meshgrid(th_i, ph_i, indexing="ij")
    X_ic, T_ic = circle_states(geom, A.ravel(), B.ravel(), top=False)
    A, B = np.meshgrid(th_o, ph_o, indexing="ij")
    X_oc, T_oc = circle_states(geom, A.ravel(), B.ravel(), top=True)
    first = ends.initial_batch(X_ic, T_ic)
    last = ends.final_batch(X_oc, T_oc)

    dth = np.asarray(wrap_angle(th_o[None, :] - th_i[:, None]), float)  # (ni, no)
    keys, inv = np.unique(np.round(dth, 12), return_inverse=True)
    inv = inv.reshape(ni, no)
    # representative exact offset for each rounded key
    rep = np.zeros(len(keys))
    rep[inv.ravel()] = dth.ravel()
    Lcyl, img, wbest, seg = _planar_table(geom, rep, ph_i, ph_o, radius)

    ji, pi, jo, po = (a.ravel() for a in np.meshgrid(np.arange(ni), np.arange(mi), np.arange(no), np.arange(mo), indexing="ij"))
    kk = inv[ji, jo]
    ia, ib = ji * mi + pi, jo * mo + po
    c, total = minimize_pieces(first, last, ia, ib, middle=Lcyl[kk, pi, po])
    if not np.isfinite(total):
        raise ClassInfeasible("no_feasible_grid_point")

    a, bi = int(ia[c]), int(ib[c])
    key = (int(kk[c]), int(pi[c]), int(po[c]))
    wi, image = int(wbest[key]), int(img[key])
    planar = PlanarDubinsPath(WORDS[wi], tuple(float(x) for x in seg[(wi, slice(None)) + key + (image,)]), radius)
    bnd = CylinderBoundary(float(th_i[ji[c]]), float(ph_i[pi[c]]), float(th_o[jo[c]]), float(ph_o[po[c]]))
    p_first, p_last = first.path(a), last.path(bi)
    cand = CandidatePath(
        label,
        total,
        {
            "theta_ic": bnd.theta_ic,
            "phi_ic": bnd.phi_ic,
            "theta_oc": bnd.theta_oc,
            "phi_oc": bnd.phi_oc,
            "image": image + 1,
        },
        [
            {"surface": "initial_sphere", "word": p_first.word, "length": p_first.total_length},
            {"surface": "cylinder", "word": planar.word, "length": planar.total_length},
            {"surface": "final_sphere", "word": p_last.word, "length": p_last.total_length},
        ],
    )
    if build:
        step = step or params.default_step
        t1 = lift_spherical_path(p_first, on_sphere_config(start, ends.r_i), ends.r_i, sel.initial, step)
        t2 = wrap_path(sample_planar_arrays(planar, unwrap_start(bnd), step), geom, bnd, sel.initial)
        t3 = lift_spherical_path(p_last, SphericalConfig(X_oc[bi] - ends.r_f, T_oc[bi]), ends.r_f, sel.final, step)
        cand.trajectory = Trajectory.concatenate([t1, t2, t3])
    return cand
