import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import random_rotation, spherical_oracle

from dubins3d.planner import curvature_estimates
from dubins3d.rmf import SphereChoice, VehicleParams, tangent_sphere_center
from dubins3d.sphere import (
    R_HAT_MAX,
    SphericalConfig,
    SphericalPathParams,
    UnsupportedRadius,
    candidate_families,
    lift_spherical_path,
    on_sphere_config,
    rotation_lower_bound,
    solve_spherical_dubins,
    solve_unit_batch,
    spherical_residual,
    words_for,
)


def params_for_r_hat(R_bar, r_hat):
    return SphericalPathParams(R_bar, math.sqrt(1.0 / r_hat**2 - 1.0) / R_bar)


def on_sphere(F, R_bar):
    return SphericalConfig(R_bar * F[:, 0], F[:, 1])


def test_candidate_families():
    assert candidate_families(0.4) == {"CGC", "CCC"}
    assert candidate_families(0.6) == {"CGC", "CCCC"}
    assert candidate_families(0.8) == {"CGC", "CCCCC", "CC_piC"}
    with pytest.raises(UnsupportedRadius):
        candidate_families(0.9)
    assert "LRLRL" in words_for(0.8) and "LRLR" not in words_for(0.4)


def test_params_identity():
    p = SphericalPathParams(40.0, 1 / 30)
    assert p.r == pytest.approx(40 / math.sqrt(1 + (40 / 30) ** 2), rel=1e-12)
    assert 0 < p.r_hat <= R_HAT_MAX


def test_zero_and_geodesic_paths():
    p = params_for_r_hat(25.0, 0.6)
    start = SphericalConfig([25.0, 0, 0], [0, 1.0, 0])
    assert solve_spherical_dubins(start, start, p).total_length == pytest.approx(0.0, abs=1e-9)
    quarter = SphericalConfig([0, 25.0, 0], [-1.0, 0, 0])
    path = solve_spherical_dubins(start, quarter, p)
    assert path.total_length == pytest.approx(25.0 * math.pi / 2, rel=1e-9)
    assert [a for c, a in zip(path.word, path.angles) if a > 1e-9] == pytest.approx([math.pi / 2])


def test_rejects_off_sphere():
    p = params_for_r_hat(10.0, 0.5)
    with pytest.raises(ValueError):
        solve_spherical_dubins(SphericalConfig([11.0, 0, 0], [0, 1, 0]), SphericalConfig([10.0, 0, 0], [0, 1, 0]), p)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.2, 0.86), st.floats(1.0, 80.0))
def test_scaling_invariance_and_residual(seed, r_hat, R_bar):
    rng = np.random.default_rng(seed)
    F0, F1 = random_rotation(rng), random_rotation(rng)
    unit = solve_spherical_dubins(on_sphere(F0, 1.0), on_sphere(F1, 1.0), params_for_r_hat(1.0, r_hat))
    scaled = solve_spherical_dubins(on_sphere(F0, R_bar), on_sphere(F1, R_bar), params_for_r_hat(R_bar, r_hat))
    assert scaled.total_length == pytest.approx(R_bar * unit.total_length, rel=1e-9)
    assert spherical_residual(on_sphere(F0, 1.0), on_sphere(F1, 1.0), unit, unit.U_hat) <= 1e-6
    lb = rotation_lower_bound(F0[None], F1[None], r_hat)[0]
    assert unit.total_length >= lb - 1e-12


def test_against_two_stage_oracle(rng):
    for r_hat in (0.35, 0.65, 0.8):
        U = math.sqrt(1 / r_hat**2 - 1)
        F0, F1 = random_rotation(rng), random_rotation(rng)
        res = solve_unit_batch(F0[None], F1[None], U)
        ref = spherical_oracle(F0.T @ F1, U, res.words)
        assert res.length[0] <= ref * (1 + 1e-3)


@pytest.mark.parametrize("name", ["inner", "outer", "left", "right"])
def test_lift_conventions_and_bounds(name, rng):
    params = VehicleParams(40.0, 30.0)
    choice = SphereChoice.named(name)
    from dubins3d.rmf import Configuration

    start = Configuration.from_degrees([5, -3, 2], 40, 10, -5)
    center = tangent_sphere_center(start, choice, params)
    from dubins3d.sphere import sphere_params_for

    sp = sphere_params_for(choice, params)
    R_bar = sp.R_bar
    F1 = random_rotation(rng)
    goal = on_sphere(F1, R_bar)
    path = solve_spherical_dubins(on_sphere_config(start, center), goal, sp)
    traj = lift_spherical_path(path, on_sphere_config(start, center), center, choice, 0.4)
    assert np.allclose(traj.X[0], start.X) and np.allclose(traj.R[0], start.R, atol=1e-12)
    normal = traj.R[:, :, 2] if choice.is_pitch else traj.R[:, :, 1]
    assert np.allclose(normal, -choice.delta * (traj.X - center) / R_bar, atol=1e-9)
    kg, kn, roll = curvature_estimates(traj)
    assert np.max(np.abs(kg)) <= params.kappa_g_max * (1 + 1e-6)
    assert np.max(np.abs(kn)) <= params.kappa_n_max * (1 + 1e-6)
    assert np.max(np.abs(roll)) <= 1e-6
    assert traj.s[-1] == pytest.approx(path.total_length, rel=1e-12)
    assert np.allclose(traj.X[-1] - center, goal.X_sp, atol=1e-6)


def test_saturated_arc_radius_matches_3d_turn():
    params = VehicleParams(40.0, 30.0)
    sp = SphericalPathParams(40.0, 1 / 30)
    assert sp.r == pytest.approx(params.saturated_radius, rel=1e-12)


def test_zero_length_lift():
    from dubins3d.sphere import SphericalPath

    start = SphericalConfig([10.0, 0, 0], [0, 0, 1.0])
    traj = lift_spherical_path(SphericalPath("LGL", (0.0, 0.0, 0.0), 10.0, 0.5), start, np.zeros(3), SphereChoice.named("inner"), 0.1)
    assert len(traj) == 1
