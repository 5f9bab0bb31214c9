import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import planar_states, richardson_length

from dubins3d.candidate import ClassInfeasible
from dubins3d.cylinder import (
    CylinderBoundary,
    CylinderGeometry,
    best_cylinder_path,
    cylinder_boundary_configs,
    phi_grid,
    theta_grid,
    unwrap_angles,
    unwrap_goal,
    wrap_path,
)
from dubins3d.dubins2d import LETTER_SIGN, PlanarConfig, PlanarSamples, solve_planar_dubins, wrap_angle
from dubins3d.io import load_instance
from dubins3d.planner import curvature_estimates, validate_trajectory
from dubins3d.rmf import Configuration, SphereChoice, SphereSelection, VehicleParams

IDENTITY_GEOM = CylinderGeometry(np.zeros(3), np.array([0.0, 0, 1]), 50.0, 20.0, np.eye(3))


def test_boundary_configs_in_body_frame():
    X_ic, T_ic, X_oc, T_oc = cylinder_boundary_configs(IDENTITY_GEOM, CylinderBoundary(0.0, 0.0, math.pi, math.pi / 2))
    assert np.allclose(X_ic, [20, 0, 0]) and np.allclose(T_ic, [0, 1, 0])
    assert np.allclose(X_oc, [-20, 0, 50]) and np.allclose(T_oc, [0, 0, 1], atol=1e-15)
    _, T, _, _ = cylinder_boundary_configs(IDENTITY_GEOM, CylinderBoundary(math.pi / 2, math.pi / 4, 0, 0))
    assert np.allclose(T, [-math.sqrt(0.5), 0, math.sqrt(0.5)], atol=1e-15)


def test_geometry_between_centers():
    g = CylinderGeometry.between([1, 2, 3], [1, 2, 13], 4.0)
    assert g.h == pytest.approx(10.0) and np.allclose(g.k, [0, 0, 1])
    assert np.allclose(g.body_frame.T @ g.body_frame, np.eye(3))
    assert np.linalg.det(g.body_frame) == pytest.approx(1.0)
    with pytest.raises(ClassInfeasible) as err:
        CylinderGeometry.between([1, 2, 3], [1, 2, 3], 4.0)
    assert err.value.reason == "zero_height"


@pytest.mark.parametrize(
    "d, images",
    [(math.pi / 2, (math.pi / 2, -3 * math.pi / 2)), (-math.pi / 4, (7 * math.pi / 4, -math.pi / 4)), (0.0, (0.0, -2 * math.pi))],
)
def test_unwrap_images(d, images):
    assert unwrap_angles(d) == pytest.approx(images)
    b = CylinderBoundary(0.3, 0.1, 0.3 + d, 0.2)
    g1, g2 = unwrap_goal(b, IDENTITY_GEOM)
    assert (g1.u, g2.u) == pytest.approx((20 * images[0], 20 * images[1]))
    assert g1.v == g2.v == 50.0 and g1.psi == pytest.approx(0.2)


def test_grids():
    assert theta_grid(4) == pytest.approx([0, math.pi / 2, math.pi, 3 * math.pi / 2])
    assert phi_grid(3, 0, math.pi) == pytest.approx([0, math.pi / 2, math.pi])
    with pytest.raises(ValueError):
        phi_grid(1, 0, math.pi)


def samples_from(p0, signs, lengths, r, n):
    return PlanarSamples(*planar_states([0, 0], p0, signs, lengths, r, n))


def test_circumferential_and_axial_lines():
    b = CylinderBoundary(0.0, 0.0, 0.0, 0.0)
    half = wrap_path(samples_from(0.0, [0], [20 * math.pi], 1.0, 64), IDENTITY_GEOM, b, SphereChoice.named("inner"))
    assert np.allclose(half.X[0], -half.X[-1] * [1, 1, 0] + [0, 0, 0], atol=1e-9)
    axial = wrap_path(samples_from(math.pi / 2, [0], [30.0], 1.0, 8), IDENTITY_GEOM, b, SphereChoice.named("inner"))
    assert np.allclose(axial.X[:, :2], [20, 0]) and np.allclose(axial.X[-1], [20, 0, 30])
    _, kn, _ = curvature_estimates(axial)
    assert np.allclose(kn, 0.0, atol=1e-12)


def test_wrap_requires_origin():
    bad = samples_from(0.0, [0], [1.0], 1.0, 2)
    bad.u[:] += 1.0
    with pytest.raises(ValueError):
        wrap_path(bad, IDENTITY_GEOM, CylinderBoundary(0, 0, 0, 0), SphereChoice.named("left"))


@settings(max_examples=30, deadline=None)
@given(
    st.floats(0, 2 * math.pi), st.floats(-2.5, 2.5), st.floats(-300, 300), st.floats(1, 200),
    st.floats(0, math.pi), st.floats(0, math.pi), st.sampled_from(["inner", "outer", "left", "right"]),
)
def test_wrapping_preserves_length_and_round_trips(theta_ic, dth, du, h, phi_ic, phi_oc, name):
    geom = CylinderGeometry(np.array([1.0, -2.0, 0.5]), np.array([0.0, 0.0, 1.0]), h, 25.0, np.eye(3))
    b = CylinderBoundary(theta_ic, phi_ic, theta_ic + dth, phi_oc)
    path = solve_planar_dubins(PlanarConfig(0, 0, phi_ic), PlanarConfig(du, h, phi_oc), 30.0)
    signs = [int(LETTER_SIGN[c]) for c in path.word]
    choice = SphereChoice.named(name)

    def curve_at(n):
        return wrap_path(samples_from(phi_ic, signs, path.segment_lengths, 30.0, n), geom, b, choice).X

    assert richardson_length(curve_at, 1000) == pytest.approx(path.total_length, rel=1e-9)
    smp = samples_from(phi_ic, signs, path.segment_lengths, 30.0, 20)
    X = wrap_path(smp, geom, b, choice).X - geom.base_center
    theta = np.arctan2(X[:, 1], X[:, 0])
    assert np.allclose(np.asarray(wrap_angle(theta - theta_ic - smp.u / 25.0)), 0.0, atol=1e-9)
    assert np.allclose(X[:, 2], smp.v, atol=1e-9)


def test_identical_start_and_goal():
    c = Configuration.from_degrees([1, 2, 3], 10, 5, 0)
    sel = SphereSelection.from_flags(1, 0, 1, 0)
    cand = best_cylinder_path(c, c, sel, VehicleParams(40, 30))
    assert cand.total_length == 0.0 and len(cand.trajectory) == 1


def test_rejects_opposite_types():
    c = Configuration.from_degrees([0, 0, 0], 0, 0, 0)
    with pytest.raises(ValueError):
        best_cylinder_path(c, c, SphereSelection.from_flags(1, 0, 0, 1), VehicleParams(40, 30))


@pytest.fixture(scope="module")
def add1_row_g(instances_dir):
    inst = load_instance(instances_dir / "additional_1.json").with_rolls(15, -15)
    start, goal = inst.configurations()
    sel = SphereSelection(SphereChoice.named("right"), SphereChoice.named("right"))
    return start, goal, inst.params, best_cylinder_path(start, goal, sel, inst.params)


def test_additional_one_right_cylinder(add1_row_g):
    _, _, _, cand = add1_row_g
    assert cand.class_label == "cyc_right"
    assert cand.total_length == pytest.approx(211.93, rel=0.05)
    assert cand.trajectory.length == pytest.approx(cand.total_length, rel=1e-12)


def test_wrapped_candidate_is_feasible(add1_row_g):
    start, goal, params, cand = add1_row_g
    report = validate_trajectory(cand.trajectory, params, start=start, goal=goal)
    assert report.ok, report.violations
    assert max(report.start_error) <= 1e-9 and max(report.end_error) <= 1e-5


def test_nested_grids_never_lengthen():
    params = VehicleParams(40, 30)
    start = Configuration.from_degrees([0, 0, 0], 20, 5, 10)
    goal = Configuration.from_degrees([150, 60, 10], -60, -5, 0)
    sel = SphereSelection(SphereChoice.named("left"), SphereChoice.named("left"))
    coarse = best_cylinder_path(start, goal, sel, params, 4, 3, build=False)
    fine = best_cylinder_path(start, goal, sel, params, 8, 5, build=False)
    assert fine.total_length <= coarse.total_length
