import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dubins3d.candidate import ClassInfeasible
from dubins3d.envelope import (
    COINCIDENT_AXIS,
    IntermediarySphereGeometry,
    SphereEnvelopeBoundary,
    best_sphere_envelope_path,
    intermediary_sphere_configs,
    sphere_phi_grid,
)
from dubins3d.io import load_instance
from dubins3d.planner import validate_trajectory
from dubins3d.rmf import SphereChoice, SphereSelection

vec = st.tuples(*[st.floats(-50, 50)] * 3).map(np.array)


def test_far_limit_collapses_locus():
    g = IntermediarySphereGeometry.between([0, 0, 0], [0, 0, 40], 10.0)
    assert g.alpha == 0.0 and g.locus_radius == 0.0
    X_c, *_ = intermediary_sphere_configs(g, SphereEnvelopeBoundary(1.0, 0.0, 0.0))
    assert np.allclose(X_c, [0, 0, 20])


def test_half_reach_locus():
    g = IntermediarySphereGeometry.between([0, 0, 0], [20, 0, 0], 10.0)
    assert g.alpha == pytest.approx(math.pi / 3)
    assert g.locus_radius == pytest.approx(10 * math.sqrt(3))


def test_too_far():
    with pytest.raises(ClassInfeasible) as err:
        IntermediarySphereGeometry.between([0, 0, 0], [0, 0, 40.1], 10.0)
    assert err.value.reason == "too_far"


def test_coincident_centers():
    g = IntermediarySphereGeometry.between([1, 2, 3], [1, 2, 3], 10.0)
    assert np.allclose(g.k, COINCIDENT_AXIS)
    assert g.alpha == pytest.approx(math.pi / 2) and g.locus_radius == pytest.approx(20.0)


def test_nearly_coincident_centers_use_default_axis():
    g = IntermediarySphereGeometry.between([0, 0, 0], [1.5e-161, 0, 1.5e-161], 1.0)
    assert np.allclose(g.k, COINCIDENT_AXIS)
    assert np.linalg.norm(g.x_axis) == pytest.approx(1.0)


def test_phi_grid_is_periodic():
    assert sphere_phi_grid(4) == pytest.approx([0, math.pi / 2, math.pi, 3 * math.pi / 2])


@settings(max_examples=200, deadline=None)
@given(vec, vec, st.floats(1, 30), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_mutual_tangency(r_i, r_f, R, theta, p_i, p_o):
    if np.linalg.norm(r_f - r_i) > 4 * R:
        return
    g = IntermediarySphereGeometry.between(r_i, r_f, R)
    X_c, X_ic, T_ic, X_oc, T_oc = intermediary_sphere_configs(g, SphereEnvelopeBoundary(theta, p_i, p_o), r_i, r_f, R)
    tol = 1e-9 * max(1.0, np.abs(r_i).max(), np.abs(r_f).max())
    for X, c in ((X_ic, r_i), (X_ic, X_c), (X_oc, r_f), (X_oc, X_c)):
        assert np.linalg.norm(X - c) == pytest.approx(R, abs=tol)
    assert abs(T_ic @ (X_ic - r_i)) <= tol and abs(T_oc @ (X_oc - r_f)) <= tol
    assert np.linalg.norm(T_ic) == pytest.approx(1.0) and np.linalg.norm(T_oc) == pytest.approx(1.0)


@pytest.fixture(scope="module")
def add2(instances_dir):
    return load_instance(instances_dir / "additional_2.json")


@pytest.mark.parametrize(
    "rolls, name, expected", [((0, 15), "inner", 87.17), ((-15, 0), "left", 107.59)]
)
def test_additional_two_rows(add2, rolls, name, expected):
    inst = add2.with_rolls(*rolls)
    start, goal = inst.configurations()
    sel = SphereSelection(SphereChoice.named(name), SphereChoice.named(name))
    cand = best_sphere_envelope_path(start, goal, sel, inst.params)
    assert cand.class_label == f"sphere_{name}"
    assert cand.total_length == pytest.approx(expected, rel=0.01)
    traj = cand.trajectory
    rep = validate_trajectory(traj, inst.params, start=start, goal=goal, roll_tol=1e-6)
    assert rep.ok, rep.violations
    assert len(traj.junctions) == 2
    # intermediary normal is flipped against the end spheres, so the frame is continuous at contact
    for s_j in traj.junctions:
        k = int(np.argmin(np.abs(traj.s - s_j)))
        assert np.linalg.norm(traj.R[k + 1] - traj.R[k - 1]) <= 2.5 * (traj.s[k + 1] - traj.s[k - 1]) * math.hypot(
            inst.params.kappa_g_max, inst.params.kappa_n_max
        )
