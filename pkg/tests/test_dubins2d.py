import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import planar_oracle, simulate_planar

from dubins3d.dubins2d import (
    LETTER_SIGN,
    WORDS,
    PlanarConfig,
    PlanarDubinsPath,
    dubins_lengths,
    sample_planar_path,
    solve_planar_dubins,
    wrap_angle,
)

coords = st.floats(-20, 20, allow_nan=False)
headings = st.floats(-math.pi, math.pi, allow_nan=False)
radii = st.floats(0.5, 5.0)


def endpoint(path: PlanarDubinsPath, start: PlanarConfig):
    signs = [int(LETTER_SIGN[c]) for c in path.word]
    return simulate_planar([start.u, start.v], start.psi, signs, path.segment_lengths, path.radius)


def test_wrap_resolves_toward_plus_pi():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


def test_straight_line():
    p = solve_planar_dubins(PlanarConfig(0, 0, 0), PlanarConfig(10, 0, 0), 1.0)
    assert p.word == "LSL"
    assert p.segment_lengths == pytest.approx((0, 10, 0), abs=1e-12)


def test_half_circle():
    p = solve_planar_dubins(PlanarConfig(0, 0, 0), PlanarConfig(0, 2, math.pi), 1.0)
    assert p.total_length == pytest.approx(math.pi, abs=1e-9)
    assert p.word[0] == "L"


def test_radius_must_be_positive():
    with pytest.raises(ValueError):
        solve_planar_dubins(PlanarConfig(0, 0, 0), PlanarConfig(1, 0, 0), 0.0)


def test_vectorized_lengths_match_scalar(rng):
    u1, v1 = rng.uniform(-10, 10, (2, 50))
    psi0, psi1 = rng.uniform(-3, 3, (2, 50))
    L, _ = dubins_lengths(0.0, 0.0, psi0, u1, v1, psi1, 2.0)
    for i in range(50):
        p = solve_planar_dubins(PlanarConfig(0, 0, psi0[i]), PlanarConfig(u1[i], v1[i], psi1[i]), 2.0)
        assert np.min(L[:, i]) == pytest.approx(p.total_length, abs=1e-12)
        assert WORDS[int(np.argmin(L[:, i]))] == p.word


@settings(max_examples=150, deadline=None)
@given(coords, coords, headings, coords, coords, headings, radii)
def test_path_reaches_goal_and_beats_chord(u0, v0, p0, u1, v1, p1, r):
    start, goal = PlanarConfig(u0, v0, p0), PlanarConfig(u1, v1, p1)
    path = solve_planar_dubins(start, goal, r)
    q, h = endpoint(path, start)
    assert np.linalg.norm(q - [u1, v1]) <= 1e-9 * max(1.0, abs(u1) + abs(v1) + r)
    assert abs(wrap_angle(h - p1)) <= 1e-9
    assert path.total_length >= math.hypot(u1 - u0, v1 - v0) - 1e-9
    assert all(x >= 0 for x in path.segment_lengths)


@settings(max_examples=150, deadline=None)
@given(coords, coords, headings, coords, coords, headings, radii)
def test_reversal_and_mirror_symmetry(u0, v0, p0, u1, v1, p1, r):
    L = solve_planar_dubins(PlanarConfig(u0, v0, p0), PlanarConfig(u1, v1, p1), r).total_length
    rev = solve_planar_dubins(PlanarConfig(u1, v1, p1 + math.pi), PlanarConfig(u0, v0, p0 + math.pi), r)
    assert rev.total_length == pytest.approx(L, abs=1e-9 * max(1.0, L))
    mir = solve_planar_dubins(PlanarConfig(u0, -v0, -p0), PlanarConfig(u1, -v1, -p1), r)
    assert mir.total_length == pytest.approx(L, abs=1e-9 * max(1.0, L))


def test_matches_root_finding_oracle(rng):
    for _ in range(20):
        r = rng.uniform(0.5, 3.0)
        a = PlanarConfig(*rng.uniform(-6, 6, 2), rng.uniform(-3, 3))
        b = PlanarConfig(*rng.uniform(-6, 6, 2), rng.uniform(-3, 3))
        ref = planar_oracle([a.u, a.v], a.psi, [b.u, b.v], b.psi, r, grid=1500)
        assert solve_planar_dubins(a, b, r).total_length == pytest.approx(ref, abs=1e-4)


def test_sampling():
    path = PlanarDubinsPath("LSL", (0.0, 0.0, 0.0), 1.0)
    assert len(sample_planar_path(path, PlanarConfig(0, 0, 0), 0.1)) == 1
    arc = PlanarDubinsPath("LSL", (math.pi, 0.0, 0.0), 1.0)
    smp = sample_planar_path(arc, PlanarConfig(0, 0, 0), math.pi / 3)
    assert [c.psi for _, c in smp] == pytest.approx([0, math.pi / 3, 2 * math.pi / 3, math.pi])
    with pytest.raises(ValueError):
        sample_planar_path(arc, PlanarConfig(0, 0, 0), 0.0)


def test_sample_end_matches_simulation(rng):
    for _ in range(20):
        start = PlanarConfig(*rng.uniform(-5, 5, 2), rng.uniform(-3, 3))
        goal = PlanarConfig(*rng.uniform(-5, 5, 2), rng.uniform(-3, 3))
        path = solve_planar_dubins(start, goal, 1.3)
        smp = sample_planar_path(path, start, 0.05)
        q, h = endpoint(path, start)
        s_end, last = smp[-1]
        assert s_end == pytest.approx(path.total_length, abs=1e-12)
        assert np.allclose([last.u, last.v], q, atol=1e-9)
        assert abs(wrap_angle(last.psi - h)) < 1e-9
        assert np.all(np.diff([s for s, _ in smp]) > 0)
