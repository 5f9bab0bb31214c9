"""Planar Dubins shortest paths (CSC and CCC words) with a single turn radius.

The core routine :func:`dubins_lengths` is vectorized so the surface
classes can evaluate thousands of boundary pairs at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
WORDS = ("LSL", "LSR", "RSL", "RSR", "LRL", "RLR")
# curvature sign per letter (S is straight)
LETTER_SIGN = {"L": 1.0, "R": -1.0, "S": 0.0}
CCC_SLACK = 1e-12
SNAP = 1e-10
ENDPOINT_TOL = 1e-6


def wrap_angle(a):
    """Wrap to ``(-pi, pi]``."""
    w = np.mod(np.asarray(a, dtype=float) + math.pi, TWO_PI) - math.pi
    w = np.where(w <= -math.pi, w + TWO_PI, w)
    return float(w) if np.ndim(w) == 0 else w


def _mod2pi(a):
    m = np.mod(a, TWO_PI)
    return np.where((m < SNAP) | (m > TWO_PI - SNAP), 0.0, m)


@dataclass(frozen=True)
class PlanarConfig:
    u: float
    v: float
    psi: float

    def __post_init__(self):
        object.__setattr__(self, "psi", wrap_angle(self.psi))


@dataclass(frozen=True)
class PlanarDubinsPath:
    word: str
    segment_lengths: tuple[float, float, float]
    radius: float

    @property
    def total_length(self) -> float:
        return float(sum(self.segment_lengths))

    def curvatures(self) -> tuple[float, float, float]:
        return tuple(LETTER_SIGN[c] / self.radius for c in self.word)


def _word_params(alpha, beta, d):
    """Normalized segment parameters ``(6, 3, ...)`` for all words; NaN where a word does not exist."""
    sa, sb, ca, cb = np.sin(alpha), np.sin(beta), np.cos(alpha), np.cos(beta)
    cab = np.cos(alpha - beta)
    shape = np.broadcast(alpha, beta, d).shape
    out = np.full((6, 3) + shape, np.nan)

    # LSL
    p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb)
    tmp = np.arctan2(cb - ca, d + sa - sb)
    ok = p2 >= 0.0
    out[0, 0] = np.where(ok, _mod2pi(-alpha + tmp), np.nan)
    out[0, 1] = np.where(ok, np.sqrt(np.maximum(p2, 0.0)), np.nan)
    out[0, 2] = np.where(ok, _mod2pi(beta - tmp), np.nan)

    # LSR
    p2 = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb)
    p = np.sqrt(np.maximum(p2, 0.0))
    tmp = np.arctan2(-ca - cb, d + sa + sb) - np.arctan2(-2.0, p)
    ok = p2 >= 0.0
    out[1, 0] = np.where(ok, _mod2pi(-alpha + tmp), np.nan)
    out[1, 1] = np.where(ok, p, np.nan)
    out[1, 2] = np.where(ok, _mod2pi(-beta + tmp), np.nan)

    # RSL
    p2 = -2.0 + d * d + 2.0 * cab - 2.0 * d * (sa + sb)
    p = np.sqrt(np.maximum(p2, 0.0))
    tmp = np.arctan2(ca + cb, d - sa - sb) - np.arctan2(2.0, p)
    ok = p2 >= 0.0
    out[2, 0] = np.where(ok, _mod2pi(alpha - tmp), np.nan)
    out[2, 1] = np.where(ok, p, np.nan)
    out[2, 2] = np.where(ok, _mod2pi(beta - tmp), np.nan)

    # RSR
    p2 = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa)
    tmp = np.arctan2(ca - cb, d - sa + sb)
    ok = p2 >= 0.0
    out[3, 0] = np.where(ok, _mod2pi(alpha - tmp), np.nan)
    out[3, 1] = np.where(ok, np.sqrt(np.maximum(p2, 0.0)), np.nan)
    out[3, 2] = np.where(ok, _mod2pi(-beta + tmp), np.nan)

    # LRL
    c = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0
    ok = np.abs(c) <= 1.0 + CCC_SLACK
    mid = _mod2pi(TWO_PI - np.arccos(np.clip(c, -1.0, 1.0)))
    first = _mod2pi(-alpha - np.arctan2(ca - cb, d + sa - sb) + 0.5 * mid)
    out[4, 0] = np.where(ok, first, np.nan)
    out[4, 1] = np.where(ok, mid, np.nan)
    out[4, 2] = np.where(ok, _mod2pi(beta - alpha - first + mid), np.nan)

    # RLR
    c = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0
    ok = np.abs(c) <= 1.0 + CCC_SLACK
    mid = _mod2pi(TWO_PI - np.arccos(np.clip(c, -1.0, 1.0)))
    first = _mod2pi(alpha - np.arctan2(ca - cb, d - sa + sb) + 0.5 * mid)
    out[5, 0] = np.where(ok, first, np.nan)
    out[5, 1] = np.where(ok, mid, np.nan)
    out[5, 2] = np.where(ok, _mod2pi(alpha - beta - first + mid), np.nan)
    return out


def _endpoint(u0, v0, psi0, params, radius):
    """Forward-simulate normalized word parameters ``(6, 3, ...)``."""
    u = np.broadcast_to(np.asarray(u0, dtype=float), params.shape[2:]).copy()
    v = np.broadcast_to(np.asarray(v0, dtype=float), params.shape[2:]).copy()
    psi = np.broadcast_to(np.asarray(psi0, dtype=float), params.shape[2:]).copy()
    u = np.broadcast_to(u, (6,) + u.shape).copy()
    v = np.broadcast_to(v, (6,) + v.shape).copy()
    psi = np.broadcast_to(psi, (6,) + psi.shape).copy()
    for w, word in enumerate(WORDS):
        for k, letter in enumerate(word):
            t = params[w, k]
            if letter == "S":
                u[w] += radius * t * np.cos(psi[w])
                v[w] += radius * t * np.sin(psi[w])
            else:
                sg = LETTER_SIGN[letter]
                new = psi[w] + sg * t
                u[w] += sg * radius * (np.sin(new) - np.sin(psi[w]))
                v[w] += sg * radius * (np.cos(psi[w]) - np.cos(new))
                psi[w] = new
    return u, v, psi


def dubins_lengths(u0, v0, psi0, u1, v1, psi1, radius: float):
    """Lengths of all six words, shape ``(6, ...)``; ``inf`` where a word fails.

    Returns ``(lengths, seg)`` where ``seg`` holds segment lengths in meters
    with shape ``(6, 3, ...)``.
    """
    u0, v0, psi0, u1, v1, psi1 = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (u0, v0, psi0, u1, v1, psi1))
    )
    dx, dy = u1 - u0, v1 - v0
    D = np.hypot(dx, dy)
    d = D / radius
    theta = np.where(D > 0.0, np.arctan2(dy, dx), 0.0)
    alpha = np.mod(psi0 - theta, TWO_PI)
    beta = np.mod(psi1 - theta, TWO_PI)
    params = _word_params(alpha, beta, d)
    valid = np.all(np.isfinite(params), axis=1)
    params = np.where(valid[:, None], params, 0.0)
    ue, ve, pe = _endpoint(u0, v0, psi0, params, radius)
    scale = np.maximum(1.0, D)
    err = np.hypot(ue - u1, ve - v1) / scale + np.abs(wrap_angle(pe - psi1))
    valid &= err < ENDPOINT_TOL
    seg = params * radius
    lengths = np.where(valid, seg.sum(axis=1), np.inf)
    return lengths, seg


def solve_planar_dubins(start: PlanarConfig, goal: PlanarConfig, radius: float) -> PlanarDubinsPath:
    """Shortest Dubins path; ties resolved by word order LSL < LSR < RSL < RSR < LRL < RLR."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    lengths, seg = dubins_lengths(start.u, start.v, start.psi, goal.u, goal.v, goal.psi, radius)
    w = int(np.argmin(lengths))
    if not np.isfinite(lengths[w]):
        raise RuntimeError("no planar Dubins word reached the goal")
    return PlanarDubinsPath(WORDS[w], tuple(float(x) for x in seg[w]), radius)


@dataclass
class PlanarSamples:
    s: np.ndarray
    u: np.ndarray
    v: np.ndarray
    psi: np.ndarray
    kappa: np.ndarray


def sample_planar_arrays(path: PlanarDubinsPath, start: PlanarConfig, step: float) -> PlanarSamples:
    """Samples of ``path`` every ``step`` meters plus every segment boundary."""
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step!r}")
    s_all, u_all, v_all, psi_all, k_all = [np.zeros(1)], [np.array([start.u])], [np.array([start.v])], [np.array([start.psi])], []
    u, v, psi, s0 = start.u, start.v, start.psi, 0.0
    first_kappa = None
    for letter, length in zip(path.word, path.segment_lengths):
        if length <= 0.0:
            continue
        k = LETTER_SIGN[letter] / path.radius
        if first_kappa is None:
            first_kappa = k
        n = max(1, math.ceil(length / step - 1e-9))
        t = np.linspace(0.0, length, n + 1)[1:]
        if k == 0.0:
            uu = u + t * math.cos(psi)
            vv = v + t * math.sin(psi)
            pp = np.full_like(t, psi)
        else:
            pp = psi + k * t
            uu = u + (np.sin(pp) - math.sin(psi)) / k
            vv = v + (math.cos(psi) - np.cos(pp)) / k
        s_all.append(s0 + t)
        u_all.append(uu)
        v_all.append(vv)
        psi_all.append(pp)
        k_all.append(np.full_like(t, k))
        u, v, psi, s0 = float(uu[-1]), float(vv[-1]), float(pp[-1]), s0 + length
    kappa = np.concatenate([[first_kappa or 0.0]] + k_all)
    return PlanarSamples(
        np.concatenate(s_all), np.concatenate(u_all), np.concatenate(v_all), np.concatenate(psi_all), kappa
    )


def sample_planar_path(path: PlanarDubinsPath, start: PlanarConfig, step: float) -> list[tuple[float, PlanarConfig]]:
    smp = sample_planar_arrays(path, start, step)
    return [(float(s), PlanarConfig(float(u), float(v), float(p))) for s, u, v, p in zip(smp.s, smp.u, smp.v, smp.psi)]
