"""Curvature-bounded shortest paths on a sphere and their lift to 3D.

On the unit sphere the Sabban frame ``F = [X, T, N]`` (columns, ``N = X x T``)
evolves as ``F' = F skew(u_g, 0, 1)``, so every constant-control segment is a
rotation of ``F`` about a fixed body axis:

* ``G`` (``u_g = 0``): axis ``(0, 0, 1)``, angle = arc length,
* ``L``/``R`` (``u_g = +/-U``): axis ``r (+/-U, 0, 1)``, angle = arc length / r,

with ``r = 1 / sqrt(1 + U^2)`` the turn radius on the unit sphere.  A sphere
of radius ``R_bar`` is handled by scaling to the unit sphere.

A word of three segments ``M = Rot(a1, p1) Rot(a2, p2) Rot(a3, p3)`` is a
three-axis rotation decomposition with up to two closed-form solutions.
Words with four or five segments have one or two free angles; those are
scanned on a grid, each grid point reduced to a three-segment solve, and the
best point refined by golden-section search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geom import rotation_angle_about
from .rmf import Configuration, SphereChoice, Trajectory, arc_samples

TWO_PI = 2.0 * math.pi
SNAP = 1e-10
RESIDUAL_TOL = 1e-8
GIMBAL_EPS = 1e-9
R_HAT_MAX = math.sqrt(3.0) / 2.0

THREE_SEGMENT_WORDS = ("LGL", "LGR", "RGL", "RGR", "LRL", "RLR")
FOUR_SEGMENT_WORDS = ("LRLR", "RLRL")
FIVE_SEGMENT_WORDS = ("LRLRL", "RLRLR")

# scan resolution for the free angles of 4- and 5-segment words
SCAN_4 = 36
SCAN_5 = 16
GOLDEN_ITERS = 30
CHUNK_ROWS = 60000


class UnsupportedRadius(ValueError):
    """Turn radius on the unit sphere beyond sqrt(3)/2."""


class InfeasibleSubproblem(RuntimeError):
    """No candidate word connects the two spherical configurations."""


@dataclass(frozen=True)
class SphericalPathParams:
    """Sphere radius ``R_bar`` and geodesic-curvature bound ``U_max`` (1/m)."""

    R_bar: float
    U_max: float

    @property
    def U_hat(self) -> float:
        return self.U_max * self.R_bar

    @property
    def r_hat(self) -> float:
        return 1.0 / math.sqrt(1.0 + self.U_hat**2)

    @property
    def r(self) -> float:
        return self.R_bar * self.r_hat


def sphere_params_for(choice: SphereChoice, params) -> SphericalPathParams:
    """Pitch spheres carry the yaw bound and yaw spheres the pitch bound."""
    if choice.is_pitch:
        return SphericalPathParams(params.r_pitch, params.kappa_g_max)
    return SphericalPathParams(params.r_yaw, params.kappa_n_max)


@dataclass(frozen=True)
class SphericalConfig:
    """Position relative to the sphere center and unit tangent."""

    X_sp: np.ndarray
    T_sp: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "X_sp", np.asarray(self.X_sp, dtype=float))
        object.__setattr__(self, "T_sp", np.asarray(self.T_sp, dtype=float))

    @property
    def R_bar(self) -> float:
        return float(np.linalg.norm(self.X_sp))

    @property
    def N_sp(self) -> np.ndarray:
        return np.cross(self.X_sp, self.T_sp) / self.R_bar

    def unit_frame(self) -> np.ndarray:
        x = self.X_sp / self.R_bar
        return np.column_stack([x, self.T_sp, np.cross(x, self.T_sp)])


@dataclass(frozen=True)
class SphericalPath:
    word: str
    angles: tuple[float, ...]
    R_bar: float
    r_hat: float

    @property
    def segment_lengths(self) -> tuple[float, ...]:
        return tuple(self.R_bar * (1.0 if c == "G" else self.r_hat) * a for c, a in zip(self.word, self.angles))

    @property
    def total_length(self) -> float:
        return float(sum(self.segment_lengths))

    @property
    def U_hat(self) -> float:
        return math.sqrt(1.0 / self.r_hat**2 - 1.0)


def candidate_families(r_hat: float) -> set[str]:
    if not 0.0 < r_hat <= R_HAT_MAX + 1e-12:
        raise UnsupportedRadius(f"r_hat={r_hat} outside (0, sqrt(3)/2]")
    if r_hat <= 0.5:
        return {"CGC", "CCC"}
    if r_hat <= 1.0 / math.sqrt(2.0):
        return {"CGC", "CCCC"}
    return {"CGC", "CCCCC", "CC_piC"}


def words_for(r_hat: float) -> tuple[str, ...]:
    """Words searched for a given ``r_hat``.

    Three-segment words are always searched: they are the degenerate members
    of the longer families (and ``C C_pi C`` is the ``CCC`` case with a
    half-turn middle arc).
    """
    fams = candidate_families(r_hat)
    words = list(THREE_SEGMENT_WORDS)
    if "CCCC" in fams or "CCCCC" in fams:
        words += FOUR_SEGMENT_WORDS
    if "CCCCC" in fams:
        words += FIVE_SEGMENT_WORDS
    return tuple(words)


def segment_axes(U_hat: float) -> dict[str, np.ndarray]:
    r = 1.0 / math.sqrt(1.0 + U_hat * U_hat)
    return {
        "L": np.array([U_hat * r, 0.0, r]),
        "R": np.array([-U_hat * r, 0.0, r]),
        "G": np.array([0.0, 0.0, 1.0]),
    }


def _rot(axis: np.ndarray, angle) -> np.ndarray:
    """Batched Rodrigues matrices ``(..., 3, 3)`` about a fixed unit axis."""
    angle = np.asarray(angle, dtype=float)
    c, s = np.cos(angle)[..., None, None], np.sin(angle)[..., None, None]
    K = np.array([[0.0, -axis[2], axis[1]], [axis[2], 0.0, -axis[0]], [-axis[1], axis[0], 0.0]])
    return c * np.eye(3) + s * K + (1.0 - c) * np.outer(axis, axis)


def _axis_cross(axis: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``axis x v`` for a fixed axis and batched ``v``; cheaper than ``np.cross``."""
    K = np.array([[0.0, -axis[2], axis[1]], [axis[2], 0.0, -axis[0]], [-axis[1], axis[0], 0.0]])
    return v @ K.T


def _rotate(v: np.ndarray, axis: np.ndarray, angle: np.ndarray) -> np.ndarray:
    c, s = np.cos(angle)[..., None], np.sin(angle)[..., None]
    return v * c + _axis_cross(axis, v) * s + axis * (v @ axis)[..., None] * (1.0 - c)


def _wrap(a: np.ndarray) -> np.ndarray:
    m = np.mod(a, TWO_PI)
    return np.where((m < SNAP) | (m > TWO_PI - SNAP), 0.0, m)


def _perp(v: np.ndarray, axis: np.ndarray) -> np.ndarray:
    return v - (v @ axis)[..., None] * axis


def solve_three(a1: np.ndarray, a2: np.ndarray, a3: np.ndarray, M: np.ndarray, check: bool = True):
    """All decompositions ``M = Rot(a1,p1) Rot(a2,p2) Rot(a3,p3)``.

    ``M`` has shape ``(n, 3, 3)``.  Returns angles ``(n, 2, 3)`` in
    ``[0, 2 pi)`` and a validity mask ``(n, 2)``.  The construction is exact
    whenever the middle angle exists; ``check`` additionally re-composes the
    product and rejects solutions whose residual exceeds ``RESIDUAL_TOL``.
    """
    n = M.shape[0]
    A = a1 @ a3 - (a2 @ a3) * (a1 @ a2)
    B = a1 @ np.cross(a2, a3)
    C0 = (a1 @ a2) * (a2 @ a3)
    rho = math.hypot(A, B)
    rhs = np.einsum("i,nij,j->n", a1, M, a3) - C0
    c = rhs / rho
    feasible = np.abs(c) <= 1.0 + 1e-9
    d = np.arccos(np.clip(c, -1.0, 1.0))
    gamma = math.atan2(B, A)
    p2 = np.stack([gamma + d, gamma - d], axis=1)

    # first angle: Rot(a1, p1) maps Rot(a2, p2) a3 onto M a3
    v = _rotate(np.broadcast_to(a3, (n, 2, 3)), a2, p2)
    w = np.broadcast_to((M @ a3)[:, None, :], (n, 2, 3))
    vp, wp = _perp(v, a1), _perp(w, a1)
    p1 = np.arctan2(np.sum(_axis_cross(a1, vp) * wp, axis=-1), np.sum(vp * wp, axis=-1))
    # last angle: Rot(a3, p3) maps M^T a1 onto Rot(a2, -p2) a1
    p = _rotate(np.broadcast_to(a1, (n, 2, 3)), a2, -p2)
    q = np.broadcast_to(np.einsum("nji,j->ni", M, a1)[:, None, :], (n, 2, 3))
    qp, pp = _perp(q, a3), _perp(p, a3)
    p3 = np.arctan2(np.sum(_axis_cross(a3, qp) * pp, axis=-1), np.sum(qp * pp, axis=-1))

    lock = np.linalg.norm(vp, axis=-1) < GIMBAL_EPS
    if np.any(lock):
        # only p1 + p3 is determined: put it all on the last segment
        idx = np.nonzero(lock)
        Q = np.swapaxes(_rot(a2, p2[idx]), -1, -2) @ M[idx[0]]
        p1 = p1.copy()
        p3 = p3.copy()
        p1[idx] = 0.0
        p3[idx] = rotation_angle_about(Q, a3)

    phi = _wrap(np.stack([p1, p2, p3], axis=-1))
    if not check:
        return phi, np.broadcast_to(feasible[:, None], (n, 2))
    prod = _rot(a1, phi[..., 0]) @ _rot(a2, phi[..., 1]) @ _rot(a3, phi[..., 2])
    res = np.linalg.norm(prod - M[:, None], axis=(-2, -1))
    ok = feasible[:, None] & (res < RESIDUAL_TOL)
    return phi, ok


def _weights(word: str, r_hat: float) -> np.ndarray:
    return np.array([1.0 if c == "G" else r_hat for c in word])


def _three_word(word, axes, r_hat, M, check=True):
    """Best (length, angles) for a three-segment word, per row of ``M``."""
    a = [axes[c] for c in word]
    phi, ok = solve_three(a[0], a[1], a[2], M, check)
    L = np.where(ok, phi @ _weights(word, r_hat), np.inf)
    j = np.argmin(L, axis=1)
    rows = np.arange(M.shape[0])
    return L[rows, j], phi[rows, j]


def _tail_eval(word, axes, r_hat, M, head, check=False):
    """Lengths when the first ``len(head)`` angles are fixed; rest solved in closed form.

    ``head`` is ``(n, k)``; for five-segment words ``head`` carries the first
    and the last angle.
    """
    k = head.shape[1]
    Mp = M
    first = axes[word[0]]
    Mp = np.swapaxes(_rot(first, head[:, 0]), -1, -2) @ Mp
    if len(word) == 5:
        last = axes[word[4]]
        Mp = Mp @ np.swapaxes(_rot(last, head[:, 1]), -1, -2)
        mid = word[1:4]
    else:
        mid = word[1:]
    L, phi = _three_word(mid, axes, r_hat, Mp, check)
    w = _weights(word, r_hat)
    head = _wrap(head)
    if len(word) == 5:
        full = np.concatenate([head[:, :1], phi, head[:, 1:]], axis=1)
    else:
        full = np.concatenate([head, phi], axis=1)
    return np.where(np.isfinite(L), full @ w, np.inf), full


def _golden(f, lo: np.ndarray, hi: np.ndarray, iters: int):
    """Vectorized golden-section minimization of ``f`` on per-row brackets."""
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo.copy(), hi.copy()
    c = b - g * (b - a)
    d = a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc <= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        nc = np.where(left, b - g * (b - a), d)
        nd = np.where(left, c, a + g * (b - a))
        fnew = f(np.where(left, nc, nd))
        fc, fd = np.where(left, fnew, fd), np.where(left, fc, fnew)
        c, d = nc, nd
    return np.where(fc <= fd, c, d)


def _scan_word(word, axes, r_hat, M):
    n = M.shape[0]
    nfree = len(word) - 3
    m = SCAN_4 if nfree == 1 else SCAN_5
    grid = TWO_PI * np.arange(m) / m
    if nfree == 1:
        heads = grid[:, None]
    else:
        g1, g2 = np.meshgrid(grid, grid, indexing="ij")
        heads = np.column_stack([g1.ravel(), g2.ravel()])
    h = heads.shape[0]
    Mrep = np.repeat(M, h, axis=0)
    H = np.tile(heads, (n, 1))
    L, _ = _tail_eval(word, axes, r_hat, Mrep, H)
    L = L.reshape(n, h)
    best = np.argmin(L, axis=1)
    x = heads[best].copy()
    span = TWO_PI / m

    for _ in range(2 if nfree == 2 else 1):
        for dim in range(nfree):
            def f(t, dim=dim):
                y = x.copy()
                y[:, dim] = t
                return _tail_eval(word, axes, r_hat, M, y)[0]

            x[:, dim] = _golden(f, x[:, dim] - span, x[:, dim] + span, GOLDEN_ITERS)
    Lr, full = _tail_eval(word, axes, r_hat, M, x, check=True)
    # keep the grid point when refinement wandered into an infeasible pocket
    Lg, fullg = _tail_eval(word, axes, r_hat, M, heads[best], check=True)
    use_g = ~(Lr <= Lg)
    Lr = np.where(use_g, Lg, Lr)
    full = np.where(use_g[:, None], fullg, full)
    return Lr, full


@dataclass
class BatchResult:
    """Unit-sphere lengths ``(n,)``, word index into ``words`` and angles ``(n, 5)`` (NaN padded)."""

    length: np.ndarray
    word_index: np.ndarray
    angles: np.ndarray
    words: tuple[str, ...]

    def path(self, i: int, R_bar: float, r_hat: float) -> SphericalPath:
        if not np.isfinite(self.length[i]):
            raise InfeasibleSubproblem("no candidate word connects the configurations")
        word = self.words[int(self.word_index[i])]
        return SphericalPath(word, tuple(float(a) for a in self.angles[i, : len(word)]), R_bar, r_hat)


def relative_rotations(F0: np.ndarray, F1: np.ndarray) -> np.ndarray:
    return np.swapaxes(F0, -1, -2) @ F1


def solve_unit_batch(F0: np.ndarray, F1: np.ndarray, U_hat: float, words: tuple[str, ...] | None = None) -> BatchResult:
    """Shortest word between unit-sphere Sabban frames ``F0 -> F1`` (each ``(n, 3, 3)``)."""
    r_hat = 1.0 / math.sqrt(1.0 + U_hat * U_hat)
    if words is None:
        words = words_for(r_hat)
    M = relative_rotations(np.asarray(F0, float), np.asarray(F1, float))
    n = M.shape[0]
    axes = segment_axes(U_hat)
    best = np.full(n, np.inf)
    widx = np.full(n, -1)
    angles = np.full((n, 5), np.nan)
    for wi, word in enumerate(words):
        if len(word) == 3:
            L, phi = _three_word(word, axes, r_hat, M)
        else:
            per = SCAN_4 if len(word) == 4 else SCAN_5 * SCAN_5
            rows = max(1, CHUNK_ROWS // per)
            Ls, phis = [], []
            for i in range(0, n, rows):
                Lc, pc = _scan_word(word, axes, r_hat, M[i : i + rows])
                Ls.append(Lc)
                phis.append(pc)
            L = np.concatenate(Ls) if Ls else np.zeros(0)
            phi = np.concatenate(phis) if phis else np.zeros((0, len(word)))
        better = L < best
        best = np.where(better, L, best)
        widx = np.where(better, wi, widx)
        angles[better, : len(word)] = phi[better]
        angles[better, len(word) :] = np.nan
    return BatchResult(best, widx, angles, tuple(words))


def rotation_lower_bound(F0: np.ndarray, F1: np.ndarray, r_hat: float) -> np.ndarray:
    """Lower bound on unit-sphere path length between frames.

    Every segment rotates the frame by its arc angle and rotation angles are
    subadditive, so the summed arc angles are at least the angle of
    ``F0^T F1``; each unit of arc angle costs at least ``r_hat`` of length.
    The great-circle distance between the two points is also a bound.
    """
    M = relative_rotations(F0, F1)
    tr = M[..., 0, 0] + M[..., 1, 1] + M[..., 2, 2]
    ang = np.arccos(np.clip(0.5 * (tr - 1.0), -1.0, 1.0))
    geo = np.arccos(np.clip(np.sum(F0[..., :, 0] * F1[..., :, 0], axis=-1), -1.0, 1.0))
    return np.maximum(r_hat * ang, geo)


class SphereBatch:
    """Many sub-problems on one sphere, solved in two stages.

    Construction solves only the three-segment words.  :meth:`refine`
    adds the longer words for selected rows; until a row is refined its
    ``lower`` entry is a certified lower bound rather than the solution.
    Lengths are in meters.
    """

    def __init__(self, F0: np.ndarray, F1: np.ndarray, params: SphericalPathParams):
        self.params = params
        self.words = words_for(params.r_hat)
        self.F0 = np.asarray(F0, float)
        self.F1 = np.asarray(F1, float)
        res = solve_unit_batch(self.F0, self.F1, params.U_hat, THREE_SEGMENT_WORDS)
        self.length = res.length * params.R_bar
        self.word_index = res.word_index
        self.angles = res.angles
        n = len(self.length)
        self.exact = np.full(n, len(self.words) == len(THREE_SEGMENT_WORDS))
        lb = rotation_lower_bound(self.F0, self.F1, params.r_hat) * params.R_bar
        self.lower = np.where(self.exact, self.length, np.minimum(lb, self.length))

    def __len__(self) -> int:
        return len(self.length)

    def refine(self, mask: np.ndarray) -> int:
        rows = np.nonzero(np.asarray(mask) & ~self.exact)[0]
        if len(rows) == 0:
            return 0
        extra = self.words[len(THREE_SEGMENT_WORDS) :]
        res = solve_unit_batch(self.F0[rows], self.F1[rows], self.params.U_hat, extra)
        L = res.length * self.params.R_bar
        better = L < self.length[rows]
        upd = rows[better]
        self.length[upd] = L[better]
        self.word_index[upd] = res.word_index[better] + len(THREE_SEGMENT_WORDS)
        self.angles[upd] = res.angles[better]
        self.exact[rows] = True
        self.lower[rows] = self.length[rows]
        return len(rows)

    def refine_all(self) -> None:
        self.refine(np.ones(len(self), dtype=bool))

    def path(self, i: int) -> SphericalPath:
        if not np.isfinite(self.length[i]):
            raise InfeasibleSubproblem("no candidate word connects the configurations")
        word = self.words[int(self.word_index[i])]
        return SphericalPath(word, tuple(float(a) for a in self.angles[i, : len(word)]), self.params.R_bar, self.params.r_hat)


def evolve_unit(F0: np.ndarray, word: str, angles, U_hat: float) -> np.ndarray:
    axes = segment_axes(U_hat)
    F = np.array(F0, dtype=float)
    for c, a in zip(word, angles):
        F = F @ _rot(axes[c], a)
    return F


def solve_spherical_dubins(start: SphericalConfig, goal: SphericalConfig, params: SphericalPathParams) -> SphericalPath:
    """Shortest candidate path on a sphere of radius ``params.R_bar``."""
    for cfg in (start, goal):
        if abs(cfg.R_bar - params.R_bar) > 1e-9 * params.R_bar:
            raise ValueError("configuration is not on the sphere")
        if abs(cfg.X_sp @ cfg.T_sp) > 1e-9 * params.R_bar:
            raise ValueError("tangent is not perpendicular to the position")
    batch = SphereBatch(start.unit_frame()[None], goal.unit_frame()[None], params)
    batch.refine_all()
    return batch.path(0)


def spherical_residual(start: SphericalConfig, goal: SphericalConfig, path: SphericalPath, U_hat: float) -> float:
    F = evolve_unit(start.unit_frame(), path.word, path.angles, U_hat)
    return float(np.linalg.norm(F - goal.unit_frame()))


def lift_spherical_path(
    path: SphericalPath,
    start: SphericalConfig,
    center: np.ndarray,
    choice: SphereChoice,
    step: float,
) -> Trajectory:
    """Sample a spherical path and rebuild the full vehicle frame.

    ``choice`` is the sphere's own inner/outer/left/right flag: the surface
    normal ``U`` (pitch sphere) or ``Y`` (yaw sphere) is ``-delta X_sp / R_bar``.
    """
    R_bar = path.R_bar
    if abs(start.R_bar - R_bar) > 1e-6 * R_bar:
        raise ValueError("start configuration inconsistent with the path's sphere")
    U_hat = path.U_hat
    axes = segment_axes(U_hat)
    U_max = U_hat / R_bar
    F = start.unit_frame()
    frames = [F[None]]
    s_out = [np.zeros(1)]
    ug_out = [np.zeros(1)]
    s0 = 0.0
    first_ug = None
    for c, a, seg_len in zip(path.word, path.angles, path.segment_lengths):
        if seg_len <= 0.0:
            continue
        ug = {"L": U_max, "R": -U_max, "G": 0.0}[c]
        if first_ug is None:
            first_ug = ug
        s = arc_samples(seg_len, step)[1:]
        Fs = F @ _rot(axes[c], a * s / seg_len)
        frames.append(Fs)
        s_out.append(s0 + s)
        ug_out.append(np.full(len(s), ug))
        F = Fs[-1]
        s0 += seg_len
    ug_out[0][0] = first_ug or 0.0
    Fs = np.concatenate(frames)
    s = np.concatenate(s_out)
    ug = np.concatenate(ug_out)
    return lift_frames(Fs, s, ug, center, R_bar, choice)


def lift_frames(Fs, s, ug, center, R_bar, choice: SphereChoice) -> Trajectory:
    x, T, N = Fs[:, :, 0], Fs[:, :, 1], Fs[:, :, 2]
    X = center + R_bar * x
    d = choice.delta
    if choice.is_pitch:
        U = -d * x
        Y = np.cross(U, T)
        kappa_n = np.full(len(s), d / R_bar)
        kappa_g = -d * ug
    else:
        Y = -d * x
        U = np.cross(T, Y)
        kappa_g = np.full(len(s), d / R_bar)
        kappa_n = d * ug
    R = np.stack([T, Y, U], axis=-1)
    return Trajectory(np.asarray(s, float), X, R, kappa_g, kappa_n)


def on_sphere_config(config: Configuration, center: np.ndarray) -> SphericalConfig:
    return SphericalConfig(config.X - center, config.T)


def sabban_frames(X: np.ndarray, T: np.ndarray, center: np.ndarray, R_bar: float) -> np.ndarray:
    """Unit-sphere frames for positions ``X (n,3)`` with tangents ``T (n,3)``."""
    x = (X - center) / R_bar
    return np.stack([x, T, np.cross(x, T)], axis=-1)
