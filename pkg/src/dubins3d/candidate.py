"""Candidate paths and the sphere-surface-sphere grid minimization shared by all classes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rmf import Configuration, SphereChoice, SphereSelection, Trajectory, VehicleParams, tangent_sphere_center
from .sphere import SphereBatch, SphericalPathParams, sabban_frames, sphere_params_for

PAIRING_ORDER = ("inner", "outer", "left", "right")


class ClassInfeasible(RuntimeError):
    """A path class cannot be built for a sphere pairing; ``reason`` is a short code."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


@dataclass
class CandidatePath:
    class_label: str
    total_length: float
    parameters: dict
    segments: list = field(default_factory=list)
    trajectory: Trajectory | None = None

    @property
    def family(self) -> str:
        return self.class_label.split("_", 1)[0]

    def summary(self) -> dict:
        return {
            "class_label": self.class_label,
            "total_length": self.total_length,
            "parameters": dict(self.parameters),
            "segments": list(self.segments),
        }


def class_label(family: str, sel: SphereSelection) -> str:
    if family == "pl":
        return f"pl_{sel.initial.name}_{sel.final.name}"
    return f"{family}_{sel.initial.name}"


@dataclass(frozen=True)
class EndSpheres:
    """Tangent spheres chosen at both boundary configurations."""

    start: Configuration
    goal: Configuration
    sel: SphereSelection
    params: VehicleParams

    @property
    def r_i(self) -> np.ndarray:
        return tangent_sphere_center(self.start, self.sel.initial, self.params)

    @property
    def r_f(self) -> np.ndarray:
        return tangent_sphere_center(self.goal, self.sel.final, self.params)

    @property
    def R_bar(self) -> float:
        return self.sel.initial.radius(self.params)

    def sphere_params(self, choice: SphereChoice | None = None) -> SphericalPathParams:
        return sphere_params_for(choice or self.sel.initial, self.params)

    def initial_batch(self, X: np.ndarray, T: np.ndarray) -> SphereBatch:
        """Paths from the start configuration to many exit states on the initial sphere."""
        R = self.R_bar
        F0 = sabban_frames(self.start.X[None], self.start.T[None], self.r_i, R)
        F1 = sabban_frames(X, T, self.r_i, R)
        return SphereBatch(np.broadcast_to(F0, F1.shape), F1, self.sphere_params(self.sel.initial))

    def final_batch(self, X: np.ndarray, T: np.ndarray) -> SphereBatch:
        R = self.sel.final.radius(self.params)
        F0 = sabban_frames(X, T, self.r_f, R)
        F1 = sabban_frames(self.goal.X[None], self.goal.T[None], self.r_f, R)
        return SphereBatch(F0, np.broadcast_to(F1, F0.shape), self.sphere_params(self.sel.final))


def minimize_pieces(
    first: SphereBatch,
    last: SphereBatch,
    ia: np.ndarray,
    ib: np.ndarray,
    middle: np.ndarray | None = None,
    middle_batch: SphereBatch | None = None,
) -> tuple[int, float]:
    """Index and value of ``min_c first[ia[c]] + middle[c] + last[ib[c]]``.

    ``middle`` holds exact per-combination lengths; alternatively
    ``middle_batch`` holds a staged sphere batch indexed by combination.
    Rows of the staged batches are refined only where their lower bounds
    could still beat the incumbent, so the result equals the fully refined
    minimum.  Ties go to the lowest combination index.
    """
    if (middle is None) == (middle_batch is None):
        raise ValueError("give exactly one of middle, middle_batch")

    def mid_upper():
        return middle if middle is not None else middle_batch.length

    def mid_lower():
        return middle if middle is not None else middle_batch.lower

    def incumbent():
        tot = first.length[ia] + mid_upper() + last.length[ib]
        return float(np.min(tot)) if len(tot) else np.inf

    stages = [(first, ia), (last, ib)]
    if middle_batch is not None:
        stages.append((middle_batch, None))
    for batch, idx in stages:
        best = incumbent()
        pot = first.lower[ia] + mid_lower() + last.lower[ib]
        if idx is None:
            mask = pot < best
        else:
            mask = np.zeros(len(batch), dtype=bool)
            per = np.full(len(batch), np.inf)
            np.minimum.at(per, idx, pot)
            mask = per < best
        batch.refine(mask)
    tot = first.length[ia] + mid_upper() + last.length[ib]
    c = int(np.argmin(tot))
    return c, float(tot[c])
