"""Instance files, result documents, trajectory CSV and the benchmark runner.

Instance file (JSON)::

    {
      "name": "additional-2",
      "initial": {"position": [120, 40, 20], "yaw": 90, "pitch": -15, "roll": 0},
      "final":   {"position": [130, 120, 41], "yaw": 85, "pitch": 20, "roll": 15},
      "R_pitch": 40, "R_yaw": 30,
      "theta_disc": 15, "phi_disc": 15, "step": null
    }

Angles are degrees, applied as yaw about z, then pitch, then roll about the
body x axis.  Positive pitch raises the nose: the frame is built with a
rotation of ``-pitch`` about the y axis, so a vehicle heading along +x with
pitch 10 climbs.  Instead of the three angles an endpoint may give
``"frame"``, a 3x3 matrix whose columns are the forward, lateral and normal
axes ``T, Y, U``.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .planner import PlannerConfig, PlannerInfeasible, plan
from .rmf import Configuration, Trajectory, VehicleParams

CSV_HEADER = ("s", "x", "y", "z", "tx", "ty", "tz", "yx", "yy", "yz", "ux", "uy", "uz", "kg", "kn")
FRAME_TOL = 1e-6


class InstanceError(ValueError):
    """Malformed or invalid instance or manifest; the message names the field."""


@dataclass(frozen=True)
class EndpointSpec:
    position: tuple
    yaw: float | None = None
    pitch: float | None = None
    roll: float | None = None
    frame: tuple | None = None

    def configuration(self) -> Configuration:
        if self.frame is not None:
            return Configuration(np.array(self.position, float), np.array(self.frame, float))
        return Configuration.from_degrees(self.position, self.yaw, self.pitch, self.roll)

    def to_dict(self) -> dict:
        d = {"position": list(self.position)}
        if self.frame is not None:
            d["frame"] = [list(r) for r in self.frame]
        else:
            d.update(yaw=self.yaw, pitch=self.pitch, roll=self.roll)
        return d


@dataclass(frozen=True)
class Instance:
    initial: EndpointSpec
    final: EndpointSpec
    R_pitch: float
    R_yaw: float
    name: str = ""
    theta_disc: int | None = None
    phi_disc: int | None = None
    step: float | None = None

    @property
    def params(self) -> VehicleParams:
        return VehicleParams(self.R_pitch, self.R_yaw)

    def configurations(self) -> tuple[Configuration, Configuration]:
        return self.initial.configuration(), self.final.configuration()

    def with_rolls(self, roll_i: float, roll_f: float) -> "Instance":
        for side, ep in (("initial", self.initial), ("final", self.final)):
            if ep.frame is not None:
                raise InstanceError(f"{side}: roll override needs yaw/pitch/roll angles, not a frame")
        return replace(self, initial=replace(self.initial, roll=float(roll_i)), final=replace(self.final, roll=float(roll_f)))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "initial": self.initial.to_dict(),
            "final": self.final.to_dict(),
            "R_pitch": self.R_pitch,
            "R_yaw": self.R_yaw,
            "theta_disc": self.theta_disc,
            "phi_disc": self.phi_disc,
            "step": self.step,
        }


def _number(obj, key, where, positive=False, optional=False):
    if key not in obj or obj[key] is None:
        if optional:
            return None
        raise InstanceError(f"{where}.{key}: missing")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InstanceError(f"{where}.{key}: expected a finite number, got {v!r}")
    if positive and v <= 0:
        raise InstanceError(f"{where}.{key}: must be positive, got {v!r}")
    return float(v)


def _int(obj, key, where):
    if obj.get(key) is None:
        return None
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < 2:
        raise InstanceError(f"{where}.{key}: expected an integer >= 2, got {v!r}")
    return v


def _endpoint(obj, where) -> EndpointSpec:
    if not isinstance(obj, dict):
        raise InstanceError(f"{where}: expected an object")
    pos = obj.get("position")
    if not isinstance(pos, list) or len(pos) != 3:
        raise InstanceError(f"{where}.position: expected three numbers")
    for i, p in enumerate(pos):
        _number({"v": p}, "v", f"{where}.position[{i}]")
    pos = tuple(float(p) for p in pos)
    if "frame" in obj:
        F = obj["frame"]
        try:
            M = np.array(F, dtype=float)
        except (TypeError, ValueError):
            raise InstanceError(f"{where}.frame: expected a 3x3 numeric matrix") from None
        if M.shape != (3, 3) or not np.all(np.isfinite(M)):
            raise InstanceError(f"{where}.frame: expected a 3x3 numeric matrix")
        if np.linalg.norm(M.T @ M - np.eye(3)) > FRAME_TOL or np.linalg.det(M) <= 0:
            raise InstanceError(f"{where}.frame: not a right-handed orthonormal frame")
        return EndpointSpec(pos, frame=tuple(tuple(r) for r in M.tolist()))
    return EndpointSpec(
        pos,
        _number(obj, "yaw", where),
        _number(obj, "pitch", where),
        _number(obj, "roll", where, optional=True) or 0.0,
    )


def parse_instance(doc: dict, where: str = "instance") -> Instance:
    if not isinstance(doc, dict):
        raise InstanceError(f"{where}: expected a JSON object")
    step = _number(doc, "step", where, positive=True, optional=True)
    return Instance(
        _endpoint(doc.get("initial"), f"{where}.initial"),
        _endpoint(doc.get("final"), f"{where}.final"),
        _number(doc, "R_pitch", where, positive=True),
        _number(doc, "R_yaw", where, positive=True),
        str(doc.get("name", "")),
        _int(doc, "theta_disc", where),
        _int(doc, "phi_disc", where),
        step,
    )


def _read_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InstanceError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_instance(path) -> Instance:
    return parse_instance(_read_json(path), str(path))


@dataclass
class RunResult:
    instance: Instance
    config: dict
    best_class: str | None
    total_length: float | None
    wall_time: float
    classes: list = field(default_factory=list)
    segments: list = field(default_factory=list)
    parameters: dict = field(default_factory=dict)
    trajectory: list = field(default_factory=list)
    status: str = "ok"
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "instance": self.instance.to_dict(),
            "config": dict(self.config),
            "status": self.status,
            "error": self.error,
            "best_class": self.best_class,
            "total_length": self.total_length,
            "wall_time": self.wall_time,
            "parameters": dict(self.parameters),
            "segments": list(self.segments),
            "classes": list(self.classes),
            "trajectory": {"columns": list(CSV_HEADER), "rows": [list(r) for r in self.trajectory]},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunResult":
        return cls(
            parse_instance(d["instance"]),
            dict(d["config"]),
            d["best_class"],
            d["total_length"],
            d["wall_time"],
            list(d["classes"]),
            list(d["segments"]),
            dict(d["parameters"]),
            [tuple(r) for r in d["trajectory"]["rows"]],
            d.get("status", "ok"),
            d.get("error"),
        )


def _plain(x):
    """Convert numpy scalars and containers so ``json`` writes them exactly."""
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


def trajectory_rows(traj: Trajectory) -> list[tuple]:
    R = traj.R
    cols = np.column_stack([traj.s, traj.X, R[:, :, 0], R[:, :, 1], R[:, :, 2], traj.kappa_g, traj.kappa_n])
    return [tuple(float(v) for v in row) for row in cols]


def write_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([repr(float(v)) for v in r])


def read_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = tuple(next(rd))
        if header != CSV_HEADER:
            raise InstanceError(f"{path}: unexpected header {header}")
        return np.array([[float(v) for v in r] for r in rd], dtype=float).reshape(-1, len(CSV_HEADER))


def write_result(result: RunResult, path) -> None:
    Path(path).write_text(json.dumps(_plain(result.to_dict()), indent=1))


def read_result(path) -> RunResult:
    return RunResult.from_dict(_read_json(path))


def planner_config(inst: Instance, theta_disc=None, phi_disc=None, step=None, refine=False) -> PlannerConfig:
    """Command-line values override the instance file, which overrides the defaults."""
    base = PlannerConfig()
    return PlannerConfig(
        theta_disc=theta_disc or inst.theta_disc or base.theta_disc,
        phi_disc=phi_disc or inst.phi_disc or base.phi_disc,
        step=step or inst.step,
        refine=refine,
    )


def solve_instance(inst: Instance, cfg: PlannerConfig, keep_trajectory: bool = True) -> RunResult:
    start, goal = inst.configurations()
    params = inst.params
    conf = {
        "theta_disc": cfg.theta_disc,
        "phi_disc": cfg.phi_disc,
        "sphere_phi_disc": cfg.phi_for("sphere"),
        "step": cfg.step if cfg.step is not None else params.default_step,
        "refine": cfg.refine,
    }
    t0 = time.perf_counter()
    try:
        res = plan(start, goal, params, cfg)
    except PlannerInfeasible as exc:
        return RunResult(inst, conf, None, None, time.perf_counter() - t0, status="infeasible", error=str(exc))
    wall = time.perf_counter() - t0
    best = res.best
    return RunResult(
        inst,
        conf,
        best.class_label,
        float(best.total_length),
        wall,
        [_plain(c.to_dict()) for c in res.all_feasible],
        _plain(best.segments),
        _plain(best.parameters),
        trajectory_rows(best.trajectory) if keep_trajectory else [],
    )


def run_instance(path, rpitch=None, ryaw=None, theta_disc=None, phi_disc=None, step=None, refine=False, out=None, csv_path=None) -> RunResult:
    """Load, solve and export one instance file.  Raises ``InstanceError`` on bad input."""
    inst = load_instance(path)
    if rpitch is not None or ryaw is not None:
        for name, v in (("--rpitch", rpitch), ("--ryaw", ryaw)):
            if v is not None and not v > 0:
                raise InstanceError(f"{name}: must be positive")
        inst = replace(inst, R_pitch=rpitch or inst.R_pitch, R_yaw=ryaw or inst.R_yaw)
    if step is not None and not step > 0:
        raise InstanceError("--step: must be positive")
    try:
        cfg = planner_config(inst, theta_disc, phi_disc, step, refine)
        result = solve_instance(inst, cfg)
    except ValueError as exc:
        raise InstanceError(str(exc)) from None
    if out is not None:
        write_result(result, out)
    if csv_path is not None and result.trajectory:
        write_csv(result.trajectory, csv_path)
    return result


# -- benchmark ----------------------------------------------------------------


@dataclass(frozen=True)
class BenchRow:
    label: str
    instance: Instance | None
    error: str | None = None


def expand_manifest(doc: dict, base: Path) -> list[BenchRow]:
    """Rows in manifest order.

    Each entry names an ``instance`` file (relative to the manifest) and an
    optional ``sweep`` of ``rolls`` (pairs, outer loop) and ``R_yaw``
    (inner loop).  Entries that fail to load become error rows.
    """
    if not isinstance(doc, dict):
        raise InstanceError("manifest: expected a JSON object")
    entries = doc.get("instances", [])
    if not isinstance(entries, list):
        raise InstanceError("manifest.instances: expected a list")
    rows: list[BenchRow] = []
    for k, e in enumerate(entries):
        where = f"manifest.instances[{k}]"
        label = str(e.get("label", e.get("instance", k))) if isinstance(e, dict) else str(k)
        try:
            if not isinstance(e, dict) or "instance" not in e:
                raise InstanceError(f"{where}: expected an object with 'instance'")
            inst = load_instance(base / e["instance"])
            sweep = e.get("sweep") or {}
            rolls = sweep.get("rolls") or [None]
            ryaws = sweep.get("R_yaw") or [None]
            n = 0
            for rl in rolls:
                for ry in ryaws:
                    v = inst
                    if rl is not None:
                        if not isinstance(rl, list) or len(rl) != 2:
                            raise InstanceError(f"{where}.sweep.rolls: expected [roll_i, roll_f] pairs")
                        v = v.with_rolls(*rl)
                    if ry is not None:
                        v = replace(v, R_yaw=_number({"v": ry}, "v", f"{where}.sweep.R_yaw", positive=True))
                    tag = label if len(rolls) * len(ryaws) == 1 else f"{label}.{chr(ord('a') + n)}"
                    rows.append(BenchRow(tag, v))
                    n += 1
        except InstanceError as exc:
            rows.append(BenchRow(label, None, str(exc)))
    return rows


def _bench_one(row: BenchRow, cfg_override: dict) -> dict:
    out = {"label": row.label, "status": "error", "class": None, "length": None, "time": None, "error": row.error}
    if row.instance is None:
        return out
    try:
        cfg = planner_config(row.instance, **cfg_override)
        res = solve_instance(row.instance, cfg, keep_trajectory=False)
    except Exception as exc:  # any failure is reported on its own row
        out["error"] = f"{type(exc).__name__}: {exc}"
        return out
    out.update(status=res.status, error=res.error, time=res.wall_time)
    if res.status == "ok":
        out.update(**{"class": res.best_class, "length": res.total_length})
    return out


def _warm_up() -> None:
    """Solve a small dummy instance once so imports and caches do not skew the first timing."""
    start = Configuration.from_degrees([0.0, 0.0, 0.0], 0.0, 0.0, 0.0)
    goal = Configuration.from_degrees([60.0, 20.0, 5.0], 45.0, 0.0, 0.0)
    plan(start, goal, VehicleParams(40.0, 40.0), PlannerConfig(theta_disc=4, phi_disc=4))


def run_benchmark(manifest, out=None, workers: int | None = None, warm_up: bool = True, **cfg_override) -> list[dict]:
    """One summary row per expanded manifest entry, in manifest order."""
    path = Path(manifest)
    doc = _read_json(path)
    rows = expand_manifest(doc, path.parent)
    workers = workers or int(doc.get("workers", 1))
    if warm_up and rows:
        _warm_up()
    if workers > 1 and len(rows) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            table = list(ex.map(_bench_one, rows, [cfg_override] * len(rows)))
    else:
        table = [_bench_one(r, cfg_override) for r in rows]
    if out is not None:
        Path(out).write_text(json.dumps(_plain({"manifest": str(path), "rows": table}), indent=1))
    return table


def format_table(table: list[dict]) -> str:
    lines = [f"{'instance':<24} {'length':>10} {'class':<16} {'time':>8}"]
    for r in table:
        if r["status"] == "ok":
            lines.append(f"{r['label']:<24} {r['length']:>10.2f} {r['class']:<16} {r['time']:>8.2f}")
        else:
            lines.append(f"{r['label']:<24} {'-':>10} {r['status']:<16} {'-':>8}  {r['error']}")
    return "\n".join(lines)
