"""JSON model/task ingestion and CSV/JSON result emission.

Input schemas are versioned (``schema_version: 1``) and strict: unknown
fields are rejected and invariant violations raise :class:`SchemaError`
with the offending field path.  All numeric output is written with 17
significant digits so values round-trip exactly, and every writer is
deterministic byte for byte for identical inputs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chain import ChainModel, JointSpec, LinkSpec
from .geometry import Pose, Rotation
from .metrics import GraspScorecard, MetricProfile
from .ranking import NormalizedScores, RankingReport
from .task import GraspCandidate, RigidObject, TaskTrajectory, generate_grasp_sweep

SCHEMA_VERSION = 1

_DATA_DIR = Path(__file__).resolve().parent / "data"

METRIC_NAMES = ("tov", "tme", "tem")


class SchemaError(ValueError):
    """Input file violates the schema; message carries the field path."""


def reference_robot_path(name: str) -> Path:
    """Path of a robot model shipped with the package (e.g. 'planar_rr')."""
    return _DATA_DIR / "robots" / f"{name}.json"


def reference_task_path(name: str) -> Path:
    """Path of a task file shipped with the package (e.g. 'task1')."""
    return _DATA_DIR / "tasks" / f"{name}.json"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _load_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read file ({exc})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: top level must be a JSON object")
    return data


def _check_keys(obj: dict, required: set, optional: set, path: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: expected an object")
    for key in obj:
        if key not in required and key not in optional:
            raise SchemaError(f"{path}.{key}: unknown field")
    for key in required:
        if key not in obj:
            raise SchemaError(f"{path}.{key}: missing field")


def _number(obj, key, path) -> float:
    v = obj[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise SchemaError(f"{path}.{key}: expected a number")
    return float(v)


def _integer(obj, key, path) -> int:
    v = obj[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(f"{path}.{key}: expected an integer")
    return v


def _string(obj, key, path) -> str:
    v = obj[key]
    if not isinstance(v, str):
        raise SchemaError(f"{path}.{key}: expected a string")
    return v


def _vector(obj, key, path, length) -> np.ndarray:
    v = obj[key]
    if (
        not isinstance(v, list)
        or len(v) != length
        or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v)
    ):
        raise SchemaError(f"{path}.{key}: expected {length} numbers")
    return np.array(v, dtype=float)


def _parse_pose(obj, path) -> Pose:
    _check_keys(obj, {"translation", "quaternion"}, set(), path)
    t = _vector(obj, "translation", path, 3)
    q = _vector(obj, "quaternion", path, 4)
    norm = float(np.linalg.norm(q))
    if abs(norm - 1.0) > 1e-6:
        raise SchemaError(f"{path}.quaternion: norm {norm:.9f} is not 1")
    return Pose(Rotation.from_quat(q), t)


def _dump_pose(pose: Pose) -> dict:
    return {
        "translation": [float(x) for x in pose.translation],
        "quaternion": [float(x) for x in pose.rotation.quat],
    }


def _inertia_from_six(v: np.ndarray) -> np.ndarray:
    xx, yy, zz, xy, xz, yz = v
    return np.array([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])


def _inertia_to_six(m: np.ndarray) -> list[float]:
    return [float(m[0, 0]), float(m[1, 1]), float(m[2, 2]), float(m[0, 1]), float(m[0, 2]), float(m[1, 2])]


def _check_schema_version(data: dict, path: str):
    if "schema_version" not in data:
        raise SchemaError(f"{path}.schema_version: missing field")
    if data["schema_version"] != SCHEMA_VERSION:
        raise SchemaError(
            f"{path}.schema_version: unsupported version {data['schema_version']!r}"
        )


def load_robot(path) -> ChainModel:
    """Load and validate a robot model file."""
    fname = str(path)
    data = _load_json(path)
    _check_keys(
        data,
        {"schema_version", "name", "base_pose", "joints", "links", "tool_transform"},
        {"notes"},
        fname,
    )
    _check_schema_version(data, fname)
    name = _string(data, "name", fname)
    base = _parse_pose(data["base_pose"], f"{fname}.base_pose")
    tool = _parse_pose(data["tool_transform"], f"{fname}.tool_transform")
    if not isinstance(data["joints"], list) or not data["joints"]:
        raise SchemaError(f"{fname}.joints: expected a non-empty list")
    if not isinstance(data["links"], list):
        raise SchemaError(f"{fname}.links: expected a list")
    if len(data["joints"]) != len(data["links"]):
        raise SchemaError(f"{fname}.links: need exactly one link per joint")

    joints = []
    for i, jobj in enumerate(data["joints"]):
        jpath = f"{fname}.joints[{i}]"
        _check_keys(jobj, {"kind", "axis", "origin", "limits", "velocity_limit"}, set(), jpath)
        kind = _string(jobj, "kind", jpath)
        if kind not in ("revolute", "prismatic"):
            raise SchemaError(f"{jpath}.kind: must be 'revolute' or 'prismatic'")
        axis = _vector(jobj, "axis", jpath, 3)
        if abs(np.linalg.norm(axis) - 1.0) > 1e-6:
            raise SchemaError(f"{jpath}.axis: must be a unit vector")
        limits = _vector(jobj, "limits", jpath, 2)
        if not limits[0] < limits[1]:
            raise SchemaError(f"{jpath}.limits: min must be < max")
        vel = _number(jobj, "velocity_limit", jpath)
        if not vel > 0.0:
            raise SchemaError(f"{jpath}.velocity_limit: must be positive")
        origin = _parse_pose(jobj["origin"], f"{jpath}.origin")
        joints.append(
            JointSpec(kind=kind, axis=axis, origin=origin, limits=(limits[0], limits[1]), velocity_limit=vel)
        )

    links = []
    for i, lobj in enumerate(data["links"]):
        lpath = f"{fname}.links[{i}]"
        _check_keys(lobj, {"mass", "com", "inertia"}, set(), lpath)
        mass = _number(lobj, "mass", lpath)
        if mass < 0.0:
            raise SchemaError(f"{lpath}.mass: must be non-negative, got {mass}")
        com = _vector(lobj, "com", lpath, 3)
        inertia = _inertia_from_six(_vector(lobj, "inertia", lpath, 6))
        try:
            links.append(LinkSpec(mass=mass, com=com, inertia=inertia))
        except ValueError as exc:
            raise SchemaError(f"{lpath}.inertia: {exc}") from exc

    return ChainModel(joints=tuple(joints), links=tuple(links), base_pose=base, tool_transform=tool, name=name)


def dump_robot(model: ChainModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": model.name,
        "base_pose": _dump_pose(model.base_pose),
        "joints": [
            {
                "kind": j.kind,
                "axis": [float(x) for x in j.axis],
                "origin": _dump_pose(j.origin),
                "limits": [float(j.limits[0]), float(j.limits[1])],
                "velocity_limit": float(j.velocity_limit),
            }
            for j in model.joints
        ],
        "links": [
            {
                "mass": float(l.mass),
                "com": [float(x) for x in l.com],
                "inertia": _inertia_to_six(l.inertia),
            }
            for l in model.links
        ],
        "tool_transform": _dump_pose(model.tool_transform),
    }


def save_robot(model: ChainModel, path):
    Path(path).write_text(json.dumps(dump_robot(model), indent=2, sort_keys=True) + "\n")


@dataclass(frozen=True, eq=False)
class TaskSpec:
    """A parsed task file: keyframe trajectory, object, grasp set and the
    evaluation settings the file carries."""

    name: str
    trajectory: TaskTrajectory
    obj: RigidObject
    grasps: tuple[GraspCandidate, ...]
    gravity: np.ndarray
    resample_count: int
    ik_seed: np.ndarray | None = None
    notes: str = ""


def load_task(path) -> TaskSpec:
    """Load and validate a task file."""
    fname = str(path)
    data = _load_json(path)
    _check_keys(
        data,
        {"schema_version", "name", "total_time_s", "object", "object_waypoints"},
        {"gravity", "grasps", "sweep", "resample_count", "ik_seed", "notes"},
        fname,
    )
    _check_schema_version(data, fname)
    name = _string(data, "name", fname)
    total_time = _number(data, "total_time_s", fname)
    if not total_time > 0.0:
        raise SchemaError(f"{fname}.total_time_s: must be positive")

    if "gravity" in data:
        gravity = _vector(data, "gravity", fname, 3)
    else:
        gravity = np.array([0.0, 0.0, -9.81])

    opath = f"{fname}.object"
    oobj = data["object"]
    _check_keys(oobj, {"mass", "inertia"}, {"extents"}, opath)
    mass = _number(oobj, "mass", opath)
    if not mass > 0.0:
        raise SchemaError(f"{opath}.mass: must be positive, got {mass}")
    inertia = _inertia_from_six(_vector(oobj, "inertia", opath, 6))
    extents = _vector(oobj, "extents", opath, 3) if "extents" in oobj else None
    try:
        obj = RigidObject(mass=mass, inertia=inertia, extents=extents)
    except ValueError as exc:
        raise SchemaError(f"{opath}: {exc}") from exc

    wobj = data["object_waypoints"]
    if not isinstance(wobj, list) or len(wobj) < 2:
        raise SchemaError(f"{fname}.object_waypoints: expected a list of >= 2 waypoints")
    times = []
    poses = []
    for i, wp in enumerate(wobj):
        wpath = f"{fname}.object_waypoints[{i}]"
        _check_keys(wp, {"t", "translation", "quaternion"}, set(), wpath)
        times.append(_number(wp, "t", wpath))
        poses.append(
            _parse_pose({"translation": wp["translation"], "quaternion": wp["quaternion"]}, wpath)
        )
    times = np.array(times)
    if abs(times[0]) > 1e-9:
        raise SchemaError(f"{fname}.object_waypoints[0].t: trajectory must start at t = 0")
    if np.any(np.diff(times) <= 0.0):
        raise SchemaError(f"{fname}.object_waypoints: times must be strictly increasing")
    if abs(times[-1] - total_time) > 1e-9:
        raise SchemaError(
            f"{fname}.object_waypoints[{len(times) - 1}].t: last time must equal total_time_s"
        )
    trajectory = TaskTrajectory(tuple(poses), times)

    has_grasps = "grasps" in data
    has_sweep = "sweep" in data
    if has_grasps == has_sweep:
        raise SchemaError(f"{fname}: exactly one of 'grasps' or 'sweep' is required")
    if has_grasps:
        gobj = data["grasps"]
        if not isinstance(gobj, list) or not gobj:
            raise SchemaError(f"{fname}.grasps: expected a non-empty list")
        grasps = []
        seen = set()
        for i, g in enumerate(gobj):
            gpath = f"{fname}.grasps[{i}]"
            _check_keys(g, {"id", "translation", "quaternion"}, set(), gpath)
            gid = _string(g, "id", gpath)
            if not gid:
                raise SchemaError(f"{gpath}.id: must be non-empty")
            if gid in seen:
                raise SchemaError(f"{gpath}.id: duplicate grasp id {gid!r}")
            seen.add(gid)
            grasps.append(
                GraspCandidate(
                    gid,
                    _parse_pose(
                        {"translation": g["translation"], "quaternion": g["quaternion"]}, gpath
                    ),
                )
            )
    else:
        spath = f"{fname}.sweep"
        sobj = data["sweep"]
        _check_keys(sobj, {"start", "end", "count"}, set(), spath)
        count = _integer(sobj, "count", spath)
        if count < 2:
            raise SchemaError(f"{spath}.count: must be >= 2")
        start = _parse_pose(sobj["start"], f"{spath}.start")
        end = _parse_pose(sobj["end"], f"{spath}.end")
        grasps = generate_grasp_sweep(start, end, count)

    resample_count = 50
    if "resample_count" in data:
        resample_count = _integer(data, "resample_count", fname)
        if resample_count < 2:
            raise SchemaError(f"{fname}.resample_count: must be >= 2")

    ik_seed = None
    if "ik_seed" in data:
        v = data["ik_seed"]
        if not isinstance(v, list) or any(
            isinstance(x, bool) or not isinstance(x, (int, float)) for x in v
        ):
            raise SchemaError(f"{fname}.ik_seed: expected a list of numbers")
        ik_seed = np.array(v, dtype=float)

    notes = _string(data, "notes", fname) if "notes" in data else ""
    return TaskSpec(
        name=name,
        trajectory=trajectory,
        obj=obj,
        grasps=tuple(grasps),
        gravity=gravity,
        resample_count=resample_count,
        ik_seed=ik_seed,
        notes=notes,
    )


def dump_task(spec: TaskSpec) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "name": spec.name,
        "total_time_s": float(spec.trajectory.total_time),
        "gravity": [float(x) for x in spec.gravity],
        "object": {
            "mass": float(spec.obj.mass),
            "inertia": _inertia_to_six(spec.obj.inertia),
        },
        "object_waypoints": [
            {"t": float(t), **_dump_pose(p)}
            for t, p in zip(spec.trajectory.times, spec.trajectory.poses)
        ],
        "grasps": [{"id": g.id, **_dump_pose(g.transform)} for g in spec.grasps],
        "resample_count": spec.resample_count,
    }
    if spec.obj.extents is not None:
        out["object"]["extents"] = [float(x) for x in spec.obj.extents]
    if spec.ik_seed is not None:
        out["ik_seed"] = [float(x) for x in spec.ik_seed]
    if spec.notes:
        out["notes"] = spec.notes
    return out


def save_task(spec: TaskSpec, path):
    Path(path).write_text(json.dumps(dump_task(spec), indent=2, sort_keys=True) + "\n")


def write_scorecards_csv(path, scorecards, scores: NormalizedScores | None, pareto_ids):
    """One row per grasp: raw scalars, normalized scalars, feasibility and
    Pareto membership.  Infeasible grasps keep empty numeric cells."""
    norm_by_id = {}
    if scores is not None:
        for i, gid in enumerate(scores.grasp_ids):
            norm_by_id[gid] = (scores.tov[i], scores.tme[i], scores.tem[i])
    pareto_ids = set(pareto_ids)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "grasp_id",
                "feasible",
                "h_tov",
                "h_tme",
                "h_tem",
                "h_tov_norm",
                "h_tme_norm",
                "h_tem_norm",
                "pareto",
            ]
        )
        for sc in scorecards:
            if sc.feasible:
                norm = norm_by_id.get(sc.grasp_id)
                writer.writerow(
                    [
                        sc.grasp_id,
                        "true",
                        _fmt(sc.h_tov),
                        _fmt(sc.h_tme),
                        _fmt(sc.h_tem),
                        _fmt(norm[0]) if norm else "",
                        _fmt(norm[1]) if norm else "",
                        _fmt(norm[2]) if norm else "",
                        "true" if sc.grasp_id in pareto_ids else "false",
                    ]
                )
            else:
                writer.writerow([sc.grasp_id, "false", "", "", "", "", "", "", "false"])


def read_scorecards_csv(path) -> list[GraspScorecard]:
    """Parse a scorecards.csv back into scalar-only scorecards (profiles are
    not stored in the CSV)."""
    cards = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            feasible = row["feasible"] == "true"
            cards.append(
                GraspScorecard(
                    grasp_id=row["grasp_id"],
                    feasible=feasible,
                    h_tov=float(row["h_tov"]) if feasible else None,
                    h_tme=float(row["h_tme"]) if feasible else None,
                    h_tem=float(row["h_tem"]) if feasible else None,
                )
            )
    return cards


def write_profile_csv(path, grasp_ids, profiles: list[MetricProfile]):
    """Grasp x waypoint matrix of one metric (heatmap data); the header row
    carries the arc-length parameter of each waypoint."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if profiles:
            writer.writerow(["grasp_id"] + [_fmt(si) for si in profiles[0].s])
        for gid, profile in zip(grasp_ids, profiles):
            writer.writerow([gid] + [_fmt(v) for v in profile.values])


def write_scalars_long_csv(path, scores: NormalizedScores):
    """Long-format normalized scalars: one (grasp, metric, value) row per
    cell, ready for any plotting tool."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["grasp_id", "metric", "value_normalized"])
        for i, gid in enumerate(scores.grasp_ids):
            writer.writerow([gid, "tov", _fmt(scores.tov[i])])
            writer.writerow([gid, "tme", _fmt(scores.tme[i])])
            writer.writerow([gid, "tem", _fmt(scores.tem[i])])


def report_to_dict(report: RankingReport, task_name: str, robot_name: str, scorecards) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "task": task_name,
        "robot": robot_name,
        "n_grasps": len(scorecards),
        "n_feasible": sum(1 for sc in scorecards if sc.feasible),
        "infeasible": [sc.grasp_id for sc in scorecards if not sc.feasible],
        "argbest": report.argbest,
        "pareto_front": list(report.pareto),
        "conflict": report.conflict,
        "weights": list(report.weights) if report.weights is not None else None,
        "scalarized_order": (
            [[gid, score] for gid, score in report.scalarized]
            if report.scalarized is not None
            else None
        ),
    }
    return out


def write_report_json(path, report_dict: dict):
    Path(path).write_text(json.dumps(report_dict, indent=2, sort_keys=True) + "\n")
