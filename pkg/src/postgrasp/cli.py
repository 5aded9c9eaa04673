"""Command-line surface.

Verbs:

* ``evaluate``       full protocol: tasks x grasps -> scorecards, metric
                     heatmaps, ranking report
* ``inspect-model``  FK / Jacobian of a robot file at a configuration
* ``metrics-at``     per-waypoint metric values for one grasp (debugging)
* ``pareto``         re-rank an existing scorecards.csv

Everything is randomness-free; two runs on identical inputs produce
byte-identical outputs regardless of the parallelism degree.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fileio
from .chain import ChainModel, forward_kinematics, geometric_jacobian
from .fileio import SchemaError, TaskSpec
from .ik import IkSettings, default_seed
from .metrics import GraspScorecard, evaluate_grasp
from .ranking import build_report, normalize
from .task import GraspCandidate, resample


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    """Inputs of one ``evaluate`` invocation."""

    robot: Path
    tasks: list[Path]
    out: Path
    resample: int | None = None
    weights: tuple[float, float, float] | None = None
    allow_infeasible: bool = False
    index_quadrature: bool = False
    jobs: int = 1
    ik_damping: float | None = None
    ik_max_iterations: int | None = None
    ik_position_tolerance: float | None = None
    ik_orientation_tolerance: float | None = None
    grasps_override: list[GraspCandidate] | None = None


def _sanitize(name: str) -> str:
    out = re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_")
    return out or "task"


def _ik_settings(config: RunConfig, spec: TaskSpec, model: ChainModel) -> IkSettings:
    kwargs = {}
    if config.ik_damping is not None:
        kwargs["damping"] = config.ik_damping
    if config.ik_max_iterations is not None:
        kwargs["max_iterations"] = config.ik_max_iterations
    if config.ik_position_tolerance is not None:
        kwargs["position_tolerance"] = config.ik_position_tolerance
    if config.ik_orientation_tolerance is not None:
        kwargs["orientation_tolerance"] = config.ik_orientation_tolerance
    seed = spec.ik_seed if spec.ik_seed is not None else default_seed(model)
    if seed.shape[0] != model.n:
        raise CliError(
            f"task {spec.name!r}: ik_seed has length {seed.shape[0]}, robot has {model.n} joints"
        )
    return IkSettings(seed=seed, **kwargs)


def _evaluate_task(
    model: ChainModel, spec: TaskSpec, config: RunConfig
) -> list[GraspScorecard]:
    traj = resample(spec.trajectory, config.resample or spec.resample_count)
    grasps = config.grasps_override or list(spec.grasps)
    settings = _ik_settings(config, spec, model)

    def run_one(grasp: GraspCandidate) -> GraspScorecard:
        return evaluate_grasp(
            model,
            traj,
            grasp,
            spec.obj,
            ik_settings=settings,
            gravity=spec.gravity,
            index_quadrature=config.index_quadrature,
        )

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            scorecards = list(pool.map(run_one, grasps))
    else:
        scorecards = [run_one(g) for g in grasps]
    return scorecards


def emit_plot_data(outdir: Path, scorecards, scores) -> None:
    """Write the per-metric heatmap CSVs and the long-format normalized
    scalars CSV for external plotting."""
    feasible = [sc for sc in scorecards if sc.feasible]
    ids = [sc.grasp_id for sc in feasible]
    for metric, attr in (
        ("tov", "tov_profile"),
        ("tme", "tme_profile"),
        ("tem", "tem_profile"),
    ):
        fileio.write_profile_csv(
            outdir / f"profile_{metric}.csv", ids, [getattr(sc, attr) for sc in feasible]
        )
    fileio.write_scalars_long_csv(outdir / "scalars_long.csv", scores)


def run_evaluation(config: RunConfig) -> int:
    """Evaluate every task in the config; returns the process exit status.

    Nonzero when any grasp is infeasible (unless allowed) or when a task
    has no feasible grasp at all.
    """
    model = fileio.load_robot(config.robot)
    status = 0
    for task_path in config.tasks:
        spec = fileio.load_task(task_path)
        scorecards = _evaluate_task(model, spec, config)
        outdir = config.out / _sanitize(spec.name)
        outdir.mkdir(parents=True, exist_ok=True)

        infeasible = [sc.grasp_id for sc in scorecards if not sc.feasible]
        if infeasible and not config.allow_infeasible:
            status = max(status, 2)
            print(
                f"{spec.name}: infeasible grasps: {', '.join(infeasible)}",
                file=sys.stderr,
            )
        if not any(sc.feasible for sc in scorecards):
            fileio.write_scorecards_csv(outdir / "scorecards.csv", scorecards, None, [])
            print(f"{spec.name}: no feasible grasps", file=sys.stderr)
            status = max(status, 2)
            continue

        scores = normalize(scorecards)
        report = build_report(scorecards, weights=config.weights)
        fileio.write_scorecards_csv(
            outdir / "scorecards.csv", scorecards, scores, report.pareto
        )
        emit_plot_data(outdir, scorecards, scores)
        fileio.write_report_json(
            outdir / "report.json",
            fileio.report_to_dict(report, spec.name, model.name, scorecards),
        )
        print(
            f"{spec.name}: feasible {sum(sc.feasible for sc in scorecards)}/{len(scorecards)}, "
            f"conflict={str(report.conflict).lower()}, pareto=[{', '.join(report.pareto)}] "
            f"-> {outdir}"
        )
    return status


def _parse_weights(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise CliError("--weights expects three comma-separated numbers")
    try:
        w = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise CliError(f"--weights: {exc}") from exc
    return w


def _parse_config_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(p) for p in text.split(",")])
    except ValueError as exc:
        raise CliError(f"--config: {exc}") from exc


def _parse_grasps_override(text: str) -> list[GraspCandidate]:
    """Accept either a JSON literal or a path to a JSON file holding
    [{"id", "translation", "quaternion"}, ...]."""
    raw = text.strip()
    if not raw.startswith("["):
        raw = Path(text).read_text()
    try:
        entries = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CliError(f"--grasps-override: invalid JSON ({exc.msg})") from exc
    if not isinstance(entries, list) or not entries:
        raise CliError("--grasps-override: expected a non-empty JSON list")
    grasps = []
    for i, entry in enumerate(entries):
        try:
            fileio._check_keys(entry, {"id", "translation", "quaternion"}, set(), f"grasps[{i}]")
            gid = fileio._string(entry, "id", f"grasps[{i}]")
            pose = fileio._parse_pose(
                {"translation": entry["translation"], "quaternion": entry["quaternion"]},
                f"grasps[{i}]",
            )
        except SchemaError as exc:
            raise CliError(f"--grasps-override: {exc}") from exc
        grasps.append(GraspCandidate(gid, pose))
    return grasps


def _cmd_evaluate(args) -> int:
    config = RunConfig(
        robot=Path(args.robot),
        tasks=[Path(t) for t in args.task],
        out=Path(args.out),
        resample=args.resample,
        weights=_parse_weights(args.weights) if args.weights else None,
        allow_infeasible=args.allow_infeasible,
        index_quadrature=args.index_quadrature,
        jobs=args.jobs,
        ik_damping=args.ik_damping,
        ik_max_iterations=args.ik_max_iterations,
        grasps_override=(
            _parse_grasps_override(args.grasps_override) if args.grasps_override else None
        ),
    )
    return run_evaluation(config)


def _cmd_inspect_model(args) -> int:
    model = fileio.load_robot(args.robot)
    q = _parse_config_vector(args.config) if args.config else default_seed(model)
    if q.shape[0] != model.n:
        raise CliError(f"--config has {q.shape[0]} values, robot has {model.n} joints")
    print(f"model: {model.name} ({model.n} joints)")
    for i, joint in enumerate(model.joints):
        print(
            f"  joint {i}: {joint.kind:9s} axis=({', '.join(f'{a:g}' for a in joint.axis)}) "
            f"limits=({joint.limits[0]:g}, {joint.limits[1]:g})"
        )
    pose = forward_kinematics(model, q)
    print(f"q: {', '.join(f'{x:g}' for x in q)}")
    print(f"tool position: {', '.join(f'{x:.6g}' for x in pose.translation)}")
    print(f"tool quaternion (w,x,y,z): {', '.join(f'{x:.6g}' for x in pose.rotation.quat)}")
    print("jacobian:")
    for row in geometric_jacobian(model, q):
        print("  " + "  ".join(f"{x: .6g}" for x in row))
    return 0


def _cmd_metrics_at(args) -> int:
    model = fileio.load_robot(args.robot)
    spec = fileio.load_task(args.task)
    config = RunConfig(
        robot=Path(args.robot),
        tasks=[Path(args.task)],
        out=Path("."),
        resample=args.resample,
    )
    grasps = {g.id: g for g in spec.grasps}
    if args.grasp not in grasps:
        raise CliError(f"grasp {args.grasp!r} not in task (ids: {', '.join(grasps)})")
    traj = resample(spec.trajectory, config.resample or spec.resample_count)
    settings = _ik_settings(config, spec, model)
    sc = evaluate_grasp(
        model, traj, grasps[args.grasp], spec.obj, ik_settings=settings, gravity=spec.gravity
    )
    if not sc.feasible:
        print(f"grasp {args.grasp}: infeasible (first waypoint unreachable)")
        return 2
    k = args.waypoint
    n = len(sc.tov_profile.values)
    if not 0 <= k < n:
        raise CliError(f"--waypoint must be in [0, {n - 1}]")
    print(f"grasp {args.grasp}, waypoint {k}/{n - 1}:")
    print(f"  s            = {sc.tov_profile.s[k]:.6g}")
    print(f"  tov a^2      = {sc.tov_profile.values[k]:.6g}")
    print(f"  |tau|^2      = {sc.tme_profile.values[k]:.6g}")
    print(f"  m_e          = {sc.tem_profile.values[k]:.6g}")
    print(f"  near_singular= {bool(sc.tem_profile.near_singular[k])}")
    print(f"  unreachable  = {bool(sc.tov_profile.unreachable[k])}")
    print(f"scalars: H_tov={sc.h_tov:.6g} H_tme={sc.h_tme:.6g} H_tem={sc.h_tem:.6g}")
    return 0


def _cmd_pareto(args) -> int:
    scorecards = fileio.read_scorecards_csv(args.scorecards)
    weights = _parse_weights(args.weights) if args.weights else None
    report = build_report(scorecards, weights=weights)
    payload = fileio.report_to_dict(report, args.scorecards, "", scorecards)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="postgrasp",
        description="Rank grasp candidates by manipulability, torque effort and "
        "effective mass along a post-grasp trajectory.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="run the full evaluation protocol")
    p_eval.add_argument("--robot", required=True, help="robot model JSON")
    p_eval.add_argument(
        "--task", required=True, action="append", help="task JSON (repeatable)"
    )
    p_eval.add_argument("--out", required=True, help="output directory")
    p_eval.add_argument("--resample", type=int, default=None, help="waypoint count override")
    p_eval.add_argument("--weights", default=None, help="scalarization weights a,b,c")
    p_eval.add_argument("--allow-infeasible", action="store_true")
    p_eval.add_argument(
        "--index-quadrature",
        action="store_true",
        help="integrate over uniform waypoint index instead of arc length",
    )
    p_eval.add_argument("--jobs", type=int, default=1, help="parallel grasp evaluations")
    p_eval.add_argument("--ik-damping", type=float, default=None)
    p_eval.add_argument("--ik-max-iterations", type=int, default=None)
    p_eval.add_argument(
        "--grasps-override", default=None, help="JSON list or file replacing the task grasps"
    )
    p_eval.set_defaults(func=_cmd_evaluate)

    p_inspect = sub.add_parser("inspect-model", help="FK/Jacobian at a configuration")
    p_inspect.add_argument("--robot", required=True)
    p_inspect.add_argument("--config", default=None, help="comma-separated joint values")
    p_inspect.set_defaults(func=_cmd_inspect_model)

    p_metrics = sub.add_parser("metrics-at", help="metric values at one waypoint")
    p_metrics.add_argument("--robot", required=True)
    p_metrics.add_argument("--task", required=True)
    p_metrics.add_argument("--grasp", required=True, help="grasp id")
    p_metrics.add_argument("--waypoint", type=int, required=True)
    p_metrics.add_argument("--resample", type=int, default=None)
    p_metrics.set_defaults(func=_cmd_metrics_at)

    p_pareto = sub.add_parser("pareto", help="re-rank an existing scorecards.csv")
    p_pareto.add_argument("--scorecards", required=True)
    p_pareto.add_argument("--weights", default=None)
    p_pareto.set_defaults(func=_cmd_pareto)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
