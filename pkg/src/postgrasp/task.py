"""Manipulation tasks and grasp candidates.

A task prescribes a timed sequence of object-CoM poses; a grasp candidate
is a fixed object-to-gripper transform.  Composing the two yields the
gripper trajectory the arm must track, and the normalized arc length of
the object path provides the integration variable for all path metrics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import validate_inertia_tensor
from .geometry import Pose, SpatialInertia


@dataclass(frozen=True, eq=False)
class TaskTrajectory:
    """Object-CoM pose waypoints at strictly increasing times starting at 0."""

    poses: tuple[Pose, ...]
    times: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "poses", tuple(self.poses))
        t = np.array(self.times, dtype=float).reshape(-1)
        if len(self.poses) < 2:
            raise ValueError("trajectory needs at least two waypoints")
        if t.shape[0] != len(self.poses):
            raise ValueError("times and poses must have equal length")
        if abs(t[0]) > 1e-12:
            raise ValueError("trajectory must start at t = 0")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("waypoint times must be strictly increasing")
        t.flags.writeable = False
        object.__setattr__(self, "times", t)

    def __len__(self) -> int:
        return len(self.poses)

    @property
    def total_time(self) -> float:
        return float(self.times[-1])


@dataclass(frozen=True, eq=False)
class GraspCandidate:
    """Fixed transform from the object CoM frame to the gripper frame."""

    id: str
    transform: Pose

    def __post_init__(self):
        if not self.id:
            raise ValueError("grasp id must be non-empty")


@dataclass(frozen=True, eq=False)
class RigidObject:
    """Mass and CoM inertia tensor of the manipulated object; extents are
    documentation only."""

    mass: float
    inertia: np.ndarray
    extents: np.ndarray | None = None

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ValueError(f"object mass must be positive, got {self.mass}")
        m = validate_inertia_tensor(self.inertia, "object inertia tensor")
        m.flags.writeable = False
        object.__setattr__(self, "inertia", m)
        if self.extents is not None:
            e = np.array(self.extents, dtype=float).reshape(3)
            e.flags.writeable = False
            object.__setattr__(self, "extents", e)

    def spatial_inertia(self) -> SpatialInertia:
        """6x6 inertia at the object CoM, object-frame axes."""
        return SpatialInertia.from_mass_inertia(self.mass, self.inertia)


def gripper_trajectory(task: TaskTrajectory, grasp: GraspCandidate) -> list[Pose]:
    """Pointwise composition of the object poses with the grasp transform."""
    return [p.compose(grasp.transform) for p in task.poses]


def path_parameter(task: TaskTrajectory) -> np.ndarray:
    """Normalized arc length s in [0, 1] of the object translation.

    A zero-length (stationary) path degenerates to a uniform grid so that
    quadrature weights stay well defined.
    """
    pts = np.array([p.translation for p in task.poses])
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    total = float(seg.sum())
    n = len(task)
    if total < 1e-12:
        return np.linspace(0.0, 1.0, n)
    s = np.concatenate([[0.0], np.cumsum(seg)]) / total
    s[-1] = 1.0
    return s


def generate_grasp_sweep(
    edge_start: Pose, edge_end: Pose, count: int, id_prefix: str = "g"
) -> list[GraspCandidate]:
    """Grasps with translations linearly spaced from edge_start to edge_end,
    all sharing edge_start's orientation."""
    if count < 2:
        raise ValueError("grasp sweep needs count >= 2")
    t0 = edge_start.translation
    t1 = edge_end.translation
    rot = edge_start.rotation
    grasps = []
    for i, u in enumerate(np.linspace(0.0, 1.0, count)):
        grasps.append(
            GraspCandidate(f"{id_prefix}{i + 1:02d}", Pose(rot, (1.0 - u) * t0 + u * t1))
        )
    return grasps


def resample(task: TaskTrajectory, count: int) -> TaskTrajectory:
    """Densify keyframes to ``count`` waypoints uniform in time, with linear
    interpolation of translation and slerp of rotation."""
    if count < 2:
        raise ValueError("resample count must be >= 2")
    times = np.linspace(0.0, task.total_time, count)
    poses = []
    for t in times:
        k = int(np.searchsorted(task.times, t, side="right") - 1)
        k = min(max(k, 0), len(task) - 2)
        t0, t1 = task.times[k], task.times[k + 1]
        u = (t - t0) / (t1 - t0)
        u = min(max(u, 0.0), 1.0)
        a, b = task.poses[k], task.poses[k + 1]
        poses.append(
            Pose(a.rotation.slerp(b.rotation, u), (1.0 - u) * a.translation + u * b.translation)
        )
    return TaskTrajectory(tuple(poses), times)
