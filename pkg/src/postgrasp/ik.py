"""Damped least-squares differential inverse kinematics.

Damping is deliberate: the metrics downstream probe near-singular regions
where a plain pseudo-inverse step explodes.  Tracking a trajectory seeds
each waypoint with the previous solution, which keeps the joint path on
one IK branch; joint velocities and accelerations are finite differences
of the solved positions, so the energy metric reflects what the joint
path actually does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainModel, JointState, forward_kinematics, geometric_jacobian
from .geometry import Pose


class IkError(Exception):
    pass


class WaypointUnreachable(IkError):
    """DLS iteration hit the iteration cap before meeting tolerances."""


class GraspInfeasible(IkError):
    """The first trajectory waypoint could not be reached at all."""


@dataclass(frozen=True)
class IkSettings:
    damping: float = 1e-3
    max_iterations: int = 200
    position_tolerance: float = 1e-6  # m
    orientation_tolerance: float = 1e-6  # rad
    max_step: float = 0.5  # per-iteration joint-space step cap
    seed: np.ndarray | None = None

    def __post_init__(self):
        if not self.damping > 0.0:
            raise ValueError("damping must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("position_tolerance", "orientation_tolerance", "max_step"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.seed is not None:
            object.__setattr__(self, "seed", np.asarray(self.seed, dtype=float).reshape(-1))


def default_seed(model: ChainModel) -> np.ndarray:
    """Mid-range of the joint limits; zero where limits are infinite."""
    seed = np.zeros(model.n)
    for i, joint in enumerate(model.joints):
        lo, hi = joint.limits
        if math.isfinite(lo) and math.isfinite(hi):
            seed[i] = 0.5 * (lo + hi)
    return seed


def pose_error(target: Pose, current: Pose) -> np.ndarray:
    """6-vector (position error; orientation error as a rotation vector),
    world frame, consistent with the world-frame Jacobian."""
    dp = target.translation - current.translation
    drot = (target.rotation * current.rotation.inverse()).log()
    return np.concatenate([dp, drot])


def _solve(model, target, seed, settings) -> tuple[np.ndarray, bool]:
    lo, hi = model.limits_arrays()
    q = np.clip(np.asarray(seed, dtype=float).reshape(model.n), lo, hi)
    lam2 = settings.damping**2
    err = pose_error(target, forward_kinematics(model, q))
    for _ in range(settings.max_iterations):
        if (
            np.linalg.norm(err[:3]) <= settings.position_tolerance
            and np.linalg.norm(err[3:]) <= settings.orientation_tolerance
        ):
            return q, True
        jac = geometric_jacobian(model, q)
        a = jac @ jac.T + lam2 * np.eye(6)
        dq = jac.T @ np.linalg.solve(a, err)
        norm = np.linalg.norm(dq)
        if norm > settings.max_step:
            dq *= settings.max_step / norm
        # backtrack when a full step would grow the error (keeps the
        # iteration from limit-cycling around tight postures)
        err_norm = np.linalg.norm(err)
        for _ in range(5):
            q_new = np.clip(q + dq, lo, hi)
            err_new = pose_error(target, forward_kinematics(model, q_new))
            if np.linalg.norm(err_new) <= err_norm or np.linalg.norm(dq) < 1e-12:
                break
            dq = 0.5 * dq
        q, err = q_new, err_new
    if (
        np.linalg.norm(err[:3]) <= settings.position_tolerance
        and np.linalg.norm(err[3:]) <= settings.orientation_tolerance
    ):
        return q, True
    return q, False


def solve_waypoint(model: ChainModel, target: Pose, seed, settings: IkSettings) -> np.ndarray:
    """Solve one pose target by damped least squares from the given seed.

    Returns the joint vector; raises WaypointUnreachable when the target
    cannot be met within tolerances (out of workspace or limit-blocked).
    """
    q, ok = _solve(model, target, seed, settings)
    if not ok:
        raise WaypointUnreachable(
            f"no IK solution within tolerances after {settings.max_iterations} iterations"
        )
    return q


@dataclass(frozen=True, eq=False)
class JointTrajectory:
    """Solved joint path with finite-difference velocities/accelerations
    and a per-waypoint reachability flag."""

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    accelerations: np.ndarray
    reachable: np.ndarray

    def __len__(self) -> int:
        return self.times.shape[0]

    def at(self, i: int) -> JointState:
        return JointState(self.positions[i], self.velocities[i], self.accelerations[i])


def _fd_derivatives(times: np.ndarray, pos: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Quadratic-fit finite differences on a (possibly non-uniform) grid,
    one-sided at the endpoints."""
    n = pos.shape[0]
    vel = np.zeros_like(pos)
    acc = np.zeros_like(pos)
    if n == 2:
        v = (pos[1] - pos[0]) / (times[1] - times[0])
        vel[0] = vel[1] = v
        return vel, acc
    for i in range(n):
        k = min(max(i - 1, 0), n - 3)
        t0, t1, t2 = times[k], times[k + 1], times[k + 2]
        y0, y1, y2 = pos[k], pos[k + 1], pos[k + 2]
        t = times[i]
        d0 = (2 * t - t1 - t2) / ((t0 - t1) * (t0 - t2))
        d1 = (2 * t - t0 - t2) / ((t1 - t0) * (t1 - t2))
        d2 = (2 * t - t0 - t1) / ((t2 - t0) * (t2 - t1))
        vel[i] = d0 * y0 + d1 * y1 + d2 * y2
        acc[i] = 2.0 * (
            y0 / ((t0 - t1) * (t0 - t2))
            + y1 / ((t1 - t0) * (t1 - t2))
            + y2 / ((t2 - t0) * (t2 - t1))
        )
    return vel, acc


def track_trajectory(model: ChainModel, poses, times, settings: IkSettings) -> JointTrajectory:
    """Track a gripper pose sequence waypoint by waypoint.

    Each waypoint is seeded with the previous solution.  An unreachable
    waypoint after the first is flagged (its best-effort iterate is kept so
    the trajectory stays usable); an unreachable first waypoint makes the
    whole grasp infeasible.
    """
    poses = list(poses)
    t = np.asarray(times, dtype=float).reshape(-1)
    if len(poses) < 2:
        raise ValueError("trajectory needs at least two waypoints")
    if t.shape[0] != len(poses):
        raise ValueError("times and poses must have equal length")
    if np.any(np.diff(t) <= 0.0):
        raise ValueError("waypoint times must be strictly increasing")

    seed = settings.seed if settings.seed is not None else default_seed(model)
    if seed.shape[0] != model.n:
        raise ValueError(f"IK seed has length {seed.shape[0]}, expected {model.n}")

    n_wp = len(poses)
    positions = np.zeros((n_wp, model.n))
    reachable = np.ones(n_wp, dtype=bool)
    q, ok = _solve(model, poses[0], seed, settings)
    if not ok:
        raise GraspInfeasible("first trajectory waypoint is unreachable")
    positions[0] = q
    for i in range(1, n_wp):
        q, ok = _solve(model, poses[i], q, settings)
        positions[i] = q
        reachable[i] = ok
    vel, acc = _fd_derivatives(t, positions)
    return JointTrajectory(t, positions, vel, acc, reachable)
