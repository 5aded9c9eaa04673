"""Independent closed-form references used only by the tests.

Nothing here shares code with the production modules: all kinematics and
dynamics below are hand-derived textbook expressions for the smallest
nontrivial systems, and the Pareto scan is a direct pairwise dominance
check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TwoRParams:
    """Planar 2R arm in the x-y plane, revolute about z, point masses at the
    link tips, in-plane gravity (gx, gy)."""

    l1: float = 1.0
    l2: float = 1.0
    m1: float = 1.0
    m2: float = 1.0
    gx: float = 0.0
    gy: float = -9.81

    def __post_init__(self):
        if min(self.l1, self.l2, self.m1, self.m2) <= 0.0:
            raise ValueError("lengths and masses must be positive")


def two_r_closed_form(params: TwoRParams, q, qd=(0.0, 0.0), qdd=(0.0, 0.0)) -> dict:
    """Hand-derived Lagrangian kinematics/dynamics of the planar 2R arm.

    With point masses at the tips the Lagrangian L = T - V gives

        M11 = m1 l1^2 + m2 (l1^2 + l2^2 + 2 l1 l2 c2)
        M12 = M21 = m2 (l2^2 + l1 l2 c2)
        M22 = m2 l2^2

    and the Christoffel Coriolis matrix with h = -m2 l1 l2 s2:

        C = [[h qd2, h (qd1 + qd2)],
             [-h qd1, 0]]

    Gravity: N_i = -sum_k m_k g . d(tip_k)/d(q_i).
    """
    l1, l2, m1, m2 = params.l1, params.l2, params.m1, params.m2
    g = np.array([params.gx, params.gy])
    q1, q2 = float(q[0]), float(q[1])
    qd = np.asarray(qd, dtype=float)
    qdd = np.asarray(qdd, dtype=float)
    c1, s1 = np.cos(q1), np.sin(q1)
    c12, s12 = np.cos(q1 + q2), np.sin(q1 + q2)
    c2, s2 = np.cos(q2), np.sin(q2)

    tip1 = np.array([l1 * c1, l1 * s1])
    tip2 = tip1 + np.array([l2 * c12, l2 * s12])

    jac = np.zeros((6, 2))
    jac[0] = [-l1 * s1 - l2 * s12, -l2 * s12]
    jac[1] = [l1 * c1 + l2 * c12, l2 * c12]
    jac[5] = [1.0, 1.0]

    mass = np.array(
        [
            [m1 * l1**2 + m2 * (l1**2 + l2**2 + 2 * l1 * l2 * c2), m2 * (l2**2 + l1 * l2 * c2)],
            [m2 * (l2**2 + l1 * l2 * c2), m2 * l2**2],
        ]
    )
    h = -m2 * l1 * l2 * s2
    coriolis = np.array([[h * qd[1], h * (qd[0] + qd[1])], [-h * qd[0], 0.0]])

    dtip1 = np.array([[-l1 * s1, 0.0], [l1 * c1, 0.0]])
    dtip2 = np.array([[-l1 * s1 - l2 * s12, -l2 * s12], [l1 * c1 + l2 * c12, l2 * c12]])
    grav = -(m1 * dtip1.T @ g + m2 * dtip2.T @ g)

    tau = mass @ qdd + coriolis @ qd + grav
    potential = -(m1 * g @ tip1 + m2 * g @ tip2)
    return {
        "tip": np.array([tip2[0], tip2[1], 0.0]),
        "angle": q1 + q2,
        "J": jac,
        "M": mass,
        "C": coriolis,
        "N": grav,
        "tau": tau,
        "V": potential,
    }


def two_r_ik(params: TwoRParams, x: float, y: float) -> list[tuple[float, float]]:
    """Closed-form position IK branches of the planar 2R arm."""
    l1, l2 = params.l1, params.l2
    r2 = x * x + y * y
    c2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    if abs(c2) > 1.0:
        return []
    branches = []
    for q2 in (np.arccos(np.clip(c2, -1.0, 1.0)), -np.arccos(np.clip(c2, -1.0, 1.0))):
        q1 = np.arctan2(y, x) - np.arctan2(l2 * np.sin(q2), l1 + l2 * np.cos(q2))
        branches.append((float(q1), float(q2)))
    return branches


def brute_force_pareto(points, senses) -> set[int]:
    """O(n^2) pairwise dominance scan; returns indices of the front."""
    pts = [tuple(row) for row in np.asarray(points, dtype=float)]
    signs = [1.0 if sense == "min" else -1.0 for sense in senses]

    def dominates(a, b):
        better_or_equal = all(sa * va <= sa * vb for sa, va, vb in zip(signs, a, b))
        strictly = any(sa * va < sa * vb for sa, va, vb in zip(signs, a, b))
        return better_or_equal and strictly

    front = set()
    for i, p in enumerate(pts):
        if not any(dominates(other, p) for j, other in enumerate(pts) if j != i):
            front.add(i)
    return front


def finite_difference_jacobian(f, x, h: float = 1e-7) -> np.ndarray:
    """Central-difference Jacobian of a vector function, column by column."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(f(x), dtype=float)
    jac = np.zeros((f0.shape[0], x.shape[0]))
    for k in range(x.shape[0]):
        dx = np.zeros_like(x)
        dx[k] = h
        jac[:, k] = (np.asarray(f(x + dx)) - np.asarray(f(x - dx))) / (2.0 * h)
    return jac


def cuboid_inertia(mass: float, dims) -> np.ndarray:
    """Inertia tensor of a uniform cuboid about its CoM, axis-aligned."""
    a, b, c = np.asarray(dims, dtype=float)
    return np.diag(
        [
            mass / 12.0 * (b * b + c * c),
            mass / 12.0 * (a * a + c * c),
            mass / 12.0 * (a * a + b * b),
        ]
    )
