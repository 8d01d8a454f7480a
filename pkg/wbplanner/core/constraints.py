"""Constraint sets of the planning problems.

Each set has a numeric residual form returning ConstraintResidual and, where
an optimization needs it, a symbolic form. The cone and contact-mode terms
are written once over plain arithmetic so the same code serves floats and
CasADi expressions.
"""

from __future__ import annotations

import logging
from typing import Any

import casadi as ca
import numpy as np
from scipy.special import logsumexp
from shapely.geometry import Polygon

from ..models.constraint_data import ConstraintResidual, ControlBounds, HalfSpaceSet, StateBounds
from ..models.system import ControlInput, ObjectModel, RobotModel, SystemState
from . import tolerances as tol
from .kinematics import link_sample_points, object_contact_point, robot_contact_point, rotation

logger = logging.getLogger(__name__)


def cone_terms(lambda_n: Any, lambda_t: Any, mu: float) -> list[Any]:
    """[μλ_n − λ_t, μλ_n + λ_t, λ_n], all >= 0 inside the friction cone."""
    return [mu * lambda_n - lambda_t, mu * lambda_n + lambda_t, lambda_n]


def mode_terms(v_u: Any, v_a: Any, lambda_n: Any, lambda_t: Any, mu: float) -> tuple[list[Any], tuple[Any, Any]]:
    """Inequalities [v_u λ_t, −v_u v_a] and the pair (v_u − v_a, λ_t² − μ²λ_n²)."""
    inequalities = [v_u * lambda_t, -v_u * v_a]
    pair = (v_u - v_a, lambda_t * lambda_t - mu * mu * lambda_n * lambda_n)
    return inequalities, pair


def friction_cone(u: ControlInput, mu: float) -> ConstraintResidual:
    """Friction cone membership of the contact impulse."""
    return ConstraintResidual(inequalities=np.array(cone_terms(u.lambda_n, u.lambda_t, mu)))


def contact_modes(u: ControlInput, mu: float) -> ConstraintResidual:
    """Sticking / sliding complementarity of the surface rates."""
    inequalities, pair = mode_terms(u.v_u, u.v_a, u.lambda_n, u.lambda_t, mu)
    return ConstraintResidual(inequalities=np.array(inequalities), complementarities=(pair,))


def in_contact(robot: RobotModel, obj: ObjectModel, q: SystemState) -> ConstraintResidual:
    """Equality p_u(q_u) − p_a(q_a) of the two contact points."""
    object_point, _, _ = object_contact_point(obj, q.q_u)
    robot_point, _, _ = robot_contact_point(robot, q.q_a, q.n_a)
    return ConstraintResidual(equalities=object_point - robot_point)


def contact_gap(robot: RobotModel, obj: ObjectModel, q: SystemState) -> float:
    """Distance between the two contact points (m)."""
    return float(np.hypot(*in_contact(robot, obj, q).equalities))


def world_half_spaces(obj: ObjectModel, q_u: np.ndarray) -> HalfSpaceSet:
    """Object faces moved to the world by the object pose."""
    q_u = np.asarray(q_u, dtype=float)
    rot = rotation(q_u[2])
    origins, normals = obj.face_arrays()
    world_origins = origins @ rot.T + q_u[:2]
    world_normals = normals @ rot.T
    return HalfSpaceSet(tuple(
        ((float(p[0]), float(p[1])), (float(n[0]), float(n[1])))
        for p, n in zip(world_origins, world_normals)
    ))


def point_clearance(obj: ObjectModel, q_u: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Exact clearance max_h n_h·(p − p_h) of each world point (negative inside the object)."""
    return world_half_spaces(obj, q_u).signed_values(points).max(axis=0)


def collision_clearance(
    robot: RobotModel,
    obj: ObjectModel,
    q: SystemState,
    link: int,
    smoothing_beta: float = tol.SMOOTHING_BETA,
    sample_count: int = tol.LINK_SAMPLE_COUNT,
) -> tuple[float, float]:
    """
    Smooth and exact clearance between a link and the object.

    The exact value is min over link sample points of the max over faces.
    The smooth value replaces the max by a mean-normalized log-sum-exp and
    the min by a negative log-sum-exp, so it never exceeds the exact value
    and approaches it monotonically as smoothing_beta grows.

    Args:
        robot: Robot model
        obj: Object model
        q: State
        link: Link index, 1-based
        smoothing_beta: Log-sum-exp temperature (1/m)
        sample_count: Outline points sampled on the link

    Returns:
        (smooth_clearance, exact_clearance) in meters
    """
    points = link_sample_points(robot, q.q_a, link, sample_count)
    values = world_half_spaces(obj, q.q_u).signed_values(points)
    exact = float(values.max(axis=0).min())
    face_count = values.shape[0]
    soft_max = (logsumexp(smoothing_beta * values, axis=0) - np.log(face_count)) / smoothing_beta
    smooth = float(-logsumexp(-smoothing_beta * soft_max) / smoothing_beta)
    return smooth, exact


def link_clearances(robot: RobotModel, obj: ObjectModel, q: SystemState, sample_count: int) -> np.ndarray:
    """Exact clearance of every link, shape (N_a,)."""
    values = world_half_spaces(obj, q.q_u)
    return np.array([
        float(values.signed_values(link_sample_points(robot, q.q_a, link, sample_count)).max(axis=0).min())
        for link in range(1, robot.n_joints + 1)
    ])


def self_collision(robot: RobotModel, q_a: np.ndarray, sample_count: int = tol.LINK_SAMPLE_COUNT) -> bool:
    """True when two non-adjacent link outlines intersect."""
    polygons = [
        Polygon(link_sample_points(robot, q_a, link, sample_count))
        for link in range(1, robot.n_joints + 1)
    ]
    for i in range(len(polygons)):
        for j in range(i + 2, len(polygons)):
            if polygons[i].intersects(polygons[j]):
                return True
    return False


def _box_residual(values: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> ConstraintResidual:
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.shape != lower.shape:
        raise ValueError(f"expected {lower.shape[0]} values, got {values.shape[0]}")
    low = np.isfinite(lower)
    high = np.isfinite(upper)
    return ConstraintResidual(inequalities=np.concatenate([(values - lower)[low], (upper - values)[high]]))


def state_bounds(q: SystemState | np.ndarray, bounds: StateBounds) -> ConstraintResidual:
    """Residuals q − q_lb then q_ub − q; infinite bounds are skipped."""
    values = q.vector() if isinstance(q, SystemState) else q
    return _box_residual(values, bounds.lower, bounds.upper)


def control_bounds(u: ControlInput | np.ndarray, bounds: ControlBounds) -> ConstraintResidual:
    """Residuals u − u_lb then u_ub − u."""
    values = u.vector() if isinstance(u, ControlInput) else u
    return _box_residual(values, bounds.lower, bounds.upper)


def default_state_bounds(
    robot: RobotModel,
    workspace: float = tol.WORKSPACE_XY,
    orientation_limit: float = tol.ORIENTATION_LIMIT,
) -> StateBounds:
    """Object box, joint limits and unbounded (wrapped) contact parameters."""
    lower = [-workspace, -workspace, -orientation_limit, -np.inf]
    upper = [workspace, workspace, orientation_limit, np.inf]
    lower += [low for low, _ in robot.joint_limits] + [-np.inf]
    upper += [high for _, high in robot.joint_limits] + [np.inf]
    return StateBounds(lower=np.array(lower), upper=np.array(upper))


def default_control_bounds(
    robot: RobotModel,
    impulse_max: float = tol.IMPULSE_MAX,
    rate_max: float = tol.RELABEL_RATE_MAX,
) -> ControlBounds:
    """Impulse, sliding-rate and torque limits."""
    torques = np.asarray(robot.torque_limits, dtype=float)
    lower = np.concatenate([[0.0, -impulse_max, -rate_max], -torques, [-rate_max]])
    upper = np.concatenate([[impulse_max, impulse_max, rate_max], torques, [rate_max]])
    return ControlBounds(lower=lower, upper=upper)


def check_state(
    robot: RobotModel,
    obj: ObjectModel,
    q: SystemState,
    bounds: StateBounds,
    contact: bool,
    sample_count: int = tol.LINK_SAMPLE_COUNT,
) -> tuple[bool, str]:
    """
    Exact admission test of a tree node.

    In contact, the active link may reach CONTACT_PENETRATION_TOL inside the
    faces and the contact gap must stay within IN_CONTACT_TOL; every other
    link needs non-negative clearance.

    Returns:
        (passed, reason) where reason is empty on success
    """
    if not state_bounds(q, bounds).is_satisfied(1e-9):
        return False, "state bounds violated"
    clearances = link_clearances(robot, obj, q, sample_count)
    floors = np.zeros(robot.n_joints)
    if contact:
        floors[q.n_a - 1] = -tol.CONTACT_PENETRATION_TOL
    colliding = np.nonzero(clearances < floors)[0]
    if colliding.size:
        link = int(colliding[0]) + 1
        return False, f"link {link} collides with the object (clearance {clearances[link - 1]:.3g} m)"
    if contact:
        gap = contact_gap(robot, obj, q)
        if gap > tol.IN_CONTACT_TOL:
            return False, f"contact gap {gap:.3g} m exceeds tolerance"
    if self_collision(robot, q.q_a, sample_count):
        return False, "robot self-collision"
    return True, ""


def check_contact_control(u: ControlInput, mu: float, tolerance: float = tol.COMPLEMENTARITY_TOL) -> tuple[bool, str]:
    """Friction cone and contact-mode residuals of an in-contact control."""
    residual = friction_cone(u, mu).merged(contact_modes(u, mu))
    worst = residual.max_violation()
    if worst > tolerance:
        return False, f"contact control violates cone or mode constraints by {worst:.3g}"
    return True, ""


# --- CasADi expressions ---

def sx_logsumexp(values: ca.SX) -> ca.SX:
    """Stable log Σ exp(values) of a column."""
    peak = ca.mmax(values)
    return peak + ca.log(ca.sum1(ca.exp(values - peak)))


def soft_max_bias(obj: ObjectModel, beta: float) -> float:
    """Largest gap ln(H)/β between the normalized soft-max and the exact max over H faces."""
    return float(np.log(len(obj.polygon_faces))) / beta


def sx_point_clearances(obj: ObjectModel, q_u: ca.SX, points: ca.SX, beta: float) -> list[ca.SX]:
    """
    Smooth clearance of each column of `points` (2 x M, world) against the object.

    Each entry is the log-sum-exp soft-max over faces shifted by ln(H)/β, the
    same normalization as collision_clearance. It never exceeds the exact max
    and lies at most soft_max_bias() below it, so a satisfied floor on the
    smooth value also holds for the exact clearance.
    """
    origins, normals = obj.face_arrays()
    offsets = ca.DM(np.sum(normals * origins, axis=1))
    rot_t = ca.vertcat(
        ca.horzcat(ca.cos(q_u[2]), ca.sin(q_u[2])),
        ca.horzcat(-ca.sin(q_u[2]), ca.cos(q_u[2])),
    )
    count = points.shape[1]
    body = ca.mtimes(rot_t, points - ca.repmat(q_u[:2], 1, count))
    values = ca.mtimes(ca.DM(normals), body) - ca.repmat(offsets, 1, count)
    shift = float(np.log(values.shape[0]))
    return [(sx_logsumexp(beta * values[:, m]) - shift) / beta for m in range(count)]
