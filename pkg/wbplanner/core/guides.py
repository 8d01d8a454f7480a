"""Long-horizon guides: the contact-free approach path and the free-pusher object trajectory."""

from __future__ import annotations

import logging

import casadi as ca
import numpy as np

from ..models.planning import ContactPlan
from ..models.system import SystemState
from ..models.types import SlidingDirection
from . import tolerances as tol
from .constraints import cone_terms, mode_terms, point_clearance
from .contact_planning import aligned_target
from .kinematics import robot_contact_point, rotation, sx_object_step
from .metrics import weighted_distance
from .nlp import Program, relax_and_resolve
from .outline import nearest_parameter, sample_derivatives, sample_points
from .problem import PlanningProblem

logger = logging.getLogger(__name__)

# Samples per unit of outline parameter when tracing the offset outline
PATH_RESOLUTION = 2048


class NoGuideError(RuntimeError):
    """Raised when the free-pusher guide program has no admissible solution."""

    pass


class InteriorStartError(ValueError):
    """Raised when the approach path would start inside the object."""

    pass


def margin_schedule(progress: np.ndarray, problem: PlanningProblem) -> np.ndarray:
    """D_c as a function of the travelled fraction of the approach path."""
    options = problem.planner
    taper_start = 1.0 - options.margin_taper_fraction
    if options.margin_taper_fraction <= 0.0:
        return np.where(progress < 1.0, options.margin_max, options.margin_min)
    blend = np.clip((progress - taper_start) / options.margin_taper_fraction, 0.0, 1.0)
    return options.margin_max + blend * (options.margin_min - options.margin_max)


def _resample(points: np.ndarray, spacing: float) -> np.ndarray:
    """Points at equal arc length along a polyline, excluding its first point."""
    segments = np.linalg.norm(np.diff(points, axis=0), axis=1)
    travelled = np.concatenate([[0.0], np.cumsum(segments)])
    length = travelled[-1]
    if length <= 0.0:
        return points[-1:].copy()
    count = max(int(np.ceil(length / spacing)), 1)
    stations = np.linspace(0.0, length, count + 1)[1:]
    return np.column_stack([np.interp(stations, travelled, points[:, 0]), np.interp(stations, travelled, points[:, 1])])


def _offset_arc(problem: PlanningProblem, pose: np.ndarray, phi_start: float, span: float) -> tuple[np.ndarray, np.ndarray]:
    """World outline points and outward normals from phi_start over a signed parameter span."""
    count = max(int(abs(span) * PATH_RESOLUTION), 2)
    phis = phi_start + np.linspace(0.0, span, count)
    rot = rotation(pose[2])
    points = sample_points(problem.obj.outline, phis) @ rot.T + pose[:2]
    derivatives = sample_derivatives(problem.obj.outline, phis)
    tangents = derivatives / np.linalg.norm(derivatives, axis=1, keepdims=True)
    normals = np.column_stack([tangents[:, 1], -tangents[:, 0]]) @ rot.T
    return points, normals


def guide_contact_free(problem: PlanningProblem, state: SystemState, plan: ContactPlan) -> np.ndarray:
    """
    Waypoints leading the planned robot contact point to the approach point.

    The path follows the object outline offset outward by D_c, from the
    outline parameter nearest the robot point to φ_u⁽⁰⁾ along the shorter
    arc, and ends at the approach point D_c_min off the contact location.
    The robot point itself is not part of the path.

    Raises:
        InteriorStartError: If the robot point lies inside the object
    """
    options = problem.planner
    pose = state.pose
    start, _, _ = robot_contact_point(problem.robot, np.append(state.theta, plan.phi_a0), plan.n_a)
    if point_clearance(problem.obj, state.q_u, start[None, :])[0] < -tol.CONTACT_PENETRATION_TOL:
        raise InteriorStartError("robot contact point starts inside the object")

    points, normals = _offset_arc(problem, pose, plan.phi_u0, 0.0)
    approach = points[-1] + options.margin_min * normals[-1]
    if np.linalg.norm(start - approach) <= options.waypoint_reached:
        return approach[None, :]

    body_start = rotation(pose[2]).T @ (start - pose[:2])
    phi_start = nearest_parameter(problem.obj.outline, body_start)
    forward = (plan.phi_u0 - phi_start) % 1.0
    candidates = []
    for span in (forward, forward - 1.0):
        arc_points, arc_normals = _offset_arc(problem, pose, phi_start, span)
        length = float(np.sum(np.linalg.norm(np.diff(arc_points, axis=0), axis=1)))
        candidates.append((length, arc_points, arc_normals))
    length, arc_points, arc_normals = min(candidates, key=lambda item: item[0])

    travelled = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(arc_points, axis=0), axis=1))])
    progress = travelled / length if length > 0.0 else np.ones_like(travelled)
    offset = arc_points + margin_schedule(progress, problem)[:, None] * arc_normals
    path = np.vstack([start, offset])
    waypoints = _resample(path, options.waypoint_spacing)
    waypoints[-1] = approach
    return waypoints


def build_guide_program(problem: PlanningProblem) -> Program:
    """Multiple-shooting free-pusher program over N_l steps (cached on the problem)."""
    key = ('guide',)
    cached = problem.cached(key)
    if cached is not None:
        return cached
    horizon = problem.planner.guide_horizon
    mu = problem.obj.friction_mu
    impulse, rate = problem.impulse_scale, problem.rate_scale
    program = Program('guide')
    states = program.variable('states', 4 * (horizon + 1))
    controls = program.variable('controls', 3 * horizon)
    start = program.parameter('start', 4)
    target = program.parameter('target', 3)
    weights = ca.DM(problem.pose_weights)

    def distance(q_u: ca.SX) -> ca.SX:
        scaled = (q_u[:3] - target) * weights
        return ca.dot(scaled, scaled)

    q = [states[4 * k:4 * k + 4] for k in range(horizon + 1)]
    program.add_equality(q[0] - start)
    cost = ca.SX(0)
    for k in range(horizon):
        scaled = controls[3 * k:3 * k + 3]
        u_u = ca.vertcat(scaled[0] * impulse, scaled[1] * impulse, scaled[2] * rate)
        program.add_equality(q[k + 1] - sx_object_step(problem.obj, q[k], u_u))
        program.add_inequality(ca.vertcat(*cone_terms(scaled[0], scaled[1], mu)))
        inequalities, (first, second) = mode_terms(scaled[2], 0.0, scaled[0], scaled[1], mu)
        program.add_inequality(inequalities[0])
        program.add_complementarity(first, second)
        cost = cost + distance(q[k + 1]) + tol.CONTROL_REGULARIZATION * ca.sumsqr(scaled)
    program.add_inequality(distance(q[0]) - distance(q[horizon]))
    program.minimize(cost)
    return problem.remember(key, program)


def _guide_bounds(
    problem: PlanningProblem, start: np.ndarray, direction: SlidingDirection
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    horizon = problem.planner.guide_horizon
    bounds = problem.state_bounds
    phi_low, phi_high = (start[3] - 0.5, start[3]) if direction == 'cw' else (start[3], start[3] + 0.5)
    state_low = np.tile(np.append(bounds.lower[:3], phi_low), horizon + 1)
    state_high = np.tile(np.append(bounds.upper[:3], phi_high), horizon + 1)
    sliding = problem.planner.sliding_rate_max / problem.rate_scale
    rate_low, rate_high = (-sliding, 0.0) if direction == 'cw' else (0.0, sliding)
    control_low = np.tile([0.0, -1.0, rate_low], horizon)
    control_high = np.tile([1.0, 1.0, rate_high], horizon)
    return state_low, state_high, control_low, control_high


def guide_in_contact(
    problem: PlanningProblem,
    q_u_start: np.ndarray,
    target: np.ndarray,
    direction: SlidingDirection,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Free-pusher object trajectory towards the target.

    The contact parameter may only move clockwise (v_u <= 0) or
    counter-clockwise (v_u >= 0), by at most half the outline.

    Returns:
        (states (N_l + 1, 4), controls (N_l, 3)) in physical units

    Raises:
        NoGuideError: If the program fails or the guide does not approach the target
    """
    horizon = problem.planner.guide_horizon
    start = np.asarray(q_u_start, dtype=float).copy()
    goal = aligned_target(start[:3], target)
    program = build_guide_program(problem)
    program.set_parameter('start', start)
    program.set_parameter('target', goal)
    state_low, state_high, control_low, control_high = _guide_bounds(problem, start, direction)
    program.set_bounds('states', state_low, state_high)
    program.set_bounds('controls', control_low, control_high)
    program.set_initial('states', np.tile(start, horizon + 1))
    program.set_initial('controls', np.tile([0.1, 0.0, 0.0], horizon))
    report = relax_and_resolve(program, problem.planner.complementarity_schedule, problem.solver)
    if not report.success:
        raise NoGuideError(f"guide program ended {report.status}")
    states = report['states'].reshape(horizon + 1, 4)
    scaled = report['controls'].reshape(horizon, 3)
    controls = scaled * np.array([problem.impulse_scale, problem.impulse_scale, problem.rate_scale])
    weights = problem.metrics.pose_weights
    initial = weighted_distance(states[0, :3] - goal, weights)
    final = weighted_distance(states[-1, :3] - goal, weights)
    if initial > 0.0 and not final < initial:
        raise NoGuideError("guide does not approach the target")
    return states, controls


def constant_goal_guide(problem: PlanningProblem, q_u_start: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Guide replaced by the goal pose repeated over the horizon."""
    horizon = problem.planner.guide_horizon
    start = np.asarray(q_u_start, dtype=float)
    goal = np.append(aligned_target(start[:3], target), start[3])
    states = np.vstack([start, np.tile(goal, (horizon, 1))])
    return states, np.zeros((horizon, 3))
