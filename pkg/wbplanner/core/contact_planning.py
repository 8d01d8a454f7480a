"""Contact planning: where to touch the object and with which link point.

The optimized variant solves a short-horizon program over the contact
parameters, the joint configuration at contact and a condensed normal
impulse profile that previews how a free push would move the object. The
random variant samples the contact parameters uniformly and only solves
for a joint configuration.
"""

from __future__ import annotations

import logging

import casadi as ca
import numpy as np

from ..models.planning import ContactPlan, TreeNode
from ..models.system import SystemState
from . import tolerances as tol
from .constraints import check_state, contact_gap, cone_terms, soft_max_bias, sx_point_clearances
from .kinematics import (
    link_sample_points,
    object_input_matrix,
    rotation,
    sx_link_samples,
    sx_object_contact,
    sx_object_input_matrix,
    sx_object_step,
    sx_robot_contact,
)
from .metrics import weighted_distance, wrap_angle
from .nlp import Program
from .outline import sample_derivatives, sample_points
from .problem import PlanningProblem

logger = logging.getLogger(__name__)

# Parameter grid used to seed contact locations
SEED_RESOLUTION = 256


class NoContactPlanError(RuntimeError):
    """Raised when no feasible contact plan is found for a sampled context."""

    pass


def aligned_target(pose: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Target pose with α moved to the 2π-equivalent nearest the current α."""
    aligned = np.asarray(target, dtype=float)[:3].copy()
    aligned[2] = pose[2] + wrap_angle(aligned[2] - pose[2])
    return aligned


def interpolation_matrix(steps: int, knots: int) -> np.ndarray:
    """Rows of linear interpolation weights from `knots` control knots to `steps` samples."""
    matrix = np.zeros((steps, knots))
    for k in range(steps):
        position = (k / (steps - 1) if steps > 1 else 0.0) * (knots - 1)
        lower = min(int(np.floor(position)), knots - 2)
        fraction = position - lower
        matrix[k, lower] = 1.0 - fraction
        matrix[k, lower + 1] = fraction
    return matrix


def add_contact_geometry(
    program: Program,
    problem: PlanningProblem,
    n_a: int,
    q_u: ca.SX,
    theta: ca.SX,
    phi_a: ca.SX,
) -> None:
    """Coincident contact points, opposing normals and link clearance constraints."""
    object_point, object_normal, _ = sx_object_contact(problem.obj, q_u)
    robot_point, robot_normal, _ = sx_robot_contact(problem.robot, theta, n_a, phi_a)
    program.add_equality(object_point - robot_point)
    program.add_inequality(-ca.dot(object_normal, robot_normal))
    add_link_clearances(program, problem, q_u, theta, active=n_a)


def add_link_clearances(
    program: Program,
    problem: PlanningProblem,
    q_u: ca.SX,
    theta: ca.SX,
    active: int | None,
) -> None:
    """
    Per-point smooth clearance of every link.

    Idle links keep collision_margin. The active link may touch the object, so
    its floor also absorbs the soft-max bias; the exact check after the solve
    still bounds its penetration.
    """
    options = problem.planner
    touch_floor = -(tol.IN_CONTACT_TOL + soft_max_bias(problem.obj, options.smoothing_beta))
    for link in range(1, problem.n_joints + 1):
        floor = touch_floor if link == active else options.collision_margin
        points = sx_link_samples(problem.robot, theta, link, options.link_sample_count)
        clearances = sx_point_clearances(problem.obj, q_u, points, options.smoothing_beta)
        program.add_inequality(ca.vertcat(*clearances) - floor)


def _pose_distance(problem: PlanningProblem, q_u: ca.SX, target: ca.SX) -> ca.SX:
    scaled = (q_u[:3] - target) * ca.DM(problem.pose_weights)
    return ca.dot(scaled, scaled)


def _joint_bounds(problem: PlanningProblem) -> tuple[np.ndarray, np.ndarray]:
    limits = np.asarray(problem.robot.joint_limits, dtype=float)
    return limits[:, 0], limits[:, 1]


def build_contact_program(problem: PlanningProblem, n_a: int) -> Program:
    """Short-horizon contact program for link n_a (cached on the problem)."""
    key = ('contact', n_a)
    cached = problem.cached(key)
    if cached is not None:
        return cached
    options = problem.planner
    lower, upper = _joint_bounds(problem)
    program = Program(f'contact_link{n_a}')
    knots = program.variable('knots', options.control_knots, lower=0.0, upper=1.0, initial=0.5)
    phi_u = program.variable('phi_u', 1)
    phi_a = program.variable('phi_a', 1)
    theta = program.variable('theta', problem.n_joints, lower=lower, upper=upper)
    pose = program.parameter('pose', 3)
    theta_ref = program.parameter('theta_ref', problem.n_joints)
    target = program.parameter('target', 3)

    q_u = ca.vertcat(pose, phi_u)
    initial_distance = _pose_distance(problem, q_u, target)
    impulses = ca.mtimes(ca.DM(interpolation_matrix(options.contact_horizon, options.control_knots)), knots)
    cost = tol.JOINT_DEVIATION_WEIGHT * ca.sumsqr(theta - theta_ref)
    preview = q_u
    for k in range(options.contact_horizon):
        push = ca.vertcat(impulses[k] * problem.impulse_scale, 0, 0)
        preview = sx_object_step(problem.obj, preview, push)
        cost = cost + _pose_distance(problem, preview, target)
    program.minimize(cost)
    program.add_inequality(initial_distance - _pose_distance(problem, preview, target))

    b_u = sx_object_input_matrix(problem.obj, preview)
    remaining = ca.vertcat(target - preview[:3], 0)
    pushing = ca.solve(ca.mtimes(b_u.T, b_u), ca.mtimes(b_u.T, remaining))
    program.add_inequality(ca.vertcat(*cone_terms(pushing[0], pushing[1], problem.obj.friction_mu)))

    add_contact_geometry(program, problem, n_a, q_u, theta, phi_a)
    return problem.remember(key, program)


def build_ik_program(problem: PlanningProblem, n_a: int) -> Program:
    """Joint configuration touching fixed contact parameters with link n_a."""
    key = ('ik', n_a)
    cached = problem.cached(key)
    if cached is not None:
        return cached
    lower, upper = _joint_bounds(problem)
    program = Program(f'ik_link{n_a}')
    theta = program.variable('theta', problem.n_joints, lower=lower, upper=upper)
    pose = program.parameter('pose', 3)
    phi_u = program.parameter('phi_u', 1)
    phi_a = program.parameter('phi_a', 1)
    theta_ref = program.parameter('theta_ref', problem.n_joints)
    program.minimize(ca.sumsqr(theta - theta_ref))
    add_contact_geometry(program, problem, n_a, ca.vertcat(pose, phi_u), theta, phi_a)
    return problem.remember(key, program)


def _normals(points_derivative: np.ndarray) -> np.ndarray:
    tangents = points_derivative / np.linalg.norm(points_derivative, axis=1, keepdims=True)
    return np.column_stack([tangents[:, 1], -tangents[:, 0]])


def contact_seeds(problem: PlanningProblem, state: SystemState, n_a: int, target: np.ndarray) -> list[tuple[float, float]]:
    """
    (φ_u, φ_a) starting points: the object point nearest the link, and the
    object point whose normal most opposes the direction towards the target.
    """
    grid = np.arange(SEED_RESOLUTION) / SEED_RESOLUTION
    rot = rotation(state.q_u[2])
    object_points = sample_points(problem.obj.outline, grid) @ rot.T + state.q_u[:2]
    object_normals = _normals(sample_derivatives(problem.obj.outline, grid)) @ rot.T
    link_points = link_sample_points(problem.robot, state.q_a, n_a, SEED_RESOLUTION)
    distances = np.linalg.norm(object_points[:, None, :] - link_points[None, :, :], axis=2)
    i, j = np.unravel_index(int(np.argmin(distances)), distances.shape)
    seeds = [(float(grid[i]), float(grid[j]))]
    direction = np.asarray(target, dtype=float)[:2] - state.q_u[:2]
    if np.linalg.norm(direction) > tol.WAYPOINT_REACHED:
        behind = int(np.argmin(object_normals @ direction))
        nearest_link = int(np.argmin(distances[behind]))
        if behind != i:
            seeds.append((float(grid[behind]), float(grid[nearest_link])))
    return seeds


def preview_push(problem: PlanningProblem, q_u0: np.ndarray, knots: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Numeric free-push preview of the condensed normal impulse profile."""
    options = problem.planner
    impulses = interpolation_matrix(options.contact_horizon, options.control_knots) @ knots * problem.impulse_scale
    states = [np.asarray(q_u0, dtype=float)]
    controls = []
    for impulse in impulses:
        control = np.array([impulse, 0.0, 0.0])
        states.append(states[-1] + object_input_matrix(problem.obj, states[-1]) @ control)
        controls.append(control)
    return np.array(states), np.array(controls)


def verify_contact(problem: PlanningProblem, plan: ContactPlan, pose: np.ndarray, target: np.ndarray) -> tuple[bool, str]:
    """Independent re-check of a contact plan against the exact constraints."""
    state = plan.contact_state(pose)
    gap = contact_gap(problem.robot, problem.obj, state)
    if gap > tol.IN_CONTACT_TOL:
        return False, f"contact gap {gap:.3g} m"
    passed, reason = check_state(
        problem.robot, problem.obj, state, problem.state_bounds, contact=True,
        sample_count=problem.planner.link_sample_count,
    )
    if not passed:
        return False, reason
    weights = problem.metrics.pose_weights
    start = weighted_distance(pose - target, weights)
    end = weighted_distance(plan.preview_states[-1, :3] - target, weights)
    if start > 0.0 and not end < start:
        return False, "preview does not approach the target"
    return True, ""


def plan_contact(problem: PlanningProblem, node: TreeNode, n_a: int, target: np.ndarray) -> ContactPlan:
    """
    Choose contact parameters and a joint configuration for link n_a.

    Raises:
        NoContactPlanError: If no seed yields a verified plan
    """
    problem.robot.check_link(n_a)
    state = node.state
    pose = state.pose.copy()
    goal = aligned_target(pose, target)
    program = build_contact_program(problem, n_a)
    program.set_parameter('pose', pose)
    program.set_parameter('theta_ref', state.theta)
    program.set_parameter('target', goal)

    best: ContactPlan | None = None
    for phi_u, phi_a in contact_seeds(problem, state, n_a, goal):
        program.set_initial('knots', 0.5)
        program.set_initial('phi_u', phi_u)
        program.set_initial('phi_a', phi_a)
        program.set_initial('theta', state.theta)
        report = program.solve(problem.solver)
        if not report.success:
            logger.debug("contact seed (%.3f, %.3f) on link %d: %s", phi_u, phi_a, n_a, report.status)
            continue
        q_u0 = np.append(pose, report['phi_u'][0])
        states, controls = preview_push(problem, q_u0, report['knots'])
        candidate = ContactPlan(
            n_a=n_a,
            phi_u0=float(report['phi_u'][0] % 1.0),
            phi_a0=float(report['phi_a'][0] % 1.0),
            q_a0=report['theta'],
            preview_states=states,
            preview_controls=controls,
            objective=report.objective,
        )
        passed, reason = verify_contact(problem, candidate, pose, goal)
        if not passed:
            logger.debug("contact candidate rejected: %s", reason)
            continue
        if best is None or candidate.objective < best.objective:
            best = candidate
    if best is None:
        raise NoContactPlanError(f"no contact plan for node {node.index} with link {n_a}")
    return best


def plan_random_contact(
    problem: PlanningProblem, node: TreeNode, n_a: int, rng: np.random.Generator
) -> ContactPlan:
    """
    Uniformly sampled contact parameters with an inverse-kinematics joint configuration.

    Raises:
        NoContactPlanError: If the sampled contact is not reachable
    """
    problem.robot.check_link(n_a)
    state = node.state
    pose = state.pose.copy()
    phi_u, phi_a = (float(value) for value in rng.uniform(0.0, 1.0, size=2))
    program = build_ik_program(problem, n_a)
    program.set_parameter('pose', pose)
    program.set_parameter('phi_u', phi_u)
    program.set_parameter('phi_a', phi_a)
    program.set_parameter('theta_ref', state.theta)
    program.set_initial('theta', state.theta)
    report = program.solve(problem.solver)
    if not report.success:
        raise NoContactPlanError(f"random contact ({phi_u:.3f}, {phi_a:.3f}) on link {n_a}: {report.status}")
    steps = problem.planner.contact_horizon
    plan = ContactPlan(
        n_a=n_a,
        phi_u0=phi_u,
        phi_a0=phi_a,
        q_a0=report['theta'],
        preview_states=np.tile(np.append(pose, phi_u), (steps + 1, 1)),
        preview_controls=np.zeros((steps, 3)),
        objective=report.objective,
    )
    passed, reason = verify_contact(problem, plan, pose, pose)
    if not passed:
        raise NoContactPlanError(f"random contact rejected: {reason}")
    return plan
