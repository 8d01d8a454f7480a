"""Guide tracking: one-step programs that append nodes to the tree.

Each accepted step stores the control and the child state produced by the
numeric model step, so replaying an edge reproduces its child exactly.
"""

from __future__ import annotations

import logging

import casadi as ca
import numpy as np

from ..models.planning import ContactPlan, PlanTree, TrackingOutcome, TreeNode
from ..models.system import ControlInput, SystemState
from ..models.types import StopReason
from . import tolerances as tol
from .constraints import (
    check_contact_control,
    check_state,
    cone_terms,
    contact_gap,
    mode_terms,
    state_bounds,
)
from .contact_planning import add_contact_geometry, add_link_clearances
from .kinematics import input_matrix, robot_contact_point, step, sx_robot_contact
from .metrics import parameter_difference
from .nlp import Program, relax_and_resolve
from .outline import SingularFrameError
from .problem import PlanningProblem

logger = logging.getLogger(__name__)


def lookahead_window(guide: np.ndarray, start: int, count: int) -> np.ndarray:
    """Rows start..start+count of the guide, padded with its last row."""
    rows = [guide[min(start + j, guide.shape[0] - 1)] for j in range(count)]
    return np.asarray(rows, dtype=float)


def is_static(problem: PlanningProblem, u: ControlInput) -> bool:
    """True when every scaled control component is below the static threshold."""
    return bool(np.max(np.abs(u.vector() / problem.control_scale())) <= problem.planner.static_control_tol)


def _joint_limit_terms(problem: PlanningProblem, theta: ca.SX) -> ca.SX:
    limits = np.asarray(problem.robot.joint_limits, dtype=float)
    return ca.vertcat(theta - ca.DM(limits[:, 0]), ca.DM(limits[:, 1]) - theta)


def _torque_gain(problem: PlanningProblem) -> ca.DM:
    robot = problem.robot
    return ca.DM(np.asarray(robot.torque_limits) * robot.dt / robot.epsilon)


def _decay(problem: PlanningProblem) -> np.ndarray:
    options = problem.planner
    return options.lookahead_decay ** np.arange(options.tracking_lookahead)


def build_contact_free_program(problem: PlanningProblem, n_a: int) -> Program:
    """One-step program moving the link n_a contact point along waypoints without touching the object."""
    key = ('contact_free', n_a)
    cached = problem.cached(key)
    if cached is not None:
        return cached
    n = problem.n_joints
    lookahead = problem.planner.tracking_lookahead
    program = Program(f'contact_free_link{n_a}')
    torque = program.variable('tau', n, lower=-1.0, upper=1.0)
    theta = program.parameter('theta', n)
    phi_a = program.parameter('phi_a', 1)
    v_a = program.parameter('v_a', 1)
    waypoints = program.parameter('waypoints', 2 * lookahead)
    pose = program.parameter('pose', 3)

    theta_next = theta + _torque_gain(problem) * torque
    point, _, _ = sx_robot_contact(problem.robot, theta_next, n_a, phi_a + v_a)
    decay = _decay(problem)
    cost = ca.SX(0)
    for j in range(lookahead):
        cost = cost + decay[j] * ca.sumsqr(point - waypoints[2 * j:2 * j + 2])
    cost = tol.CONTACT_FREE_TRACKING_WEIGHT * cost
    cost = cost + tol.POSTURE_WEIGHT * ca.sumsqr(theta_next - theta) + tol.CONTROL_REGULARIZATION * ca.sumsqr(torque)
    program.minimize(cost)
    program.add_inequality(_joint_limit_terms(problem, theta_next))
    add_link_clearances(program, problem, ca.vertcat(pose, 0), theta_next, active=None)
    return problem.remember(key, program)


def _reject(problem: PlanningProblem, state: SystemState, contact: bool) -> StopReason | None:
    """Stop reason of a child state that fails the exact checks, or None."""
    if not state_bounds(state, problem.state_bounds).is_satisfied(1e-9):
        return 'constraint_violation'
    if contact and contact_gap(problem.robot, problem.obj, state) > tol.IN_CONTACT_TOL:
        return 'constraint_violation'
    passed, reason = check_state(
        problem.robot, problem.obj, state, problem.state_bounds, contact=contact,
        sample_count=problem.planner.link_sample_count,
    )
    if not passed:
        logger.debug("step rejected: %s", reason)
        return 'collision'
    return None


def advance_waypoints(path: np.ndarray, index: int, point: np.ndarray, reached: float) -> int:
    """
    Index of the first waypoint still ahead of `point`.

    A waypoint is passed when the point is within `reached` of it, or, for
    all but the last waypoint, when the point is no farther from the next one.
    """
    last = path.shape[0] - 1
    while index <= last:
        distance = np.linalg.norm(point - path[index])
        if distance <= reached:
            index += 1
        elif index < last and np.linalg.norm(point - path[index + 1]) <= distance:
            index += 1
        else:
            break
    return index


def track_contact_free(
    tree: PlanTree,
    node: TreeNode,
    path: np.ndarray,
    problem: PlanningProblem,
    plan: ContactPlan,
) -> TrackingOutcome:
    """
    Follow contact-free waypoints with the planned link point.

    The first step relabels φ_a to φ_a⁽⁰⁾; the object is untouched (u_u = 0).
    Waypoints advance through advance_waypoints(); the guide ends when the
    last one is within `waypoint_reached`.
    """
    options = problem.planner
    path = np.asarray(path, dtype=float).reshape(-1, 2)
    if path.shape[0] == 0:
        raise ValueError("contact-free path is empty")
    program = build_contact_free_program(problem, plan.n_a)
    program.set_parameter('pose', node.state.pose)
    program.set_initial('tau', 0.0)
    torque_limits = np.asarray(problem.robot.torque_limits)
    state = node.state.with_link(plan.n_a)
    parent = node
    relabel = parameter_difference(plan.phi_a0, state.phi_a)
    start, _, _ = robot_contact_point(problem.robot, np.append(state.theta, plan.phi_a0), plan.n_a)
    index = min(advance_waypoints(path, 0, start, options.waypoint_reached), path.shape[0] - 1)
    nodes: list[TreeNode] = []
    for count in range(options.max_tracking_steps):
        v_a = relabel if count == 0 else 0.0
        program.set_parameter('theta', state.theta)
        program.set_parameter('phi_a', state.phi_a)
        program.set_parameter('v_a', v_a)
        program.set_parameter('waypoints', lookahead_window(path, index, options.tracking_lookahead).reshape(-1))
        report = program.solve(problem.solver)
        if not report.success:
            return TrackingOutcome(nodes, 'not_converged')
        program.set_initial('tau', report['tau'])
        control = ControlInput(u_u=np.zeros(3), u_a=np.append(report['tau'] * torque_limits, v_a))
        if is_static(problem, control):
            return TrackingOutcome(nodes, 'static')
        child = step(problem.robot, problem.obj, state, control)
        rejected = _reject(problem, child, contact=False)
        if rejected is not None:
            return TrackingOutcome(nodes, rejected)
        parent = tree.add_child(parent.index, child, control, 'contact-free')
        nodes.append(parent)
        state = child
        point, _, _ = robot_contact_point(problem.robot, state.q_a, state.n_a)
        index = advance_waypoints(path, index, point, options.waypoint_reached)
        if index >= path.shape[0]:
            return TrackingOutcome(nodes, 'end_of_guide', reached_end=True)
    return TrackingOutcome(nodes, 'step_limit')


def build_establish_program(problem: PlanningProblem, n_a: int) -> Program:
    """One-step program closing the remaining gap to the planned contact."""
    key = ('establish', n_a)
    cached = problem.cached(key)
    if cached is not None:
        return cached
    n = problem.n_joints
    program = Program(f'establish_link{n_a}')
    torque = program.variable('tau', n, lower=-1.0, upper=1.0)
    theta = program.parameter('theta', n)
    phi_a = program.parameter('phi_a', 1)
    q_u = program.parameter('q_u', 4)
    theta_next = theta + _torque_gain(problem) * torque
    program.minimize(ca.sumsqr(theta_next - theta) + tol.CONTROL_REGULARIZATION * ca.sumsqr(torque))
    program.add_inequality(_joint_limit_terms(problem, theta_next))
    add_contact_geometry(program, problem, n_a, q_u, theta_next, phi_a)
    return problem.remember(key, program)


def establish_contact(tree: PlanTree, node: TreeNode, plan: ContactPlan, problem: PlanningProblem) -> TreeNode | None:
    """
    Append the edge that brings the link onto the planned contact location.

    The edge is labelled in-contact with λ = 0 and v_a = 0; v_u relabels
    φ_u to φ_u⁽⁰⁾. Returns the node itself when it already is that contact,
    and None when no admissible step exists.
    """
    state = node.state.with_link(plan.n_a)
    relabel = parameter_difference(plan.phi_u0, state.phi_u)
    if abs(relabel) <= 1e-12 and contact_gap(problem.robot, problem.obj, state) <= tol.IN_CONTACT_TOL:
        return node
    program = build_establish_program(problem, plan.n_a)
    program.set_parameter('theta', state.theta)
    program.set_parameter('phi_a', state.phi_a)
    program.set_parameter('q_u', np.append(state.pose, plan.phi_u0))
    program.set_initial('tau', 0.0)
    report = program.solve(problem.solver)
    if not report.success:
        logger.debug("contact establishment ended %s", report.status)
        return None
    torques = report['tau'] * np.asarray(problem.robot.torque_limits)
    control = ControlInput(u_u=np.array([0.0, 0.0, relabel]), u_a=np.append(torques, 0.0))
    child = step(problem.robot, problem.obj, state, control)
    if _reject(problem, child, contact=True) is not None:
        return None
    return tree.add_child(node.index, child, control, 'in-contact')


def build_in_contact_program(problem: PlanningProblem, n_a: int, robot_sliding: bool) -> Program:
    """One-step program tracking object guide states while keeping the contact."""
    key = ('in_contact', n_a, robot_sliding)
    cached = problem.cached(key)
    if cached is not None:
        return cached
    n = problem.n_joints
    mu = problem.obj.friction_mu
    lookahead = problem.planner.tracking_lookahead
    sliding = problem.planner.sliding_rate_max / problem.rate_scale
    robot_rate = sliding if robot_sliding else 0.0
    lower = np.concatenate([[0.0, -1.0, -sliding], -np.ones(n), [-robot_rate]])
    upper = np.concatenate([[1.0, 1.0, sliding], np.ones(n), [robot_rate]])

    program = Program(f'in_contact_link{n_a}')
    scaled = program.variable('u', n + 4, lower=lower, upper=upper)
    q = program.parameter('q', n + 5)
    matrix = program.parameter('B', (n + 5) * (n + 4))
    guide = program.parameter('guide', 3 * lookahead)

    u = scaled * ca.DM(problem.control_scale())
    q_next = q + ca.mtimes(ca.reshape(matrix, n + 5, n + 4), u)
    q_u_next = q_next[:4]
    theta_next = q_next[4:4 + n]
    phi_a_next = q_next[4 + n]

    program.add_inequality(ca.vertcat(*cone_terms(scaled[0], scaled[1], mu)))
    inequalities, (first, second) = mode_terms(scaled[2], scaled[n + 3], scaled[0], scaled[1], mu)
    program.add_inequality(ca.vertcat(*inequalities))
    program.add_complementarity(first, second)
    program.add_inequality(_joint_limit_terms(problem, theta_next))
    bounds = problem.state_bounds
    program.add_inequality(ca.vertcat(q_u_next[:3] - ca.DM(bounds.lower[:3]), ca.DM(bounds.upper[:3]) - q_u_next[:3]))
    add_contact_geometry(program, problem, n_a, q_u_next, theta_next, phi_a_next)

    weights = ca.DM(problem.pose_weights)
    decay = _decay(problem)
    cost = ca.SX(0)
    for j in range(lookahead):
        cost = cost + decay[j] * ca.sumsqr((q_u_next[:3] - guide[3 * j:3 * j + 3]) * weights)
    program.minimize(cost + tol.CONTROL_REGULARIZATION * ca.sumsqr(scaled))
    return problem.remember(key, program)


def track_in_contact(
    tree: PlanTree,
    node: TreeNode,
    guide: np.ndarray,
    problem: PlanningProblem,
    robot_sliding: bool = True,
) -> TrackingOutcome:
    """
    Track the object guide from a node in contact, one guide step per tree edge.

    Args:
        tree: Tree memory
        node: Node in contact (gap within IN_CONTACT_TOL)
        guide: Object states (N_l + 1, 4); row 0 is the start
        problem: Planning problem
        robot_sliding: Allow v_a != 0
    """
    state = node.state
    if contact_gap(problem.robot, problem.obj, state) > tol.IN_CONTACT_TOL:
        raise ValueError(f"node {node.index} is not in contact")
    guide = np.asarray(guide, dtype=float)
    options = problem.planner
    program = build_in_contact_program(problem, state.n_a, robot_sliding)
    program.set_initial('u', 0.0)
    scale = problem.control_scale()
    parent = node
    nodes: list[TreeNode] = []
    steps = min(guide.shape[0] - 1, options.max_tracking_steps)
    for k in range(steps):
        try:
            matrix = input_matrix(problem.robot, problem.obj, state)
        except SingularFrameError:
            return TrackingOutcome(nodes, 'not_converged')
        program.set_parameter('q', state.vector())
        program.set_parameter('B', matrix.reshape(-1, order='F'))
        program.set_parameter('guide', lookahead_window(guide[:, :3], k + 1, options.tracking_lookahead).reshape(-1))
        report = relax_and_resolve(program, options.complementarity_schedule, problem.solver)
        if not report.success:
            return TrackingOutcome(nodes, 'not_converged')
        program.set_initial('u', report['u'])
        control = ControlInput.from_vector(report['u'] * scale)
        if is_static(problem, control):
            return TrackingOutcome(nodes, 'static')
        passed, reason = check_contact_control(control, problem.obj.friction_mu)
        if not passed:
            logger.debug("in-contact step rejected: %s", reason)
            return TrackingOutcome(nodes, 'constraint_violation')
        child = step(problem.robot, problem.obj, state, control)
        rejected = _reject(problem, child, contact=True)
        if rejected is not None:
            return TrackingOutcome(nodes, rejected)
        parent = tree.add_child(parent.index, child, control, 'in-contact')
        nodes.append(parent)
        state = child
    if steps < guide.shape[0] - 1:
        return TrackingOutcome(nodes, 'step_limit')
    return TrackingOutcome(nodes, 'end_of_guide', reached_end=True)
