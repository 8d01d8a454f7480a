"""Planar chain kinematics and quasistatic input matrices.

The state update is q(k+1) = q(k) + B(q(k)) u(k) with

    B = | B_u   0  |
        | H_a  B_a |

where B_u maps the contact impulse through the ellipsoidal limit surface of
the object, B_a maps joint torques through the quasistatic regularization and
H_a maps the reaction impulse felt by the robot onto its joints.

Contact frame convention: e_n is the outward object normal and e_t the
negated object tangent. The object receives -(λ_n e_n + λ_t e_t); the
robot receives +(λ_n e_n + λ_t e_t).
"""

from __future__ import annotations

from functools import lru_cache

import casadi as ca
import numpy as np

from ..models.outline import ParametricOutline
from ..models.system import ControlInput, LinkPose, ObjectModel, RobotModel, SystemState
from .outline import eval_frame, eval_point, outline_function, sample_points


def rotation(angle: float) -> np.ndarray:
    """2x2 rotation matrix."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def cross2(a: np.ndarray, b: np.ndarray) -> float:
    """z-component of the planar cross product a × b."""
    return float(a[0] * b[1] - a[1] * b[0])


def _joint_angles(robot: RobotModel, q_a: np.ndarray) -> np.ndarray:
    values = np.asarray(q_a, dtype=float).reshape(-1)
    if values.shape[0] not in (robot.n_joints, robot.n_joints + 1):
        raise ValueError(f"expected {robot.n_joints} joint angles, got {values.shape[0]}")
    if not np.all(np.isfinite(values)):
        raise ValueError("joint angles must be finite")
    return values[:robot.n_joints]


def forward_kinematics(robot: RobotModel, q_a: np.ndarray) -> list[LinkPose]:
    """
    World pose of every link frame.

    Link i sits at joint i with absolute angle base + θ_1 + ... + θ_i.

    Args:
        robot: Robot model
        q_a: Joint angles, optionally followed by φ_a

    Returns:
        One LinkPose per link, base link first
    """
    theta = _joint_angles(robot, q_a)
    x, y, angle = robot.base_pose
    origin = np.array([x, y], dtype=float)
    poses: list[LinkPose] = []
    for length, joint in zip(robot.link_lengths, theta):
        angle = angle + float(joint)
        poses.append(LinkPose(origin=(float(origin[0]), float(origin[1])), angle=angle))
        origin = origin + length * np.array([np.cos(angle), np.sin(angle)])
    return poses


def joint_origins(robot: RobotModel, q_a: np.ndarray) -> np.ndarray:
    """Positions p_1..p_Na of the joints followed by the chain tip, shape (N_a + 1, 2)."""
    poses = forward_kinematics(robot, q_a)
    last = poses[-1]
    tip = np.asarray(last.origin) + robot.link_lengths[-1] * np.array([np.cos(last.angle), np.sin(last.angle)])
    return np.vstack([np.array([pose.origin for pose in poses]), tip])


def to_world(pose: LinkPose | np.ndarray, points: np.ndarray) -> np.ndarray:
    """Map body-frame points (k, 2) through a link pose or an (x, y, α) object pose."""
    if isinstance(pose, LinkPose):
        origin, angle = np.asarray(pose.origin), pose.angle
    else:
        origin, angle = np.asarray(pose[:2], dtype=float), float(pose[2])
    return np.asarray(points, dtype=float).reshape(-1, 2) @ rotation(angle).T + origin


def object_contact_point(obj: ObjectModel, q_u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    World contact point, outward normal and tangent on the object at φ_u.

    Raises:
        SingularFrameError: If the outline frame is singular at φ_u
    """
    q_u = np.asarray(q_u, dtype=float)
    rot = rotation(q_u[2])
    point = rot @ eval_point(obj.outline, q_u[3]) + q_u[:2]
    tangent, normal = eval_frame(obj.outline, q_u[3])
    return point, rot @ normal, rot @ tangent


def robot_contact_point(
    robot: RobotModel, q_a: np.ndarray, n_a: int, phi_a: float | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    World contact point, outward normal and tangent on link n_a.

    Args:
        robot: Robot model
        q_a: Joint angles followed by φ_a (or joint angles only when phi_a is given)
        n_a: Active link, 1-based
        phi_a: Overrides the φ_a stored in q_a

    Raises:
        InvalidLinkError: If n_a is outside 1..N_a
    """
    robot.check_link(n_a)
    if phi_a is None:
        phi_a = float(np.asarray(q_a, dtype=float)[robot.n_joints])
    pose = forward_kinematics(robot, q_a)[n_a - 1]
    rot = rotation(pose.angle)
    outline = robot.link_outlines[n_a - 1]
    point = rot @ eval_point(outline, phi_a) + np.asarray(pose.origin)
    tangent, normal = eval_frame(outline, phi_a)
    return point, rot @ normal, rot @ tangent


def contact_frame(obj: ObjectModel, q_u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Object contact point with the (e_n, e_t) basis of the contact impulse."""
    point, normal, tangent = object_contact_point(obj, q_u)
    return point, normal, -tangent


def object_input_matrix(obj: ObjectModel, q_u: np.ndarray) -> np.ndarray:
    """
    B_u (4x3) of the object block.

    Columns map λ_n, λ_t and v_u. The impulse on the object produces
    δ(x, y) = f and δα = (r × f) / k_L² with r measured from the object origin.
    """
    q_u = np.asarray(q_u, dtype=float)
    point, e_n, e_t = contact_frame(obj, q_u)
    arm = point - q_u[:2]
    scale = 1.0 / obj.limit_surface_coeff ** 2
    matrix = np.zeros((4, 3))
    for column, direction in enumerate((-e_n, -e_t)):
        matrix[:2, column] = direction
        matrix[2, column] = cross2(arm, direction) * scale
    matrix[3, 2] = 1.0
    return matrix


def robot_input_matrices(robot: RobotModel, obj: ObjectModel, q: SystemState) -> tuple[np.ndarray, np.ndarray]:
    """
    B_a ((N_a+1)x(N_a+1)) and H_a ((N_a+1)x3) of the robot block.

    Row i of H_a (i <= n_a) is the moment of the reaction impulse about
    joint i divided by ε; the φ_a row and rows of distal joints are zero.
    """
    n = robot.n_joints
    b_a = np.diag([robot.dt / robot.epsilon] * n + [1.0])
    h_a = np.zeros((n + 1, 3))
    _, e_n, e_t = contact_frame(obj, q.q_u)
    contact, _, _ = robot_contact_point(robot, q.q_a, q.n_a)
    origins = joint_origins(robot, q.q_a)
    for i in range(q.n_a):
        arm = contact - origins[i]
        h_a[i, 0] = cross2(arm, e_n) / robot.epsilon
        h_a[i, 1] = cross2(arm, e_t) / robot.epsilon
    return b_a, h_a


def input_matrix(robot: RobotModel, obj: ObjectModel, q: SystemState) -> np.ndarray:
    """Block matrix B of the full state update, shape (N_a+5)x(N_a+4)."""
    n = robot.n_joints
    b_a, h_a = robot_input_matrices(robot, obj, q)
    matrix = np.zeros((n + 5, n + 4))
    matrix[:4, :3] = object_input_matrix(obj, q.q_u)
    matrix[4:, :3] = h_a
    matrix[4:, 3:] = b_a
    return matrix


def step(robot: RobotModel, obj: ObjectModel, q: SystemState, u: ControlInput) -> SystemState:
    """One quasistatic step q + B(q) u with φ values wrapped."""
    delta = input_matrix(robot, obj, q) @ u.vector()
    return SystemState.from_vector(q.vector() + delta, q.n_a).wrapped()


@lru_cache(maxsize=None)
def _body_samples(outline: ParametricOutline, count: int) -> np.ndarray:
    samples = sample_points(outline, np.arange(count) / count)
    samples.setflags(write=False)
    return samples


def link_sample_points(robot: RobotModel, q_a: np.ndarray, link: int, count: int) -> np.ndarray:
    """World positions of `count` evenly parameterized outline points of a link (1-based)."""
    robot.check_link(link)
    pose = forward_kinematics(robot, q_a)[link - 1]
    return to_world(pose, _body_samples(robot.link_outlines[link - 1], count))


# --- CasADi expressions for the optimization problems ---

def sx_rotation(angle: ca.SX) -> ca.SX:
    c, s = ca.cos(angle), ca.sin(angle)
    return ca.vertcat(ca.horzcat(c, -s), ca.horzcat(s, c))


def sx_cross2(a: ca.SX, b: ca.SX) -> ca.SX:
    return a[0] * b[1] - a[1] * b[0]


def sx_link_poses(robot: RobotModel, theta: ca.SX) -> list[tuple[ca.SX, ca.SX]]:
    """Symbolic (origin, angle) of every link frame."""
    x, y, angle = robot.base_pose
    origin: ca.SX = ca.DM([x, y])
    current: ca.SX = ca.DM(angle)
    poses = []
    for i, length in enumerate(robot.link_lengths):
        current = current + theta[i]
        poses.append((origin, current))
        origin = origin + length * ca.vertcat(ca.cos(current), ca.sin(current))
    return poses


def sx_robot_contact(robot: RobotModel, theta: ca.SX, n_a: int, phi_a: ca.SX) -> tuple[ca.SX, ca.SX, ca.SX]:
    """Symbolic world point, normal and tangent on link n_a."""
    origin, angle = sx_link_poses(robot, theta)[n_a - 1]
    point, normal, tangent = outline_function(robot.link_outlines[n_a - 1])(phi_a)
    rot = sx_rotation(angle)
    return ca.mtimes(rot, point) + origin, ca.mtimes(rot, normal), ca.mtimes(rot, tangent)


def sx_object_contact(obj: ObjectModel, q_u: ca.SX) -> tuple[ca.SX, ca.SX, ca.SX]:
    """Symbolic world point, normal and tangent on the object."""
    point, normal, tangent = outline_function(obj.outline)(q_u[3])
    rot = sx_rotation(q_u[2])
    return ca.mtimes(rot, point) + q_u[:2], ca.mtimes(rot, normal), ca.mtimes(rot, tangent)


def sx_object_input_matrix(obj: ObjectModel, q_u: ca.SX) -> ca.SX:
    """Symbolic B_u(q_u), shape 4x3."""
    point, normal, tangent = sx_object_contact(obj, q_u)
    arm = point - q_u[:2]
    scale = 1.0 / obj.limit_surface_coeff ** 2
    push_n, push_t = -normal, tangent
    return ca.vertcat(
        ca.horzcat(push_n, push_t, ca.DM.zeros(2, 1)),
        ca.horzcat(sx_cross2(arm, push_n) * scale, sx_cross2(arm, push_t) * scale, 0),
        ca.horzcat(0, 0, 1),
    )


def sx_object_step(obj: ObjectModel, q_u: ca.SX, u_u: ca.SX) -> ca.SX:
    """Symbolic q_u + B_u(q_u) u_u."""
    return q_u + ca.mtimes(sx_object_input_matrix(obj, q_u), u_u)


def sx_link_samples(robot: RobotModel, theta: ca.SX, link: int, count: int) -> ca.SX:
    """Symbolic world sample points of a link, shape 2 x count."""
    origin, angle = sx_link_poses(robot, theta)[link - 1]
    body = ca.DM(_body_samples(robot.link_outlines[link - 1], count).T)
    return ca.mtimes(sx_rotation(angle), body) + ca.repmat(origin, 1, count)
