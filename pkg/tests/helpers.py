"""
Shared test helpers for wbplanner tests.

Independent oracles (loops, homogeneous transforms, shapely geometry) that the
vectorized production code is checked against, plus small state builders.
"""
from __future__ import annotations

import math

import numpy as np
from shapely.geometry import Point, Polygon

from models.outline import ParametricOutline
from models.planning import PlanTree, StateWeights
from models.system import ControlInput, ObjectModel, RobotModel, SystemState


def outline_point_by_summation(outline: ParametricOutline, phi: float) -> np.ndarray:
    """p(φ) by explicit summation over vertices and periodic images."""
    vertices = outline.polygon.as_array()
    count = vertices.shape[0]
    centroid = vertices.mean(axis=0)
    wrapped = phi - math.floor(phi)
    weights = []
    for n in range(count):
        total = 0.0
        for image in (-1, 0, 1):
            z = (wrapped - n / count + image) / outline.sigma
            total += math.exp(-z * z)
        weights.append(total / (count * outline.sigma * math.sqrt(math.pi)))
    if outline.normalized:
        norm = sum(weights)
        weights = [w / norm for w in weights]
    point = centroid.copy()
    for n in range(count):
        point = point + weights[n] * (vertices[n] - centroid)
    return point


def homogeneous(x: float, y: float, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, x], [s, c, y], [0.0, 0.0, 1.0]])


def chain_frames(robot: RobotModel, theta: np.ndarray) -> list[np.ndarray]:
    """Homogeneous transform of each link frame, base link first."""
    frame = homogeneous(*robot.base_pose)
    frames = []
    for length, angle in zip(robot.link_lengths, theta):
        frame = frame @ homogeneous(0.0, 0.0, float(angle))
        frames.append(frame)
        frame = frame @ homogeneous(length, 0.0, 0.0)
    frames.append(frame)
    return frames


def chain_tip(robot: RobotModel, theta: np.ndarray) -> np.ndarray:
    return chain_frames(robot, theta)[-1][:2, 2]


def jacobian_transpose_torques(
    robot: RobotModel, theta: np.ndarray, n_a: int, point: np.ndarray, force: np.ndarray
) -> np.ndarray:
    """Jᵀf of a planar force applied at a point on link n_a."""
    frames = chain_frames(robot, theta)
    torques = np.zeros(robot.n_joints)
    for i in range(n_a):
        arm = point - frames[i][:2, 2]
        column = np.array([-arm[1], arm[0]])
        torques[i] = column @ force
    return torques


def polygon_contains(vertices: np.ndarray, point: np.ndarray) -> bool:
    return Polygon(vertices).contains(Point(float(point[0]), float(point[1])))


def contact_state(
    robot: RobotModel,
    obj: ObjectModel,
    q_a: np.ndarray,
    n_a: int,
    phi_u: float,
    alpha: float = 0.0,
) -> SystemState:
    """State whose object contact point coincides with the robot contact point."""
    from core.kinematics import robot_contact_point, rotation
    from core.outline import eval_point

    p_a, _, _ = robot_contact_point(robot, q_a, n_a)
    origin = p_a - rotation(alpha) @ eval_point(obj.outline, phi_u)
    return SystemState(q_u=np.array([origin[0], origin[1], alpha, phi_u]), q_a=np.asarray(q_a, dtype=float), n_a=n_a)


def pose_state(x: float, y: float, alpha: float, n_joints: int = 3, n_a: int = 1) -> SystemState:
    """State with the given object pose and a straight arm."""
    return SystemState(q_u=np.array([x, y, alpha, 0.0]), q_a=np.zeros(n_joints + 1), n_a=n_a)


def path_costs_by_enumeration(
    tree: PlanTree, weights: StateWeights, switching_penalty: float
) -> dict[int, float]:
    """
    Root-to-node cost of every node by walking each node's unique path.

    Each edge costs Σ (w_k δ_k)² with α_u wrapped to ±π and both contact
    parameters wrapped to ±0.5, plus the penalty when its phase differs from
    the previous edge on the path.
    """
    costs = {}
    for node in tree:
        path = tree.path_to(node.index)
        total = 0.0
        previous_phase = None
        for parent, child in zip(path, path[1:]):
            before, after = parent.state.vector(), child.state.vector()
            last = len(after) - 1
            for k, weight in enumerate(weights.diagonal):
                delta = after[k] - before[k]
                if k == 2:
                    delta = math.remainder(delta, 2.0 * math.pi)
                elif k == 3 or k == last:
                    delta = math.remainder(delta, 1.0)
                total += (weight * delta) ** 2
            if previous_phase is not None and child.edge.phase != previous_phase:
                total += switching_penalty
            previous_phase = child.edge.phase
        costs[node.index] = total
    return costs


def zero_control(n_joints: int = 3) -> ControlInput:
    return ControlInput.zeros(n_joints)
