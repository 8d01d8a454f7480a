"""
Tests for forward kinematics, contact points and the quasistatic input matrices.

Run with: pytest tests/ -v
"""
from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from helpers import chain_frames, chain_tip, contact_state, jacobian_transpose_torques
from core.kinematics import (
    contact_frame,
    cross2,
    forward_kinematics,
    input_matrix,
    joint_origins,
    link_sample_points,
    object_contact_point,
    object_input_matrix,
    robot_contact_point,
    robot_input_matrices,
    rotation,
    step,
    to_world,
)
from core.outline import eval_frame, eval_point
from models.system import ControlInput, InvalidLinkError, SystemState


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


class TestForwardKinematics:
    """Test forward_kinematics() and joint_origins()."""

    def test_straight_arm(self, robot) -> None:
        origins = joint_origins(robot, np.zeros(3))
        assert np.allclose(origins, [[0, 0], [0.42, 0], [0.82, 0], [1.12, 0]])

    def test_first_joint_quarter_turn(self, robot) -> None:
        origins = joint_origins(robot, [math.pi / 2, 0.0, 0.0])
        assert np.allclose(origins[-1], [0.0, 1.12], atol=1e-12)

    def test_accepts_trailing_contact_parameter(self, robot) -> None:
        poses = forward_kinematics(robot, [0.1, 0.2, 0.3, 0.9])
        assert poses[-1].angle == pytest.approx(0.6)

    def test_matches_homogeneous_chain(self, robot, rng: np.random.Generator) -> None:
        for _ in range(50):
            theta = rng.uniform(-2.0, 2.0, size=3)
            frames = chain_frames(robot, theta)
            origins = joint_origins(robot, theta)
            for i in range(3):
                assert np.allclose(origins[i], frames[i][:2, 2], atol=1e-12)
            assert np.allclose(origins[-1], chain_tip(robot, theta), atol=1e-12)

    def test_wrong_joint_count_rejected(self, robot) -> None:
        with pytest.raises(ValueError, match="joint angles"):
            forward_kinematics(robot, [0.0, 0.0])

    def test_link_samples_follow_link(self, robot) -> None:
        points = link_sample_points(robot, [0.0, math.pi / 2, 0.0], 2, 32)
        # link 2 rises vertically from (0.42, 0)
        assert np.all(np.abs(points[:, 0] - 0.42) < 0.07)


class TestObjectContactPoint:
    """Test object_contact_point() against the body-frame outline."""

    def test_identity_pose(self, box) -> None:
        point, normal, tangent = object_contact_point(box, [0.0, 0.0, 0.0, 0.3])
        expected_tangent, expected_normal = eval_frame(box.outline, 0.3)
        assert np.allclose(point, eval_point(box.outline, 0.3))
        assert np.allclose(normal, expected_normal)
        assert np.allclose(tangent, expected_tangent)

    def test_half_turn_reflects_through_origin(self, box) -> None:
        p0, n0, _ = object_contact_point(box, [0.0, 0.0, 0.0, 0.2])
        p1, n1, _ = object_contact_point(box, [0.0, 0.0, math.pi, 0.2])
        assert np.allclose(p1, -p0, atol=1e-12)
        assert np.allclose(n1, -n0, atol=1e-12)

    def test_matches_rigid_transform(self, box, rng: np.random.Generator) -> None:
        for _ in range(50):
            x, y, alpha, phi = rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-4, 4), rng.uniform(0, 1)
            point, _, _ = object_contact_point(box, [x, y, alpha, phi])
            expected = to_world(np.array([x, y, alpha]), eval_point(box.outline, phi))[0]
            assert np.allclose(point, expected, atol=1e-12)

    def test_contact_frame_tangent_reversed(self, box) -> None:
        _, normal, tangent = object_contact_point(box, [0.1, 0.2, 0.3, 0.4])
        _, e_n, e_t = contact_frame(box, [0.1, 0.2, 0.3, 0.4])
        assert np.allclose(e_n, normal)
        assert np.allclose(e_t, -tangent)


class TestRobotContactPoint:
    """Test robot_contact_point() on the active link."""

    def test_independent_of_distal_joints(self, robot) -> None:
        a, _, _ = robot_contact_point(robot, [0.3, -0.4, 0.0, 0.25], 2)
        b, _, _ = robot_contact_point(robot, [0.3, -0.4, 1.7, 0.25], 2)
        assert np.allclose(a, b)

    def test_link_frame_placement(self, robot) -> None:
        q_a = [0.2, 0.5, -0.3, 0.6]
        point, _, _ = robot_contact_point(robot, q_a, 3)
        pose = forward_kinematics(robot, q_a)[2]
        assert np.allclose(point, to_world(pose, eval_point(robot.link_outlines[2], 0.6))[0])

    def test_parameter_override(self, robot) -> None:
        a, _, _ = robot_contact_point(robot, [0.0, 0.0, 0.0, 0.1], 1, phi_a=0.7)
        b, _, _ = robot_contact_point(robot, [0.0, 0.0, 0.0, 0.7], 1)
        assert np.allclose(a, b)

    @pytest.mark.parametrize('n_a', [0, 4])
    def test_invalid_link_rejected(self, robot, n_a: int) -> None:
        with pytest.raises(InvalidLinkError):
            robot_contact_point(robot, [0.0, 0.0, 0.0, 0.0], n_a)


class TestObjectInputMatrix:
    """Test the object block B_u."""

    def test_sliding_column(self, box) -> None:
        matrix = object_input_matrix(box, [0.5, -0.3, 0.7, 0.2])
        assert np.allclose(matrix @ [0.0, 0.0, 1.0], [0, 0, 0, 1])

    def test_central_push_does_not_rotate(self, cylinder) -> None:
        matrix = object_input_matrix(cylinder, [0.4, -0.2, 0.0, 0.0])
        assert abs(matrix[2, 0]) < 1e-9
        assert matrix[3, 0] == 0.0

    def test_normal_impulse_pushes_inward(self, box) -> None:
        q_u = [0.0, 0.0, 0.0, 14 / 96]
        delta = object_input_matrix(box, q_u) @ [1.0, 0.0, 0.0]
        # contact on the bottom face pushes the box up
        assert delta[1] == pytest.approx(1.0, abs=1e-9)
        assert abs(delta[0]) < 1e-9

    def test_matches_force_and_moment(self, box, rng: np.random.Generator) -> None:
        for _ in range(100):
            q_u = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-3, 3), rng.uniform(0, 1)])
            impulse = rng.uniform(-1, 1, size=2)
            point, normal, tangent = object_contact_point(box, q_u)
            force = -impulse[0] * normal + impulse[1] * tangent
            moment = cross2(point - q_u[:2], force) / box.limit_surface_coeff ** 2
            delta = object_input_matrix(box, q_u) @ np.append(impulse, 0.0)
            assert np.allclose(delta[:2], force, atol=1e-12)
            assert delta[2] == pytest.approx(moment, abs=1e-9)


class TestRobotInputMatrices:
    """Test B_a and H_a of the robot block."""

    def test_torque_block_diagonal(self, robot, box) -> None:
        state = SystemState(q_u=[0.8, -0.3, 0.0, 0.1], q_a=[0.1, 0.2, 0.3, 0.4], n_a=3)
        b_a, _ = robot_input_matrices(robot, box, state)
        assert np.allclose(np.diag(b_a), [robot.dt / robot.epsilon] * 3 + [1.0])
        assert np.count_nonzero(b_a - np.diag(np.diag(b_a))) == 0

    def test_matches_jacobian_transpose(self, robot, box, rng: np.random.Generator) -> None:
        for _ in range(50):
            n_a = int(rng.integers(1, 4))
            q_a = np.append(rng.uniform(-1.5, 1.5, size=3), rng.uniform(0, 1))
            state = contact_state(robot, box, q_a, n_a, rng.uniform(0, 1), rng.uniform(-3, 3))
            impulse = rng.uniform(-1, 1, size=2)
            _, e_n, e_t = contact_frame(box, state.q_u)
            contact, _, _ = robot_contact_point(robot, q_a, n_a)
            expected = jacobian_transpose_torques(
                robot, q_a[:3], n_a, contact, impulse[0] * e_n + impulse[1] * e_t
            ) / robot.epsilon
            _, h_a = robot_input_matrices(robot, box, state)
            assert np.allclose(h_a[:3, :2] @ impulse, expected, atol=1e-12)
            assert np.allclose(h_a[n_a:, :], 0.0)
            assert np.allclose(h_a[:, 2], 0.0)

    def test_epsilon_scaling(self, robot, box) -> None:
        state = contact_state(robot, box, np.array([-0.4, 0.9, 0.8, 0.3]), 2, 0.5)
        control = ControlInput(u_u=[0.01, 0.002, 0.0], u_a=[0.3, -0.2, 0.1, 0.0])
        stiff = dataclasses.replace(robot, epsilon=2.0)
        delta = input_matrix(robot, box, state) @ control.vector()
        delta_stiff = input_matrix(stiff, box, state) @ control.vector()
        assert np.allclose(delta_stiff[4:], delta[4:] / 2.0, atol=1e-15)
        assert np.allclose(delta_stiff[:4], delta[:4])

    def test_input_matrix_shape(self, robot, box) -> None:
        state = contact_state(robot, box, np.array([0.0, 0.5, 0.5, 0.0]), 1, 0.0)
        assert input_matrix(robot, box, state).shape == (8, 7)


class TestStep:
    """Test the quasistatic update."""

    def test_zero_control_is_identity(self, robot, box_scenario) -> None:
        start = box_scenario.start
        result = step(robot, box_scenario.obj, start, ControlInput.zeros(3))
        assert np.array_equal(result.vector(), start.vector())
        assert result.n_a == start.n_a

    def test_torques_without_contact_leave_object(self, robot, box_scenario) -> None:
        start = box_scenario.start
        control = ControlInput(u_u=[0.0, 0.0, 0.0], u_a=[0.5, -0.5, 0.2, 0.0])
        result = step(robot, box_scenario.obj, start, control)
        assert np.array_equal(result.q_u, start.q_u)
        assert np.allclose(result.theta, start.theta + robot.dt / robot.epsilon * np.array([0.5, -0.5, 0.2]))

    def test_contact_parameters_wrap(self, robot, box) -> None:
        state = SystemState(q_u=[0.8, -0.3, 0.0, 0.98], q_a=[0.0, 0.0, 0.0, 0.01], n_a=1)
        control = ControlInput(u_u=[0.0, 0.0, 0.05], u_a=[0.0, 0.0, 0.0, -0.03])
        result = step(robot, box, state, control)
        assert result.phi_u == pytest.approx(0.03)
        assert result.phi_a == pytest.approx(0.98)

    def test_blocks_compose(self, robot, box) -> None:
        state = contact_state(robot, box, np.array([-0.4, 0.9, 0.8, 0.3]), 3, 0.6, 0.4)
        control = ControlInput(u_u=[0.01, -0.003, 0.01], u_a=[0.1, 0.2, -0.1, 0.01])
        b_a, h_a = robot_input_matrices(robot, box, state)
        result = step(robot, box, state, control)
        assert np.allclose(result.q_u[:3], (state.q_u + object_input_matrix(box, state.q_u) @ control.u_u)[:3])
        expected_q_a = state.q_a + h_a @ control.u_u + b_a @ control.u_a
        assert np.allclose(result.q_a[:3], expected_q_a[:3])
        assert result.phi_a == pytest.approx(expected_q_a[3] % 1.0)

    def test_rotation_is_orthonormal(self) -> None:
        matrix = rotation(0.7)
        assert np.allclose(matrix @ matrix.T, np.eye(2))
