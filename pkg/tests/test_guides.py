"""
Tests for the contact-free approach path and the in-contact object guide.

Run with: pytest tests/ -v
"""
from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from core.constraints import cone_terms
from core.guides import (
    InteriorStartError,
    build_guide_program,
    constant_goal_guide,
    guide_contact_free,
    guide_in_contact,
    margin_schedule,
)
from core.kinematics import object_input_matrix, robot_contact_point
from core.metrics import weighted_distance
from core.outline import eval_frame, eval_point
from models.planning import ContactPlan
from models.system import SystemState

BOTTOM_MID = 14 / 96


def contact_plan(n_a: int = 2, phi_u0: float = BOTTOM_MID, phi_a0: float = 0.5) -> ContactPlan:
    return ContactPlan(
        n_a=n_a,
        phi_u0=phi_u0,
        phi_a0=phi_a0,
        q_a0=np.zeros(3),
        preview_states=np.zeros((1, 4)),
        preview_controls=np.zeros((0, 3)),
    )


class TestMarginSchedule:
    """Test margin_schedule() taper."""

    def test_endpoints(self, problem) -> None:
        options = problem.planner
        values = margin_schedule(np.array([0.0, 1.0]), problem)
        assert values[0] == pytest.approx(options.margin_max)
        assert values[1] == pytest.approx(options.margin_min)

    def test_constant_before_taper(self, problem) -> None:
        start = 1.0 - problem.planner.margin_taper_fraction
        values = margin_schedule(np.linspace(0.0, start, 5), problem)
        assert np.allclose(values, problem.planner.margin_max)

    def test_monotone_taper(self, problem) -> None:
        values = margin_schedule(np.linspace(0.0, 1.0, 101), problem)
        assert np.all(np.diff(values) <= 1e-15)

    def test_zero_fraction_is_a_step(self, problem) -> None:
        stepped = dataclasses.replace(
            problem, planner=dataclasses.replace(problem.planner, margin_taper_fraction=0.0),
        )
        values = margin_schedule(np.array([0.0, 0.999, 1.0]), stepped)
        assert np.allclose(values, [stepped.planner.margin_max] * 2 + [stepped.planner.margin_min])


class TestGuideContactFree:
    """Test guide_contact_free() waypoints."""

    def test_ends_at_approach_point(self, problem, box_scenario) -> None:
        state = box_scenario.start
        waypoints = guide_contact_free(problem, state, contact_plan())
        _, normal = eval_frame(problem.obj.outline, BOTTOM_MID)
        point = eval_point(problem.obj.outline, BOTTOM_MID) + state.pose[:2]
        expected = point + problem.planner.margin_min * normal
        assert np.allclose(waypoints[-1], expected, atol=1e-9)

    def test_waypoint_spacing(self, problem, box_scenario) -> None:
        state = box_scenario.start
        plan = contact_plan()
        waypoints = guide_contact_free(problem, state, plan)
        start, _, _ = robot_contact_point(problem.robot, np.append(state.theta, plan.phi_a0), plan.n_a)
        steps = np.linalg.norm(np.diff(np.vstack([start, waypoints]), axis=0), axis=1)
        assert np.all(steps <= problem.planner.waypoint_spacing + 1e-9)

    def test_already_at_approach_point(self, problem, box_scenario) -> None:
        plan = contact_plan()
        theta = box_scenario.start.theta
        p_a, _, _ = robot_contact_point(problem.robot, np.append(theta, plan.phi_a0), plan.n_a)
        _, normal = eval_frame(problem.obj.outline, BOTTOM_MID)
        body = eval_point(problem.obj.outline, BOTTOM_MID) + problem.planner.margin_min * normal
        origin = p_a - body
        state = SystemState(q_u=[origin[0], origin[1], 0.0, 0.0], q_a=np.append(theta, 0.0), n_a=plan.n_a)
        waypoints = guide_contact_free(problem, state, plan)
        assert waypoints.shape == (1, 2)
        assert np.allclose(waypoints[0], p_a, atol=1e-9)

    def test_interior_start_rejected(self, problem, box_scenario) -> None:
        plan = contact_plan()
        theta = box_scenario.start.theta
        p_a, _, _ = robot_contact_point(problem.robot, np.append(theta, plan.phi_a0), plan.n_a)
        state = SystemState(q_u=[p_a[0], p_a[1], 0.3, 0.0], q_a=np.append(theta, 0.0), n_a=plan.n_a)
        with pytest.raises(InteriorStartError):
            guide_contact_free(problem, state, plan)


class TestConstantGoalGuide:
    def test_shape_and_values(self, problem, box_scenario) -> None:
        q_u = np.array([0.75, -0.35, 0.0, BOTTOM_MID])
        states, controls = constant_goal_guide(problem, q_u, box_scenario.goal)
        horizon = problem.planner.guide_horizon
        assert states.shape == (horizon + 1, 4)
        assert controls.shape == (horizon, 3)
        assert np.array_equal(states[0], q_u)
        assert np.allclose(states[1:], [0.85, -0.35, 0.0, BOTTOM_MID])
        assert not controls.any()

    def test_target_angle_aligned(self, problem) -> None:
        q_u = np.array([0.0, 0.0, 6.0, 0.2])
        states, _ = constant_goal_guide(problem, q_u, [0.0, 0.0, 0.0])
        assert states[-1, 2] == pytest.approx(2 * np.pi)


class TestGuideProgram:
    def test_template_cached(self, problem) -> None:
        assert build_guide_program(problem) is build_guide_program(problem)


@pytest.mark.slow
class TestGuideInContact:
    """Test guide_in_contact() solutions on the box."""

    @pytest.fixture
    def guide(self, problem) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        start = np.array([0.75, -0.35, 0.0, BOTTOM_MID])
        target = np.array([0.75, -0.30, 0.0])
        states, controls = guide_in_contact(problem, start, target, 'ccw')
        return start, states, controls

    def test_shapes_and_start(self, problem, guide) -> None:
        start, states, controls = guide
        horizon = problem.planner.guide_horizon
        assert states.shape == (horizon + 1, 4)
        assert controls.shape == (horizon, 3)
        assert np.allclose(states[0], start, atol=1e-6)

    def test_approaches_target(self, problem, guide) -> None:
        start, states, _ = guide
        target = np.array([0.75, -0.30, 0.0])
        weights = problem.metrics.pose_weights
        assert weighted_distance(states[-1, :3] - target, weights) < weighted_distance(start[:3] - target, weights)

    def test_controls_admissible(self, problem, guide) -> None:
        _, _, controls = guide
        mu = problem.obj.friction_mu
        for lambda_n, lambda_t, v_u in controls:
            assert min(cone_terms(lambda_n, lambda_t, mu)) >= -1e-6 * problem.impulse_scale
            assert v_u >= -1e-6
            assert v_u <= problem.planner.sliding_rate_max + 1e-6

    def test_follows_object_dynamics(self, problem, guide) -> None:
        _, states, controls = guide
        for k, u_u in enumerate(controls):
            predicted = states[k] + object_input_matrix(problem.obj, states[k]) @ u_u
            assert np.allclose(states[k + 1], predicted, atol=1e-5)

