"""
Tests for plan extraction: edge costs, Dijkstra and goal node selection.

Run with: pytest tests/ -v
"""
from __future__ import annotations

import numpy as np
import pytest

from helpers import path_costs_by_enumeration, pose_state, zero_control
from core.extraction import (
    GoalNotReachedError,
    extract_plan,
    goal_distance,
    shortest_paths,
    state_difference,
)
from models.planning import PlanTree, StateWeights
from models.system import SystemState

EXTRACTION_WEIGHTS = StateWeights((10.0, 10.0, 3.0, 0.0, 0.5, 0.5, 0.5, 0.0))
UNIT_WEIGHTS = StateWeights((1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0))
POSE_WEIGHTS = StateWeights((1.0, 1.0, 1.0))


def with_joints(x: float, y: float, theta: list[float]) -> SystemState:
    return SystemState(q_u=[x, y, 0.0, 0.0], q_a=[*theta, 0.0], n_a=1)


@pytest.fixture
def switching_tree() -> PlanTree:
    """Two routes to (0.2, 0, 0): a cheap one with a phase change and a direct one."""
    tree = PlanTree(pose_state(0.0, 0.0, 0.0))
    tree.add_child(0, pose_state(0.1, 0.0, 0.0), zero_control(), 'contact-free')
    tree.add_child(1, pose_state(0.2, 0.0, 0.0), zero_control(), 'in-contact')
    tree.add_child(0, pose_state(0.2, 0.0, 0.0), zero_control(), 'in-contact')
    return tree


class TestStateDifference:
    def test_contact_parameters_wrapped(self) -> None:
        first = SystemState(q_u=[0.0, 0.0, 0.0, 0.95], q_a=[0.0, 0.0, 0.0, 0.9], n_a=1)
        second = SystemState(q_u=[0.0, 0.0, 0.0, 0.05], q_a=[0.0, 0.0, 0.0, 0.1], n_a=1)
        delta = state_difference(first, second)
        assert delta[3] == pytest.approx(0.1)
        assert delta[-1] == pytest.approx(0.2)

    def test_goal_distance_uses_pose_only(self) -> None:
        state = with_joints(0.3, 0.4, [1.0, 2.0, 3.0])
        assert goal_distance(state, np.zeros(3), EXTRACTION_WEIGHTS) == pytest.approx(25.0)


class TestShortestPaths:
    """Test shortest_paths() costs."""

    def test_switching_penalty_added(self, switching_tree: PlanTree) -> None:
        costs = shortest_paths(switching_tree, EXTRACTION_WEIGHTS, 0.05)
        assert costs[0] == 0.0
        assert costs[1] == pytest.approx(1.0)
        assert costs[2] == pytest.approx(2.05)
        # the first edge out of the root never pays the penalty
        assert costs[3] == pytest.approx(4.0)

    def test_matches_path_enumeration(self) -> None:
        rng = np.random.default_rng(41)
        tree = PlanTree(pose_state(0.0, 0.0, 0.0))
        for _ in range(49):
            parent = int(rng.integers(0, len(tree)))
            state = tree[parent].state
            q_u = state.q_u + np.append(rng.normal(0.0, 0.05, size=3), rng.uniform(0.0, 1.0))
            q_a = state.q_a + np.append(rng.normal(0.0, 0.1, size=3), rng.uniform(0.0, 1.0))
            phase = 'contact-free' if rng.random() < 0.5 else 'in-contact'
            tree.add_child(parent, SystemState(q_u=q_u, q_a=q_a, n_a=1), zero_control(), phase)
        costs = shortest_paths(tree, EXTRACTION_WEIGHTS, 0.05)
        expected = path_costs_by_enumeration(tree, EXTRACTION_WEIGHTS, 0.05)
        assert set(costs) == set(expected)
        for index, cost in expected.items():
            assert costs[index] == pytest.approx(cost, abs=1e-12)

    def test_wrapped_parameters_match_enumeration(self) -> None:
        weights = StateWeights((1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0))
        tree = PlanTree(SystemState(q_u=[0.0, 0.0, 3.1, 0.95], q_a=[0.0, 0.0, 0.0, 0.9], n_a=1))
        tree.add_child(0, SystemState(q_u=[0.0, 0.0, -3.1, 0.05], q_a=[0.0, 0.0, 0.0, 0.1], n_a=1),
                       zero_control(), 'in-contact')
        tree.add_child(1, SystemState(q_u=[0.1, 0.0, -3.1, 0.05], q_a=[0.0, 0.0, 0.0, 0.1], n_a=1),
                       zero_control(), 'contact-free')
        first = 0.1 ** 2 + 0.2 ** 2 + (2 * np.pi - 6.2) ** 2
        expected = path_costs_by_enumeration(tree, weights, 0.05)
        assert expected[1] == pytest.approx(first)
        assert expected[2] == pytest.approx(first + 0.01 + 0.05)
        costs = shortest_paths(tree, weights, 0.05)
        for index, cost in expected.items():
            assert costs[index] == pytest.approx(cost, abs=1e-12)


class TestExtractPlan:
    """Test extract_plan() goal selection and tie-breaking."""

    def test_cheap_route_despite_penalty(self, switching_tree: PlanTree) -> None:
        result = extract_plan(switching_tree, [0.2, 0.0, 0.0], POSE_WEIGHTS, 1e-9, EXTRACTION_WEIGHTS, 0.05)
        assert result.success
        assert result.node_indices == [0, 1, 2]
        assert result.phases == ['contact-free', 'in-contact']
        assert result.cost == pytest.approx(2.05)
        assert len(result.controls) == len(result.states) - 1

    def test_large_penalty_prefers_direct_route(self, switching_tree: PlanTree) -> None:
        result = extract_plan(switching_tree, [0.2, 0.0, 0.0], POSE_WEIGHTS, 1e-9, EXTRACTION_WEIGHTS, 3.0)
        assert result.node_indices == [0, 3]
        assert result.cost == pytest.approx(4.0)

    def test_equal_cost_prefers_fewer_edges(self) -> None:
        tree = PlanTree(with_joints(0.0, 0.0, [0.0, 0.0, 0.0]))
        tree.add_child(0, with_joints(0.0, 0.0, [0.5, 0.0, 0.0]), zero_control(), 'contact-free')
        tree.add_child(1, with_joints(1.0, 0.0, [0.5, 0.0, 0.0]), zero_control(), 'contact-free')
        tree.add_child(0, with_joints(1.0, 0.0, [0.5, 0.0, 0.0]), zero_control(), 'contact-free')
        result = extract_plan(tree, [1.0, 0.0, 0.0], POSE_WEIGHTS, 1e-9, UNIT_WEIGHTS, 0.0)
        assert result.cost == pytest.approx(1.25)
        assert result.node_indices == [0, 3]

    def test_duplicates_prefer_earliest_node(self) -> None:
        tree = PlanTree(pose_state(0.0, 0.0, 0.0))
        tree.add_child(0, pose_state(0.1, 0.0, 0.0), zero_control(), 'contact-free')
        tree.add_child(0, pose_state(0.1, 0.0, 0.0), zero_control(), 'contact-free')
        result = extract_plan(tree, [0.1, 0.0, 0.0], POSE_WEIGHTS, 1e-9, EXTRACTION_WEIGHTS, 0.05)
        assert result.node_indices == [0, 1]

    def test_root_within_tolerance(self) -> None:
        tree = PlanTree(pose_state(0.2, 0.0, 0.0))
        result = extract_plan(tree, [0.2, 0.0, 0.0], POSE_WEIGHTS, 1e-9, EXTRACTION_WEIGHTS, 0.05)
        assert result.node_indices == [0]
        assert result.controls == []
        assert result.cost == 0.0

    def test_goal_not_reached(self, switching_tree: PlanTree) -> None:
        with pytest.raises(GoalNotReachedError, match="goal tolerance"):
            extract_plan(switching_tree, [1.0, 1.0, 0.0], POSE_WEIGHTS, 1e-3, EXTRACTION_WEIGHTS, 0.05)

    def test_add_child_rejects_unknown_parent(self, switching_tree: PlanTree) -> None:
        with pytest.raises(IndexError):
            switching_tree.add_child(9, pose_state(0.0, 0.0, 0.0), zero_control(), 'contact-free')
