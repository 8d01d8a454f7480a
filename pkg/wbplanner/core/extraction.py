"""Plan extraction from the tree memory with Dijkstra's algorithm."""

from __future__ import annotations

import heapq

import numpy as np

from ..models.planning import PlanResult, PlanTree, StateWeights, TreeNode
from ..models.system import SystemState
from .metrics import parameter_difference, weighted_distance


class GoalNotReachedError(RuntimeError):
    """Raised when no tree node lies within the goal tolerance."""

    pass


def goal_distance(state: SystemState, goal: np.ndarray, weights: StateWeights) -> float:
    """Weighted distance from a state's object pose to the goal pose."""
    return weighted_distance(state.pose - np.asarray(goal, dtype=float)[:3], weights.truncated(3))


def state_difference(first: SystemState, second: SystemState) -> np.ndarray:
    """second − first with both contact parameters wrapped to [−0.5, 0.5)."""
    delta = second.vector() - first.vector()
    delta[3] = parameter_difference(second.phi_u, first.phi_u)
    delta[-1] = parameter_difference(second.phi_a, first.phi_a)
    return delta


def edge_cost(tree: PlanTree, child: TreeNode, weights: StateWeights, switching_penalty: float) -> float:
    """Weighted state change along the edge into child, plus the penalty for a phase change."""
    assert child.edge is not None
    parent = tree[child.edge.parent]
    cost = weighted_distance(state_difference(parent.state, child.state), weights)
    if parent.edge is not None and parent.edge.phase != child.edge.phase:
        cost += switching_penalty
    return cost


def shortest_paths(tree: PlanTree, weights: StateWeights, switching_penalty: float) -> dict[int, float]:
    """Dijkstra costs from the root to every node."""
    costs: dict[int, float] = {0: 0.0}
    queue: list[tuple[float, int, int]] = [(0.0, 0, 0)]
    settled: set[int] = set()
    while queue:
        cost, _, index = heapq.heappop(queue)
        if index in settled:
            continue
        settled.add(index)
        for child_index in tree.children(index):
            child = tree[child_index]
            candidate = cost + edge_cost(tree, child, weights, switching_penalty)
            if candidate < costs.get(child_index, float('inf')):
                costs[child_index] = candidate
                heapq.heappush(queue, (candidate, child.depth, child_index))
    return costs


def extract_plan(
    tree: PlanTree,
    goal: np.ndarray,
    goal_weights: StateWeights,
    goal_tolerance: float,
    weights: StateWeights,
    switching_penalty: float,
) -> PlanResult:
    """
    Cheapest root-to-goal path of the tree.

    Among nodes within goal_tolerance the lowest path cost wins, then the
    fewest edges, then the earliest created node.

    Raises:
        GoalNotReachedError: If no node is within tolerance
    """
    goal_nodes = [node for node in tree if goal_distance(node.state, goal, goal_weights) <= goal_tolerance]
    if not goal_nodes:
        raise GoalNotReachedError("no tree node reaches the goal tolerance")
    costs = shortest_paths(tree, weights, switching_penalty)
    best = min(goal_nodes, key=lambda node: (costs[node.index], node.depth, node.index))
    path = tree.path_to(best.index)
    controls = []
    phases = []
    for node in path[1:]:
        assert node.edge is not None
        controls.append(node.edge.control)
        phases.append(node.edge.phase)
    return PlanResult(
        success=True,
        states=[node.state for node in path],
        controls=controls,
        phases=phases,
        node_indices=[node.index for node in path],
        cost=costs[best.index],
        tree=tree,
    )
