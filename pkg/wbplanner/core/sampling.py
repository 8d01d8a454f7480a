"""Context sampling: which tree node to extend and which link to push with."""

from __future__ import annotations

import logging

import numpy as np

from ..models.outline import ParametricOutline
from ..models.planning import PlanTree, TreeNode
from ..models.system import SystemState
from .kinematics import link_sample_points, rotation
from .metrics import SingularReachabilityError, reachability
from .outline import SingularFrameError
from .problem import PlanningProblem

logger = logging.getLogger(__name__)


def object_centroid(outline: ParametricOutline, q_u: np.ndarray) -> np.ndarray:
    """World position of the object vertex mean."""
    q_u = np.asarray(q_u, dtype=float)
    return rotation(q_u[2]) @ outline.centroid + q_u[:2]


def node_weights(problem: PlanningProblem, tree: PlanTree, goal: np.ndarray) -> np.ndarray:
    """
    Reachability of the goal pose from each node, keeping the node's φ_u.

    Nodes whose B_u is singular get weight 0.
    """
    goal = np.asarray(goal, dtype=float)[:3]
    weights = np.zeros(len(tree))
    for node in tree:
        target = np.append(goal, node.state.phi_u)
        try:
            weights[node.index] = reachability(
                problem.obj, node.state.q_u, target,
                problem.metrics.gamma_0, problem.obj.friction_mu, problem.control_bounds,
            )
        except (SingularReachabilityError, SingularFrameError):
            weights[node.index] = 0.0
    return weights


def link_weights(problem: PlanningProblem, state: SystemState) -> np.ndarray:
    """exp(−d_i/ℓ) with d_i the distance from link i to the object centroid."""
    centroid = object_centroid(problem.obj.outline, state.q_u)
    distances = np.array([
        np.min(np.linalg.norm(
            link_sample_points(problem.robot, state.q_a, link, problem.planner.link_sample_count) - centroid, axis=1
        ))
        for link in range(1, problem.n_joints + 1)
    ])
    return np.exp(-distances / problem.planner.link_length_scale)


def _normalized(weights: np.ndarray) -> np.ndarray:
    total = float(np.sum(weights))
    if not np.isfinite(total) or total <= 0.0:
        return np.full(weights.shape[0], 1.0 / weights.shape[0])
    return weights / total


def sample_context(
    tree: PlanTree,
    goal: np.ndarray,
    rng: np.random.Generator,
    problem: PlanningProblem,
) -> tuple[TreeNode, int]:
    """
    Draw a node with probability proportional to its goal reachability and a
    link with probability proportional to its proximity weight.

    Falls back to uniform node selection when every reachability is zero.

    Returns:
        (node, n_a) with n_a 1-based
    """
    node_probabilities = _normalized(node_weights(problem, tree, goal))
    node = tree[int(rng.choice(len(tree), p=node_probabilities))]
    link_probabilities = _normalized(link_weights(problem, node.state))
    n_a = int(rng.choice(problem.n_joints, p=link_probabilities)) + 1
    logger.debug("sampled node %d (p=%.3f), link %d", node.index, node_probabilities[node.index], n_a)
    return node, n_a
