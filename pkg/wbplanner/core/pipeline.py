"""Planner loop: sample, plan contact, build guides, track, repeat."""

from __future__ import annotations

import logging
import time

import numpy as np

from ..lib.plannerUtils import stage_timer
from ..models.planning import ContactPlan, GuidePair, PlanResult, PlanStats, PlanTree, TrackingOutcome, TreeNode
from ..models.system import ScenarioValidationError
from ..models.types import SlidingDirection
from .constraints import check_state
from .contact_planning import NoContactPlanError, plan_contact, plan_random_contact
from .extraction import extract_plan, goal_distance
from .guides import InteriorStartError, NoGuideError, constant_goal_guide, guide_contact_free, guide_in_contact
from .kinematics import robot_contact_point
from .problem import PlanningProblem, ScenarioLike
from .sampling import sample_context
from .tracking import establish_contact, track_contact_free, track_in_contact

logger = logging.getLogger(__name__)


def subgoal(goal: np.ndarray, spread: tuple[float, float, float], rng: np.random.Generator) -> np.ndarray:
    """Uniform perturbation of the goal pose."""
    half_widths = np.asarray(spread, dtype=float)
    return np.asarray(goal, dtype=float)[:3] + rng.uniform(-half_widths, half_widths)


class Planner:
    """
    Tree-memory planner over one scenario.

    Each iteration alternates the sliding direction of the in-contact guide,
    and stops as soon as a node reaches the goal tolerance.
    """

    def __init__(self, scenario: ScenarioLike, seed: int | None = None) -> None:
        self.problem = PlanningProblem.from_scenario(scenario)
        self.start = scenario.start
        self.goal = np.asarray(scenario.goal, dtype=float)[:3]
        self.seed = scenario.seed if seed is None else seed
        self.rng = np.random.default_rng(self.seed)
        self.tree = PlanTree(self.start)
        self.stats = PlanStats()

    # --- bookkeeping ---

    def _goal_distance(self, node: TreeNode) -> float:
        return goal_distance(node.state, self.goal, self.problem.metrics.goal_weights)

    def _record(self, outcome: TrackingOutcome) -> bool:
        """Update stats with a tracking outcome; True when the goal was reached."""
        self.stats.count_stop(outcome.stop_reason)
        reached = False
        for node in outcome.nodes:
            distance = self._goal_distance(node)
            self.stats.best_goal_distance = min(self.stats.best_goal_distance, distance)
            reached = reached or distance <= self.problem.metrics.goal_tolerance
        return reached

    # --- stages ---

    def _contact(self, node: TreeNode, n_a: int, target: np.ndarray) -> ContactPlan | None:
        try:
            with stage_timer(self.stats.stage_times, 'contact'):
                if self.problem.planner.contact_mode == 'random':
                    return plan_random_contact(self.problem, node, n_a, self.rng)
                return plan_contact(self.problem, node, n_a, target)
        except NoContactPlanError as error:
            logger.debug("%s", error)
            self.stats.count_failure('contact')
            return None

    def _guides(
        self, node: TreeNode, plan: ContactPlan, target: np.ndarray, direction: SlidingDirection
    ) -> GuidePair | None:
        """Approach path and in-contact guide, the latter starting from the planned contact state."""
        options = self.problem.planner
        q_u = plan.contact_state(node.state.pose).q_u
        try:
            with stage_timer(self.stats.stage_times, 'guide'):
                path = guide_contact_free(self.problem, node.state, plan)
                if options.guide_mode == 'constant_goal':
                    guide, controls = constant_goal_guide(self.problem, q_u, target)
                else:
                    guide, controls = guide_in_contact(self.problem, q_u, target, direction)
        except (InteriorStartError, NoGuideError) as error:
            logger.debug("%s", error)
            self.stats.count_failure('guide')
            return None
        return GuidePair(contact_free_path=path, in_contact_guide=guide, guide_controls=controls)

    def _approach(self, node: TreeNode, plan: ContactPlan, path: np.ndarray) -> TreeNode | None:
        """
        Contact-free tracking to the approach point followed by the contact establishment step.

        A run that stalls on `step_limit` or `static` after making progress is
        resumed along a fresh approach path from its last node, at most
        `approach_replans` times.
        """
        options = self.problem.planner
        last = node
        for attempt in range(options.approach_replans + 1):
            if attempt:
                try:
                    with stage_timer(self.stats.stage_times, 'guide'):
                        path = guide_contact_free(self.problem, last.state, plan)
                except InteriorStartError as error:
                    logger.debug("%s", error)
                    break
            with stage_timer(self.stats.stage_times, 'tracking'):
                outcome = track_contact_free(self.tree, last, path, self.problem, plan)
            if self._record(outcome):
                return None
            last = outcome.last or last
            if self._at_approach_point(last, plan, path):
                break
            if outcome.stop_reason not in ('step_limit', 'static') or not outcome.nodes:
                break
            logger.debug("approach stalled on %s, re-planning from node %d", outcome.stop_reason, last.index)
        if not self._at_approach_point(last, plan, path):
            self.stats.count_failure('contact_free_tracking')
            return None
        with stage_timer(self.stats.stage_times, 'tracking'):
            contact = establish_contact(self.tree, last, plan, self.problem)
        if contact is None:
            self.stats.count_failure('establish')
        return contact

    def _at_approach_point(self, node: TreeNode, plan: ContactPlan, path: np.ndarray) -> bool:
        point, _, _ = robot_contact_point(self.problem.robot, np.append(node.state.theta, plan.phi_a0), plan.n_a)
        return bool(np.linalg.norm(point - path[-1]) <= self.problem.planner.waypoint_reached)

    def _push(self, contact: TreeNode, guide: np.ndarray) -> bool:
        options = self.problem.planner
        with stage_timer(self.stats.stage_times, 'tracking'):
            outcome = track_in_contact(
                self.tree, contact, guide, self.problem, robot_sliding=options.contact_mode != 'random'
            )
        if not outcome.nodes:
            self.stats.count_failure('in_contact_tracking')
        return self._record(outcome)

    def iterate(self, iteration: int) -> bool:
        """Run one pipeline iteration; True when a node reached the goal."""
        options = self.problem.planner
        direction: SlidingDirection = 'cw' if iteration % 2 == 0 else 'ccw'
        target = subgoal(self.goal, options.subgoal_spread, self.rng) if options.subgoal_random else self.goal
        with stage_timer(self.stats.stage_times, 'sampling'):
            node, n_a = sample_context(self.tree, target, self.rng, self.problem)
        logger.debug("iteration %d: node %d, link %d, %s", iteration, node.index, n_a, direction)
        plan = self._contact(node, n_a, target)
        if plan is None:
            return False
        guides = self._guides(node, plan, target, direction)
        if guides is None:
            return False
        before = len(self.tree)
        contact = self._approach(node, plan, guides.contact_free_path)
        if contact is None:
            return any(self._goal_distance(n) <= self.problem.metrics.goal_tolerance for n in self.tree.nodes[before:])
        return self._push(contact, guides.in_contact_guide)

    def run(self) -> PlanResult:
        """Iterate until the goal is reached or a budget runs out."""
        options = self.problem.planner
        metrics = self.problem.metrics
        self.stats.best_goal_distance = self._goal_distance(self.tree.root)
        reached = self.stats.best_goal_distance <= metrics.goal_tolerance
        started = time.perf_counter()
        while not reached and self.stats.iterations < options.max_iterations:
            if time.perf_counter() - started > options.time_budget:
                logger.info("time budget of %.0fs exhausted", options.time_budget)
                break
            reached = self.iterate(self.stats.iterations)
            self.stats.iterations += 1
        self.stats.node_count = len(self.tree)
        logger.info(
            "%s after %d iterations, %d nodes, best goal distance %.4g",
            'goal reached' if reached else 'goal not reached',
            self.stats.iterations, self.stats.node_count, self.stats.best_goal_distance,
        )
        if not reached:
            return PlanResult(success=False, stats=self.stats, tree=self.tree)
        with stage_timer(self.stats.stage_times, 'extraction'):
            result = extract_plan(
                self.tree, self.goal, metrics.goal_weights, metrics.goal_tolerance,
                metrics.extraction_weights, options.switching_penalty,
            )
        result.stats = self.stats
        return result


def plan(scenario: ScenarioLike, rng_seed: int | None = None) -> PlanResult:
    """
    Plan a whole-body pushing motion from the scenario start to its goal.

    Args:
        scenario: Loaded scenario
        rng_seed: Overrides the scenario seed

    Returns:
        PlanResult; success is False when the budgets run out first

    Raises:
        ScenarioValidationError: If the start state fails the exact checks
    """
    passed, reason = check_state(
        scenario.robot, scenario.obj, scenario.start, scenario.state_bounds, contact=False,
        sample_count=scenario.planner.link_sample_count,
    )
    if not passed:
        raise ScenarioValidationError([f"start: {reason}"])
    return Planner(scenario, rng_seed).run()
