"""Planning problem shared by the pipeline stages."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Protocol

import numpy as np

from ..models.constraint_data import ControlBounds, StateBounds
from ..models.system import ObjectModel, RobotModel, SystemState
from .nlp import Program
from .options import MetricOptions, PlannerOptions, SolverOptions


class ScenarioLike(Protocol):
    """Fields of a loaded scenario the planner reads."""

    robot: RobotModel
    obj: ObjectModel
    start: SystemState
    goal: np.ndarray
    state_bounds: StateBounds
    control_bounds: ControlBounds
    planner: PlannerOptions
    solver: SolverOptions
    metrics: MetricOptions
    seed: int


@dataclass(eq=False)
class PlanningProblem:
    """
    Models, bounds and options of one planner run, plus compiled program templates.

    Attributes:
        robot: Robot model
        obj: Object model
        state_bounds: Q_B
        control_bounds: U_B
        planner: Pipeline hyperparameters
        solver: Options of every NLP solve
        metrics: Distance and reachability parameters
        programs: Program templates keyed by stage and shape
    """

    robot: RobotModel
    obj: ObjectModel
    state_bounds: StateBounds
    control_bounds: ControlBounds
    planner: PlannerOptions = field(default_factory=PlannerOptions)
    solver: SolverOptions = field(default_factory=SolverOptions)
    metrics: MetricOptions = field(default_factory=MetricOptions)
    programs: dict[tuple[Any, ...], Program] = field(default_factory=dict)

    @classmethod
    def from_scenario(cls, scenario: ScenarioLike) -> PlanningProblem:
        return cls(
            robot=scenario.robot,
            obj=scenario.obj,
            state_bounds=scenario.state_bounds,
            control_bounds=scenario.control_bounds,
            planner=scenario.planner,
            solver=scenario.solver,
            metrics=scenario.metrics,
        )

    @property
    def n_joints(self) -> int:
        return self.robot.n_joints

    @property
    def pose_weights(self) -> np.ndarray:
        """Weights of (x_u, y_u, α_u) in tracking and improvement terms."""
        return self.metrics.pose_weights.as_array()

    @property
    def impulse_scale(self) -> float:
        return float(max(self.control_bounds.scale[0], self.control_bounds.scale[1]))

    @property
    def rate_scale(self) -> float:
        return float(self.control_bounds.scale[2])

    def control_scale(self) -> np.ndarray:
        """Per-component scale of the stacked control used inside the programs."""
        scale = self.control_bounds.scale.copy()
        scale[0] = scale[1] = self.impulse_scale
        scale[-1] = scale[2] = self.rate_scale
        return scale

    def cached(self, key: tuple[Any, ...]) -> Program | None:
        return self.programs.get(key)

    def remember(self, key: tuple[Any, ...], program: Program) -> Program:
        self.programs[key] = program
        return program
