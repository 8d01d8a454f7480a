"""Solver, metric and planner options with their JSON shapes."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, TypedDict, get_args

from ..models.planning import StateWeights
from ..models.types import ContactMode, GuideMode
from . import tolerances as tol


class SolverOptionsDict(TypedDict, total=False):
    """Type definition for SolverOptions serialization."""

    max_iter: int
    feas_tol: float
    opt_tol: float
    time_budget: float


class MetricOptionsDict(TypedDict, total=False):
    """Type definition for MetricOptions serialization."""

    gamma_0: float
    goal_tolerance: float
    goal_weights: list[float]
    extraction_weights: list[float]


def fill_default(data: dict[str, Any], key: str, default: Any, section: str, report: list[str] | None) -> Any:
    """Read key from data, recording the default in the report when it is absent."""
    if key in data and data[key] is not None:
        return data[key]
    if report is not None:
        report.append(f"{section}.{key} defaulted to {default!r}")
    return default


@dataclass(frozen=True, slots=True)
class SolverOptions:
    """
    Options of every NLP solve.

    Attributes:
        max_iter: Interior point iteration cap
        feas_tol: Constraint violation tolerance
        opt_tol: Stationarity tolerance
        time_budget: Wall time cap per solve (s)
    """

    max_iter: int = tol.SOLVER_MAX_ITER
    feas_tol: float = tol.SOLVER_FEAS_TOL
    opt_tol: float = tol.SOLVER_OPT_TOL
    time_budget: float = tol.SOLVER_TIME_BUDGET

    def __post_init__(self) -> None:
        if self.max_iter < 0:
            raise ValueError(f"max_iter cannot be negative, got {self.max_iter}")
        if not self.feas_tol > 0 or not self.opt_tol > 0:
            raise ValueError("solver tolerances must be positive")
        if not self.time_budget > 0:
            raise ValueError(f"time_budget must be positive, got {self.time_budget}")

    def to_dict(self) -> SolverOptionsDict:
        return SolverOptionsDict(**asdict(self))  # type: ignore[typeddict-item]

    @classmethod
    def from_dict(cls, data: SolverOptionsDict | None, report: list[str] | None = None) -> SolverOptions:
        data = dict(data or {})
        defaults = cls()
        return cls(
            max_iter=int(fill_default(data, 'max_iter', defaults.max_iter, 'solver', report)),
            feas_tol=float(fill_default(data, 'feas_tol', defaults.feas_tol, 'solver', report)),
            opt_tol=float(fill_default(data, 'opt_tol', defaults.opt_tol, 'solver', report)),
            time_budget=float(fill_default(data, 'time_budget', defaults.time_budget, 'solver', report)),
        )


@dataclass(frozen=True, slots=True)
class MetricOptions:
    """
    Distance and reachability parameters.

    Attributes:
        gamma_0: Out-of-cone reachability penalty
        goal_tolerance: Weighted distance counted as reaching the goal
        goal_weights: Full-state weights of the goal test
        extraction_weights: Full-state weights of plan extraction edge costs
    """

    gamma_0: float = tol.GAMMA_0
    goal_tolerance: float = tol.GOAL_TOLERANCE
    goal_weights: StateWeights = field(default_factory=lambda: StateWeights(tol.GOAL_WEIGHTS))
    extraction_weights: StateWeights = field(default_factory=lambda: StateWeights(tol.EXTRACTION_WEIGHTS))

    def __post_init__(self) -> None:
        if not self.gamma_0 > 0:
            raise ValueError(f"gamma_0 must be positive, got {self.gamma_0}")
        if not self.goal_tolerance > 0:
            raise ValueError(f"goal_tolerance must be positive, got {self.goal_tolerance}")

    @property
    def pose_weights(self) -> StateWeights:
        """Goal weights restricted to (x_u, y_u, α_u)."""
        return self.goal_weights.truncated(3)

    def to_dict(self) -> MetricOptionsDict:
        return MetricOptionsDict(
            gamma_0=self.gamma_0,
            goal_tolerance=self.goal_tolerance,
            goal_weights=list(self.goal_weights.diagonal),
            extraction_weights=list(self.extraction_weights.diagonal),
        )

    @classmethod
    def from_dict(cls, data: MetricOptionsDict | None, report: list[str] | None = None) -> MetricOptions:
        data = dict(data or {})
        return cls(
            gamma_0=float(fill_default(data, 'gamma_0', tol.GAMMA_0, 'metrics', report)),
            goal_tolerance=float(fill_default(data, 'goal_tolerance', tol.GOAL_TOLERANCE, 'metrics', report)),
            goal_weights=StateWeights(tuple(
                float(w) for w in fill_default(data, 'goal_weights', list(tol.GOAL_WEIGHTS), 'metrics', report)
            )),
            extraction_weights=StateWeights(tuple(
                float(w) for w in fill_default(data, 'extraction_weights', list(tol.EXTRACTION_WEIGHTS), 'metrics', report)
            )),
        )


@dataclass(frozen=True, slots=True)
class PlannerOptions:
    """
    Pipeline hyperparameters.

    Attributes:
        contact_horizon: N_c, preview steps of contact planning
        guide_horizon: N_l, steps of the in-contact guide
        tracking_lookahead: N_s, guide points in each tracking objective
        control_knots: Condensed control knots of contact planning
        lookahead_decay: Geometric weight decay over the lookahead
        link_length_scale: ℓ of the link sampling weights (m)
        margin_max: D_c far from the approach point (m)
        margin_min: D_c at the approach point (m)
        margin_taper_fraction: Final share of the approach path over which D_c tapers
        waypoint_spacing: Spacing of contact-free waypoints (m)
        waypoint_reached: Distance at which a waypoint counts as reached (m)
        switching_penalty: Extraction cost per phase change
        max_iterations: Pipeline iteration budget
        time_budget: Wall time budget (s)
        static_control_tol: Scaled ‖u‖∞ treated as a static solution
        max_tracking_steps: Step cap of a single tracking run
        approach_replans: Approach paths re-planned from the last node after a stalled run
        sliding_rate_max: |v_u|, |v_a| bound while in contact
        smoothing_beta: Log-sum-exp temperature in NLP collision constraints (1/m)
        collision_margin: Contact-free clearance margin in NLPs (m)
        link_sample_count: Outline points per link for collision constraints
        complementarity_schedule: δ_cc values over solver restarts
        subgoal_random: Replace the goal by a random perturbation each iteration
        subgoal_spread: Half-widths of the subgoal perturbation (m, m, rad)
        guide_mode: 'long_horizon' or 'constant_goal'
        contact_mode: 'optimized' or 'random'
    """

    contact_horizon: int = tol.CONTACT_HORIZON
    guide_horizon: int = tol.GUIDE_HORIZON
    tracking_lookahead: int = tol.TRACKING_LOOKAHEAD
    control_knots: int = tol.CONTROL_KNOTS
    lookahead_decay: float = tol.LOOKAHEAD_DECAY
    link_length_scale: float = tol.LINK_LENGTH_SCALE
    margin_max: float = tol.MARGIN_MAX
    margin_min: float = tol.MARGIN_MIN
    margin_taper_fraction: float = tol.MARGIN_TAPER_FRACTION
    waypoint_spacing: float = tol.WAYPOINT_SPACING
    waypoint_reached: float = tol.WAYPOINT_REACHED
    switching_penalty: float = tol.SWITCHING_PENALTY
    max_iterations: int = tol.MAX_ITERATIONS
    time_budget: float = tol.TIME_BUDGET
    static_control_tol: float = tol.STATIC_CONTROL_TOL
    max_tracking_steps: int = tol.MAX_TRACKING_STEPS
    approach_replans: int = tol.APPROACH_REPLANS
    sliding_rate_max: float = tol.SLIDING_RATE_MAX
    smoothing_beta: float = tol.NLP_SMOOTHING_BETA
    collision_margin: float = tol.COLLISION_MARGIN
    link_sample_count: int = tol.LINK_SAMPLE_COUNT
    complementarity_schedule: tuple[float, ...] = tol.COMPLEMENTARITY_SCHEDULE
    subgoal_random: bool = False
    subgoal_spread: tuple[float, float, float] = tol.SUBGOAL_SPREAD
    guide_mode: GuideMode = "long_horizon"
    contact_mode: ContactMode = "optimized"

    def __post_init__(self) -> None:
        validate_planner_values(self)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data['complementarity_schedule'] = list(self.complementarity_schedule)
        data['subgoal_spread'] = list(self.subgoal_spread)
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any] | None, report: list[str] | None = None) -> PlannerOptions:
        data = dict(data or {})
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown planner options: {', '.join(sorted(unknown))}")
        defaults = cls()
        values: dict[str, Any] = {}
        for name in cls.__dataclass_fields__:
            value = fill_default(data, name, getattr(defaults, name), 'planner', report)
            if name in ('complementarity_schedule', 'subgoal_spread'):
                value = tuple(float(v) for v in value)
            values[name] = value
        return cls(**values)


def validate_planner_values(options: PlannerOptions) -> None:
    """Validate planner hyperparameters.

    Raises:
        ValueError: If any value violates its constraint
    """
    if not 1 <= options.contact_horizon <= 10:
        raise ValueError(f"contact_horizon must be in [1, 10], got {options.contact_horizon}")
    if options.guide_horizon < 1:
        raise ValueError(f"guide_horizon must be positive, got {options.guide_horizon}")
    if options.tracking_lookahead < 1:
        raise ValueError(f"tracking_lookahead must be positive, got {options.tracking_lookahead}")
    if not 2 <= options.control_knots <= options.contact_horizon + 1:
        raise ValueError(f"control_knots must be in [2, contact_horizon + 1], got {options.control_knots}")
    if not 0 < options.margin_min <= options.margin_max:
        raise ValueError("margins must satisfy 0 < margin_min <= margin_max")
    if not 0 <= options.margin_taper_fraction <= 1:
        raise ValueError("margin_taper_fraction must be in [0, 1]")
    if options.max_iterations < 0:
        raise ValueError(f"max_iterations cannot be negative, got {options.max_iterations}")
    if not options.time_budget > 0:
        raise ValueError(f"time_budget must be positive, got {options.time_budget}")
    if options.max_tracking_steps < 1:
        raise ValueError(f"max_tracking_steps must be positive, got {options.max_tracking_steps}")
    if options.approach_replans < 0:
        raise ValueError(f"approach_replans cannot be negative, got {options.approach_replans}")
    if options.link_sample_count < 3:
        raise ValueError("link_sample_count must be at least 3")
    if not options.complementarity_schedule:
        raise ValueError("complementarity_schedule cannot be empty")
    if options.guide_mode not in get_args(GuideMode):
        raise ValueError(f"unknown guide_mode {options.guide_mode!r}")
    if options.contact_mode not in get_args(ContactMode):
        raise ValueError(f"unknown contact_mode {options.contact_mode!r}")
    if any(spread < 0 for spread in options.subgoal_spread):
        raise ValueError("subgoal_spread entries cannot be negative")

