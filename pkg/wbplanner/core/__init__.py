"""Core computation: outlines, kinematics, constraints, optimization and the planner."""

from .constraints import (
    check_state,
    collision_clearance,
    contact_modes,
    control_bounds,
    default_control_bounds,
    default_state_bounds,
    friction_cone,
    in_contact,
    self_collision,
    state_bounds,
    world_half_spaces,
)
from .contact_planning import NoContactPlanError, plan_contact, plan_random_contact
from .extraction import GoalNotReachedError, extract_plan
from .guides import InteriorStartError, NoGuideError, guide_contact_free, guide_in_contact
from .kinematics import (
    forward_kinematics,
    object_contact_point,
    object_input_matrix,
    robot_contact_point,
    robot_input_matrices,
    step,
)
from .metrics import SingularReachabilityError, reachability, weighted_distance
from .nlp import Program, ProgramAssemblyError, SolveReport, relax_and_resolve, solve
from .options import MetricOptions, PlannerOptions, SolverOptions
from .outline import SingularFrameError, arc_distance, eval_frame, eval_point, fit_outline
from .pipeline import Planner, plan
from .polygons import ResamplingError, resample_polygon
from .problem import PlanningProblem, ScenarioLike
from .sampling import sample_context
from .tracking import establish_contact, track_contact_free, track_in_contact

__all__ = [
    # Outline
    'fit_outline',
    'eval_point',
    'eval_frame',
    'arc_distance',
    'resample_polygon',
    'SingularFrameError',
    'ResamplingError',
    # Model
    'forward_kinematics',
    'object_contact_point',
    'robot_contact_point',
    'object_input_matrix',
    'robot_input_matrices',
    'step',
    # Constraints
    'friction_cone',
    'contact_modes',
    'in_contact',
    'collision_clearance',
    'world_half_spaces',
    'state_bounds',
    'control_bounds',
    'default_state_bounds',
    'default_control_bounds',
    'self_collision',
    'check_state',
    # Metrics
    'weighted_distance',
    'reachability',
    'SingularReachabilityError',
    # Optimization
    'Program',
    'SolveReport',
    'solve',
    'relax_and_resolve',
    'ProgramAssemblyError',
    # Options
    'SolverOptions',
    'MetricOptions',
    'PlannerOptions',
    # Planner
    'PlanningProblem',
    'ScenarioLike',
    'sample_context',
    'plan_contact',
    'plan_random_contact',
    'guide_contact_free',
    'guide_in_contact',
    'track_contact_free',
    'establish_contact',
    'track_in_contact',
    'extract_plan',
    'Planner',
    'plan',
    'NoContactPlanError',
    'NoGuideError',
    'InteriorStartError',
    'GoalNotReachedError',
]
