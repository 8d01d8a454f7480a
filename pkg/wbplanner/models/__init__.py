"""Data models for the whole-body contact planner."""

from .constraint_data import ConstraintResidual, ControlBounds, HalfSpaceSet, StateBounds
from .outline import (
    InvalidPolygonError,
    NonConvexPolygonError,
    OutlinePolygon,
    ParametricOutline,
)
from .planning import (
    ContactPlan,
    GuidePair,
    PlanResult,
    PlanStats,
    PlanTree,
    StateWeights,
    TrackingOutcome,
    TreeEdge,
    TreeNode,
    WeightDimensionError,
)
from .system import (
    ControlInput,
    InvalidLinkError,
    LinkPose,
    ObjectModel,
    RobotModel,
    ScenarioValidationError,
    SystemState,
)
from .types import (
    ContactMode,
    GuideMode,
    Phase,
    Point2D,
    Pose2D,
    SlidingDirection,
    SolveStatus,
    StopReason,
    Vector2D,
)

__all__ = [
    # Outline models
    'OutlinePolygon',
    'ParametricOutline',
    'InvalidPolygonError',
    'NonConvexPolygonError',
    # System models
    'RobotModel',
    'ObjectModel',
    'SystemState',
    'ControlInput',
    'LinkPose',
    'InvalidLinkError',
    'ScenarioValidationError',
    # Constraint data
    'ConstraintResidual',
    'HalfSpaceSet',
    'StateBounds',
    'ControlBounds',
    # Planning models
    'StateWeights',
    'WeightDimensionError',
    'PlanTree',
    'TreeNode',
    'TreeEdge',
    'ContactPlan',
    'GuidePair',
    'TrackingOutcome',
    'PlanStats',
    'PlanResult',
    # Type aliases
    'Point2D',
    'Vector2D',
    'Pose2D',
    'Phase',
    'SlidingDirection',
    'SolveStatus',
    'StopReason',
    'GuideMode',
    'ContactMode',
]
