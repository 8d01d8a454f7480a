"""Scenario files: JSON loading, default filling and validation."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, TypedDict

import numpy as np

from ..core import tolerances as tol
from ..core.constraints import check_state, default_control_bounds, default_state_bounds
from ..core.options import MetricOptions, PlannerOptions, SolverOptions, fill_default
from ..core.outline import fit_outline, sample_points
from ..core.polygons import box_vertices, capsule_vertices, circle_vertices, convex_faces, resample_polygon
from ..models.constraint_data import ControlBounds, StateBounds
from ..models.outline import InvalidPolygonError, OutlinePolygon, ParametricOutline
from ..models.system import ObjectModel, RobotModel, ScenarioValidationError, SystemState

logger = logging.getLogger(__name__)


class ScenarioLoadError(IOError):
    """Raised when a scenario file cannot be read or parsed."""

    pass


class OutlineDict(TypedDict, total=False):
    """Type definition for an outline entry: explicit vertices or one shape primitive."""

    vertices: list[list[float]]
    box: dict[str, float]
    circle: dict[str, float]
    capsule: dict[str, float]
    spacing: float
    sigma: float
    normalized: bool


class RobotDict(TypedDict, total=False):
    """Type definition for the robot section."""

    link_lengths: list[float]
    links: list[OutlineDict]
    base_pose: list[float]
    joint_limits: list[list[float]]
    torque_limits: list[float]
    epsilon: float
    dt: float


class ObjectDict(TypedDict, total=False):
    """Type definition for the object section."""

    outline: OutlineDict
    faces: list[list[list[float]]]
    friction_mu: float
    limit_surface_coeff: float


class StartDict(TypedDict):
    """Type definition for the start state."""

    q_u: list[float]
    q_a: list[float]
    n_a: int


@dataclass(eq=False)
class Scenario:
    """
    A validated planning scenario.

    Attributes:
        name: Scenario label
        robot: Robot model
        obj: Object model
        start: q^init
        goal: Object goal pose (x_u, y_u, α_u)
        state_bounds: Q_B
        control_bounds: U_B
        planner: Pipeline hyperparameters
        solver: NLP solver options
        metrics: Distance and reachability parameters
        seed: Random seed
        report: Defaults filled while loading
        source: File the scenario was read from
    """

    name: str
    robot: RobotModel
    obj: ObjectModel
    start: SystemState
    goal: np.ndarray
    state_bounds: StateBounds
    control_bounds: ControlBounds
    planner: PlannerOptions = field(default_factory=PlannerOptions)
    solver: SolverOptions = field(default_factory=SolverOptions)
    metrics: MetricOptions = field(default_factory=MetricOptions)
    seed: int = tol.DEFAULT_SEED
    report: list[str] = field(default_factory=list)
    source: Path | None = None

    def with_overrides(self, seed: int | None = None, **planner_values: Any) -> Scenario:
        """Copy with the seed and planner options replaced; None values are ignored."""
        values = {key: value for key, value in planner_values.items() if value is not None}
        return replace(
            self,
            seed=self.seed if seed is None else int(seed),
            planner=replace(self.planner, **values) if values else self.planner,
        )


def _vector(values: Any, label: str, size: int | None = None) -> np.ndarray:
    """Float vector from JSON; null entries become infinities of the sign given by the label."""
    if not isinstance(values, list):
        raise ValueError(f"{label} must be a list")
    fill = -math.inf if label.endswith('lower') else math.inf
    array = np.array([fill if value is None else float(value) for value in values], dtype=float)
    if size is not None and array.shape[0] != size:
        raise ValueError(f"{label} must have {size} entries, got {array.shape[0]}")
    return array


def outline_vertices(entry: OutlineDict, label: str, report: list[str]) -> np.ndarray:
    """
    Vertices of an outline entry.

    Shape primitives are generated at the entry's spacing; explicit vertices
    are resampled only when a spacing is given.

    Raises:
        ValueError: If the entry names no or several shapes
        InvalidPolygonError: If the polygon is invalid
    """
    shapes = [key for key in ('vertices', 'box', 'circle', 'capsule') if key in entry]
    if len(shapes) != 1:
        raise ValueError(f"{label} needs exactly one of vertices, box, circle or capsule")
    shape = shapes[0]
    if shape == 'vertices':
        vertices = np.asarray(entry['vertices'], dtype=float)
        if entry.get('spacing') is not None:
            vertices = resample_polygon(vertices, float(entry['spacing']))
        return vertices
    spacing = float(fill_default(dict(entry), 'spacing', tol.OUTLINE_SPACING, label, report))
    params = dict(entry[shape])  # type: ignore[literal-required]
    if shape == 'box':
        return box_vertices(float(params['width']), float(params['height']), spacing)
    if shape == 'circle':
        return circle_vertices(float(params['radius']), spacing)
    return capsule_vertices(float(params['start_x']), float(params['end_x']), float(params['radius']), spacing)


def parse_outline(entry: OutlineDict, label: str, report: list[str]) -> ParametricOutline:
    vertices = outline_vertices(entry, label, report)
    sigma = entry.get('sigma')
    return fit_outline(
        OutlinePolygon(tuple((float(x), float(y)) for x, y in vertices)),
        sigma_override=None if sigma is None else float(sigma),
        normalized=bool(entry.get('normalized', True)),
    )


def parse_robot(data: RobotDict, report: list[str]) -> RobotModel:
    lengths = tuple(float(length) for length in data['link_lengths'])
    links = data['links']
    if len(links) != len(lengths):
        raise ValueError(f"robot.links needs {len(lengths)} outlines, got {len(links)}")
    outlines = tuple(parse_outline(link, f"robot.links[{i}]", report) for i, link in enumerate(links))
    base = tuple(float(v) for v in fill_default(dict(data), 'base_pose', [0.0, 0.0, 0.0], 'robot', report))
    if len(base) != 3:
        raise ValueError("robot.base_pose must be (x, y, angle)")
    return RobotModel(
        link_lengths=lengths,
        link_outlines=outlines,
        base_pose=(base[0], base[1], base[2]),
        joint_limits=tuple((float(low), float(high)) for low, high in data['joint_limits']),
        torque_limits=tuple(float(limit) for limit in data['torque_limits']),
        epsilon=float(fill_default(dict(data), 'epsilon', tol.DEFAULT_EPSILON, 'robot', report)),
        dt=float(fill_default(dict(data), 'dt', tol.DEFAULT_DT, 'robot', report)),
    )


def parse_object(data: ObjectDict, report: list[str]) -> ObjectModel:
    """
    Object model from its section.

    Without an explicit face list the half-spaces are the edges of the
    polygon p(n/N_p) of the fitted outline.
    """
    outline = parse_outline(data['outline'], 'object.outline', report)
    if data.get('faces'):
        faces = tuple(
            ((float(origin[0]), float(origin[1])), (float(normal[0]), float(normal[1])))
            for origin, normal in data['faces']
        )
    else:
        faces = convex_faces(sample_points(outline, outline.nodes))
    default_k = tol.LIMIT_SURFACE_RADIUS_FRACTION * outline.polygon.mean_radius()
    return ObjectModel(
        outline=outline,
        limit_surface_coeff=float(fill_default(dict(data), 'limit_surface_coeff', default_k, 'object', report)),
        friction_mu=float(fill_default(dict(data), 'friction_mu', tol.DEFAULT_FRICTION_MU, 'object', report)),
        polygon_faces=faces,
    )


def parse_bounds(
    data: dict[str, Any], robot: RobotModel, report: list[str]
) -> tuple[StateBounds, ControlBounds]:
    """State and control boxes; missing ones are derived from the robot limits."""
    if 'state' in data:
        size = robot.n_joints + 5
        state = StateBounds(
            lower=_vector(data['state']['lower'], 'bounds.state.lower', size),
            upper=_vector(data['state']['upper'], 'bounds.state.upper', size),
        )
    else:
        state = default_state_bounds(
            robot,
            workspace=float(fill_default(data, 'workspace', tol.WORKSPACE_XY, 'bounds', report)),
        )
    if 'control' in data:
        size = robot.n_joints + 4
        control = ControlBounds(
            lower=_vector(data['control']['lower'], 'bounds.control.lower', size),
            upper=_vector(data['control']['upper'], 'bounds.control.upper', size),
        )
    else:
        control = default_control_bounds(
            robot,
            impulse_max=float(fill_default(data, 'impulse_max', tol.IMPULSE_MAX, 'bounds', report)),
            rate_max=float(fill_default(data, 'rate_max', tol.RELABEL_RATE_MAX, 'bounds', report)),
        )
    return state, control


def default_weights(n_joints: int) -> tuple[list[float], list[float]]:
    """Goal and extraction weights sized for a robot with n_joints joints."""
    goal = list(tol.GOAL_WEIGHTS[:3]) + [0.0] * (n_joints + 2)
    joint = tol.EXTRACTION_WEIGHTS[4]
    extraction = list(tol.EXTRACTION_WEIGHTS[:4]) + [joint] * n_joints + [0.0]
    return goal, extraction


def parse_metrics(data: dict[str, Any], weights: dict[str, Any], n_joints: int, report: list[str]) -> MetricOptions:
    """Metric options; a `weights` section overrides the metric weight entries."""
    merged = dict(data)
    goal, extraction = default_weights(n_joints)
    for key, default in (('goal_weights', goal), ('extraction_weights', extraction)):
        if key in weights:
            merged[key] = weights[key]
        elif merged.get(key) is None:
            merged[key] = default
            report.append(f"metrics.{key} defaulted to {default!r}")
    return MetricOptions.from_dict(merged, report)  # type: ignore[arg-type]


def validate_scenario(scenario: Scenario) -> list[str]:
    """
    Cross-field checks of a parsed scenario.

    Returns:
        Issues found; empty when the scenario is valid
    """
    issues: list[str] = []
    n = scenario.robot.n_joints
    if scenario.state_bounds.lower.shape[0] != n + 5:
        issues.append(f"bounds.state: expected {n + 5} entries")
    if scenario.control_bounds.lower.shape[0] != n + 4:
        issues.append(f"bounds.control: expected {n + 4} entries")
    if scenario.start.n_joints != n:
        issues.append(f"start.q_a: expected {n + 1} entries, got {scenario.start.q_a.shape[0]}")
    size = scenario.metrics.extraction_weights.size
    if size != n + 5:
        issues.append(f"metrics.extraction_weights: expected {n + 5} entries, got {size}")
    size = scenario.metrics.goal_weights.size
    if size not in (3, n + 5):
        issues.append(f"metrics.goal_weights: expected 3 or {n + 5} entries, got {size}")
    if issues:
        return issues

    goal = scenario.goal
    lower, upper = scenario.state_bounds.lower[:3], scenario.state_bounds.upper[:3]
    for i, name in enumerate(('x_u', 'y_u', 'alpha_u')):
        if not lower[i] <= goal[i] <= upper[i]:
            issues.append(f"goal.{name}: {goal[i]:.6g} outside state bounds [{lower[i]:.6g}, {upper[i]:.6g}]")
    passed, reason = check_state(
        scenario.robot, scenario.obj, scenario.start, scenario.state_bounds,
        contact=False, sample_count=scenario.planner.link_sample_count,
    )
    if not passed:
        issues.append(f"start: {reason}")
    return issues


def _section(key: str, issues: list[str], parse: Any, *args: Any) -> Any:
    """Run one section parser, turning its errors into issues."""
    try:
        return parse(*args)
    except InvalidPolygonError as e:
        issues.append(f"{key}: {e}")
    except (KeyError, TypeError) as e:
        issues.append(f"{key}: missing or malformed field {e}")
    except ValueError as e:
        issues.append(f"{key}: {e}")
    return None


class ScenarioManager:
    """
    Reads scenario JSON files.

    Schema Version History:
        1.0 - Initial schema with robot, object, start, goal, bounds,
              weights, metrics, planner, solver and seed sections
    """

    CURRENT_VERSION = '1.0'
    SUPPORTED_VERSIONS = {'1.0'}

    def read(self, path: str | Path) -> dict[str, Any]:
        """
        Parse a scenario file to a dictionary.

        Raises:
            ScenarioLoadError: On I/O errors, invalid JSON, bad root or unsupported version
        """
        path = Path(path)
        try:
            with open(path, encoding='utf-8') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ScenarioLoadError(f"Invalid scenario JSON in {path}: {e}") from e
        except OSError as e:
            raise ScenarioLoadError(f"Failed to read scenario {path}: {e}") from e

        if not isinstance(data, dict):
            raise ScenarioLoadError("Invalid scenario format: expected JSON object at root")
        file_version = data.get('version', '1.0')
        if file_version not in self.SUPPORTED_VERSIONS:
            raise ScenarioLoadError(
                f"Unsupported scenario schema version: {file_version}. "
                f"Supported versions: {', '.join(sorted(self.SUPPORTED_VERSIONS))}"
            )
        return data

    def build(self, data: dict[str, Any], name: str = 'scenario', source: Path | None = None) -> Scenario:
        """
        Build and validate a scenario from its dictionary form.

        Raises:
            ScenarioValidationError: Listing every violated field
        """
        issues: list[str] = []
        report: list[str] = []
        for key in ('robot', 'object', 'start', 'goal'):
            if key not in data:
                issues.append(f"{key}: section is missing")
        if issues:
            raise ScenarioValidationError(issues)

        robot = _section('robot', issues, parse_robot, data['robot'], report)
        obj = _section('object', issues, parse_object, data['object'], report)
        start = _section('start', issues, self._parse_start, data['start'])
        goal = _section('goal', issues, _vector, data['goal'], 'goal', 3)
        planner = _section('planner', issues, PlannerOptions.from_dict, data.get('planner'), report)
        solver = _section('solver', issues, SolverOptions.from_dict, data.get('solver'), report)
        if robot is None:
            raise ScenarioValidationError(issues)
        bounds = _section('bounds', issues, parse_bounds, dict(data.get('bounds') or {}), robot, report)
        metrics = _section(
            'metrics', issues, parse_metrics,
            dict(data.get('metrics') or {}), dict(data.get('weights') or {}), robot.n_joints, report,
        )
        if issues:
            raise ScenarioValidationError(issues)

        scenario = Scenario(
            name=str(data.get('name', name)),
            robot=robot,
            obj=obj,
            start=start,
            goal=goal,
            state_bounds=bounds[0],
            control_bounds=bounds[1],
            planner=planner,
            solver=solver,
            metrics=metrics,
            seed=int(fill_default(data, 'seed', tol.DEFAULT_SEED, 'scenario', report)),
            report=report,
            source=source,
        )
        issues = validate_scenario(scenario)
        if issues:
            raise ScenarioValidationError(issues)
        for line in report:
            logger.debug("%s: %s", scenario.name, line)
        return scenario

    def load(self, path: str | Path) -> Scenario:
        """Read, build and validate the scenario at path."""
        path = Path(path)
        return self.build(self.read(path), name=path.stem, source=path)

    @staticmethod
    def _parse_start(data: StartDict) -> SystemState:
        return SystemState(
            q_u=_vector(data['q_u'], 'start.q_u', 4),
            q_a=_vector(data['q_a'], 'start.q_a'),
            n_a=int(data.get('n_a', 1)),
        )


def load_scenario(path: str | Path) -> Scenario:
    """
    Load a scenario file with all defaults filled.

    Raises:
        ScenarioLoadError: If the file cannot be read or parsed
        ScenarioValidationError: If any field violates its invariants
    """
    return ScenarioManager().load(path)
