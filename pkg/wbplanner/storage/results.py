"""Result persistence: trajectory, tree dump, statistics and plot data."""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Any, TextIO

import numpy as np

from .. import config
from ..core import tolerances as tol
from ..core.constraints import contact_gap, contact_modes, friction_cone, link_clearances
from ..core.kinematics import link_sample_points, object_contact_point, robot_contact_point, step, to_world
from ..core.metrics import parameter_difference
from ..core.outline import eval_point, sample_points
from ..models.planning import PlanResult, PlanTree
from ..models.system import ControlInput, ObjectModel, RobotModel, SystemState
from ..models.types import Phase
from .scenarios import Scenario


class ResultSaveError(IOError):
    """Raised when result files cannot be written."""

    pass


class ReplayMismatchError(ValueError):
    """Raised when a stored control does not reproduce the next stored state."""

    def __init__(self, step_index: int, error: float) -> None:
        self.step_index = step_index
        self.error = error
        super().__init__(f"replay of step {step_index} deviates by {error:.3g}")


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """
    One row of a trajectory file.

    Attributes:
        step: Step index
        state: q at this step
        control: Control leading to the next step (None on the last row)
        phase: Phase of that transition
    """

    step: int
    state: SystemState
    control: ControlInput | None
    phase: Phase | None


def atomic_write(path: Path, write: Callable[[TextIO], None]) -> Path:
    """
    Write a text file through a temporary sibling and an atomic rename.

    Raises:
        ResultSaveError: If the file cannot be written
    """
    temp_path = path.with_suffix(path.suffix + '.tmp')
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(temp_path, 'w', encoding='utf-8', newline='') as f:
            write(f)
        temp_path.replace(path)
    except (OSError, TypeError, ValueError) as e:
        if temp_path.exists():
            try:
                temp_path.unlink()
            except OSError:
                pass
        raise ResultSaveError(f"Failed to write {path}: {e}") from e
    return path


def _number(value: float) -> str:
    return repr(float(value))


def trajectory_header(n_joints: int) -> list[str]:
    joints = [f"theta_{i}" for i in range(1, n_joints + 1)]
    torques = [f"tau_{i}" for i in range(1, n_joints + 1)]
    return [
        'step', 'time', 'x_u', 'y_u', 'alpha_u', 'phi_u', *joints, 'phi_a', 'n_a',
        'lambda_n', 'lambda_t', 'v_u', *torques, 'v_a', 'phase',
        'max_residual', 'contact_gap', 'min_clearance',
    ]


def residual_summary(
    robot: RobotModel, obj: ObjectModel, state: SystemState, control: ControlInput | None,
    phase: Phase | None, sample_count: int,
) -> tuple[float, float | None, float]:
    """
    Constraint summary of a trajectory row.

    Returns:
        (largest cone or mode violation of the control, contact gap of an
        in-contact row or None, smallest exact link clearance)
    """
    clearance = float(link_clearances(robot, obj, state, sample_count).min())
    if control is None or phase != 'in-contact':
        return 0.0, None, clearance
    residual = friction_cone(control, obj.friction_mu).merged(contact_modes(control, obj.friction_mu))
    return residual.max_violation(), contact_gap(robot, obj, state), clearance


def trajectory_records(result: PlanResult) -> list[TrajectoryRecord]:
    records = []
    for k, state in enumerate(result.states):
        last = k == len(result.states) - 1
        records.append(TrajectoryRecord(
            step=k,
            state=state,
            control=None if last else result.controls[k],
            phase=None if last else result.phases[k],
        ))
    return records


def write_trajectory(path: Path, records: list[TrajectoryRecord], scenario: Scenario) -> Path:
    """Write trajectory rows; the control columns of the last row are empty."""
    robot, obj = scenario.robot, scenario.obj
    n = robot.n_joints

    def write(f: TextIO) -> None:
        writer = csv.writer(f)
        writer.writerow(trajectory_header(n))
        for record in records:
            state = record.state
            row = [str(record.step), _number(record.step * robot.dt)]
            row += [_number(v) for v in state.vector()] + [str(state.n_a)]
            if record.control is None:
                row += [''] * (n + 4) + ['']
            else:
                row += [_number(v) for v in record.control.vector()] + [record.phase or '']
            worst, gap, clearance = residual_summary(
                robot, obj, state, record.control, record.phase, scenario.planner.link_sample_count,
            )
            row += [_number(worst), '' if gap is None else _number(gap), _number(clearance)]
            writer.writerow(row)

    return atomic_write(path, write)


def read_trajectory(path: str | Path) -> list[TrajectoryRecord]:
    """
    Parse a trajectory file.

    Raises:
        ValueError: If the header or a row is malformed
        OSError: If the file cannot be read
    """
    with open(path, encoding='utf-8', newline='') as f:
        rows = list(csv.DictReader(f))
    if not rows:
        return []
    joints = sorted(
        (key for key in rows[0] if key.startswith('theta_')), key=lambda key: int(key.split('_')[1])
    )
    n = len(joints)
    if n == 0:
        raise ValueError("trajectory has no joint columns")
    records = []
    for row in rows:
        q = [float(row[key]) for key in ('x_u', 'y_u', 'alpha_u', 'phi_u', *joints, 'phi_a')]
        state = SystemState.from_vector(np.array(q), int(row['n_a']))
        control = None
        phase: Phase | None = None
        if row['lambda_n']:
            keys = ['lambda_n', 'lambda_t', 'v_u', *(f"tau_{i}" for i in range(1, n + 1)), 'v_a']
            control = ControlInput.from_vector(np.array([float(row[key]) for key in keys]))
            if row['phase'] not in ('contact-free', 'in-contact'):
                raise ValueError(f"unknown phase {row['phase']!r} at step {row['step']}")
            phase = row['phase']  # type: ignore[assignment]
        records.append(TrajectoryRecord(step=int(row['step']), state=state, control=control, phase=phase))
    return records


def state_error(expected: SystemState, actual: SystemState) -> float:
    """Largest component difference, contact parameters compared modulo 1."""
    delta = actual.vector() - expected.vector()
    delta[3] = parameter_difference(actual.phi_u, expected.phi_u)
    delta[-1] = parameter_difference(actual.phi_a, expected.phi_a)
    return float(np.max(np.abs(delta)))


def replay_trajectory(
    records: list[TrajectoryRecord], robot: RobotModel, obj: ObjectModel, tolerance: float = tol.REPLAY_TOL
) -> float:
    """
    Step every stored control from its row and compare with the next row.

    The step is taken on the link of the next row, which is the link the
    control was computed for.

    Returns:
        Largest deviation over all steps

    Raises:
        ReplayMismatchError: If a step deviates by more than tolerance
    """
    worst = 0.0
    for current, following in zip(records, records[1:]):
        if current.control is None:
            raise ReplayMismatchError(current.step, math.inf)
        predicted = step(robot, obj, current.state.with_link(following.state.n_a), current.control)
        error = state_error(following.state, predicted)
        if error > tolerance:
            raise ReplayMismatchError(current.step, error)
        worst = max(worst, error)
    return worst


def replay_tree(tree: PlanTree, robot: RobotModel, obj: ObjectModel, tolerance: float = tol.REPLAY_TOL) -> float:
    """Replay every tree edge from its parent; returns the largest deviation."""
    worst = 0.0
    for parent, child in tree.edges():
        assert child.edge is not None
        predicted = step(robot, obj, parent.state.with_link(child.state.n_a), child.edge.control)
        error = state_error(child.state, predicted)
        if error > tolerance:
            raise ReplayMismatchError(child.index, error)
        worst = max(worst, error)
    return worst


def tree_to_dict(tree: PlanTree) -> dict[str, Any]:
    nodes = []
    for node in tree:
        entry: dict[str, Any] = {
            'index': node.index,
            'parent': node.parent,
            'depth': node.depth,
            'q_u': node.state.q_u.tolist(),
            'q_a': node.state.q_a.tolist(),
            'n_a': node.state.n_a,
        }
        if node.edge is not None:
            entry['phase'] = node.edge.phase
            entry['u'] = node.edge.control.vector().tolist()
        nodes.append(entry)
    return {'version': '1.0', 'nodes': nodes}


def stats_to_dict(result: PlanResult, scenario: Scenario) -> dict[str, Any]:
    """Statistics summary; wall times are kept apart in the `timing` section."""
    stats = result.stats
    best = stats.best_goal_distance
    return {
        'scenario': scenario.name,
        'seed': scenario.seed,
        'success': result.success,
        'iterations': stats.iterations,
        'node_count': stats.node_count,
        'plan_steps': max(len(result.states) - 1, 0),
        'plan_cost': result.cost,
        'face_changes': face_changes(result, scenario.obj),
        'best_goal_distance': best if math.isfinite(best) else None,
        'failures': dict(sorted(stats.failures.items())),
        'stop_reasons': dict(sorted(stats.stop_reasons.items())),
        'timing': {
            'stages': dict(sorted(stats.stage_times.items())),
            'total': stats.wall_time,
        },
    }


def contact_face(obj: ObjectModel, phi_u: float) -> int:
    """Index of the half-space of `obj.polygon_faces` the outline point at φ_u lies on."""
    origins, normals = obj.face_arrays()
    point = eval_point(obj.outline, phi_u)
    return int(np.argmax(normals @ point - np.sum(normals * origins, axis=1)))


def face_changes(result: PlanResult, obj: ObjectModel) -> int:
    """
    Number of times the pushed face changes along the extracted plan.

    Each in-contact edge's child state is mapped to its face with
    contact_face(). A change is counted when the face normal has turned more
    than FACE_CHANGE_ANGLE from the face where the current run began, so
    nearly collinear faces of one side and regrasps on the same side count 0.
    """
    _, normals = obj.face_arrays()
    reference: np.ndarray | None = None
    changes = 0
    threshold = math.cos(tol.FACE_CHANGE_ANGLE)
    for phase, state in zip(result.phases, result.states[1:]):
        if phase != 'in-contact':
            continue
        normal = normals[contact_face(obj, state.phi_u)]
        if reference is None:
            reference = normal
        elif float(normal @ reference) < threshold:
            changes += 1
            reference = normal
    return changes


def _json_writer(data: dict[str, Any]) -> Callable[[TextIO], None]:
    def write(f: TextIO) -> None:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write('\n')
    return write


def _csv_writer(header: list[str], rows: list[list[Any]]) -> Callable[[TextIO], None]:
    def write(f: TextIO) -> None:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)
    return write


def emit_plot_data(result: PlanResult, scenario: Scenario, out_dir: str | Path, samples: int = 64) -> dict[str, Path]:
    """
    Plot tables for external rendering.

    Writes sampled world outlines of the object and every link at each
    trajectory step, the contact point traces, and a scatter of the tree
    nodes' object poses.
    """
    out = Path(out_dir)
    robot, obj = scenario.robot, scenario.obj
    body = sample_points(obj.outline, np.arange(samples) / samples)

    outline_rows: list[list[Any]] = []
    contact_rows: list[list[Any]] = []
    for k, state in enumerate(result.states):
        for j, (x, y) in enumerate(to_world(state.pose, body)):
            outline_rows.append([k, 'object', j, _number(x), _number(y)])
        for link in range(1, robot.n_joints + 1):
            for j, (x, y) in enumerate(link_sample_points(robot, state.q_a, link, samples)):
                outline_rows.append([k, f"link_{link}", j, _number(x), _number(y)])
        phase = result.phases[k - 1] if k > 0 else ''
        p_u, _, _ = object_contact_point(obj, state.q_u)
        p_a, _, _ = robot_contact_point(robot, state.q_a, state.n_a)
        contact_rows.append([k, phase, state.n_a, *map(_number, p_u), *map(_number, p_a)])

    node_rows: list[list[Any]] = []
    if result.tree is not None:
        for node in result.tree:
            phase = node.edge.phase if node.edge is not None else ''
            parent = '' if node.parent is None else node.parent
            node_rows.append([node.index, parent, phase, *map(_number, node.state.pose)])

    return {
        'outlines': atomic_write(
            out / config.OUTLINES_FILENAME,
            _csv_writer(['step', 'body', 'point', 'x', 'y'], outline_rows),
        ),
        'contacts': atomic_write(
            out / config.CONTACTS_FILENAME,
            _csv_writer(['step', 'phase', 'n_a', 'p_u_x', 'p_u_y', 'p_a_x', 'p_a_y'], contact_rows),
        ),
        'nodes': atomic_write(
            out / config.NODES_FILENAME,
            _csv_writer(['index', 'parent', 'phase', 'x_u', 'y_u', 'alpha_u'], node_rows),
        ),
    }


def save_results(result: PlanResult, scenario: Scenario, out_dir: str | Path) -> dict[str, Path]:
    """
    Write every result file of a planner run into out_dir.

    Returns:
        Written paths keyed by kind

    Raises:
        ResultSaveError: If any file cannot be written
    """
    out = Path(out_dir)
    paths = {
        'trajectory': write_trajectory(out / config.TRAJECTORY_FILENAME, trajectory_records(result), scenario),
        'stats': atomic_write(out / config.STATS_FILENAME, _json_writer(stats_to_dict(result, scenario))),
    }
    if result.tree is not None:
        paths['tree'] = atomic_write(out / config.TREE_FILENAME, _json_writer(tree_to_dict(result.tree)))
    paths.update(emit_plot_data(result, scenario, out))
    return paths


def stats_fingerprint(stats: dict[str, Any]) -> str:
    """Serialized statistics without the timing section, for determinism checks."""
    return json.dumps({k: v for k, v in stats.items() if k != 'timing'}, sort_keys=True)
