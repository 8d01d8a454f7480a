"""
Tests for the command-line interface.

Run with: pytest tests/ -v
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from wbplanner import commands
from wbplanner.app import build_parser, main
from wbplanner.commands.batch.entry import summarize
from core.kinematics import step
from models.system import ControlInput
from storage.results import TrajectoryRecord, write_trajectory

UNIT_SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]


def scenario_copy(resources_dir: Path, tmp_path: Path, **changes) -> Path:
    """The box fixture written to tmp_path with top-level entries replaced."""
    data = json.loads((resources_dir / 'box_reorient_0.json').read_text(encoding='utf-8'))
    data.update(changes)
    path = tmp_path / 'scenario.json'
    path.write_text(json.dumps(data), encoding='utf-8')
    return path


def read_rows(path: Path) -> list[dict]:
    with open(path, encoding='utf-8', newline='') as f:
        return list(csv.DictReader(f))


class TestCommandRegistry:
    """Parsed arguments carry the CMD_ID that main() dispatches on."""

    @pytest.mark.parametrize('argv,module', [
        (['validate', 'scenario.json'], 'validate'),
        (['replay', 'trajectory.csv', 'scenario.json'], 'replay'),
        (['resample', 'polygon.json', '--spacing', '0.01'], 'resample'),
        (['plan', 'scenario.json', '--out', 'runs'], 'plan'),
    ])
    def test_cmd_id_resolves_to_module(self, argv: list[str], module: str) -> None:
        args = build_parser().parse_args(argv)
        command = commands.item_by_id(args.cmd_id)
        assert command is getattr(commands, module)
        assert command.CMD_ID.endswith(f'_{module}')

    def test_ids_unique(self) -> None:
        ids = [command.CMD_ID for command in commands.commands]
        assert len(set(ids)) == len(ids)

    def test_unknown_id(self) -> None:
        with pytest.raises(KeyError):
            commands.item_by_id('wbplanner_missing')


class TestValidateCommand:
    def test_valid_fixture(self, resources_dir: Path) -> None:
        assert main(['validate', str(resources_dir / 'box_reorient_0.json')]) == 0

    def test_invalid_json(self, tmp_path: Path) -> None:
        path = tmp_path / 'broken.json'
        path.write_text('{', encoding='utf-8')
        assert main(['validate', str(path)]) == 1

    def test_missing_section(self, resources_dir: Path, tmp_path: Path) -> None:
        data = json.loads((resources_dir / 'box_reorient_0.json').read_text(encoding='utf-8'))
        del data['object']
        path = tmp_path / 'no_object.json'
        path.write_text(json.dumps(data), encoding='utf-8')
        assert main(['validate', str(path)]) == 1


class TestResampleCommand:
    """Test the resample command."""

    def test_json_input(self, tmp_path: Path) -> None:
        source = tmp_path / 'square.json'
        source.write_text(json.dumps({'vertices': UNIT_SQUARE}), encoding='utf-8')
        out = tmp_path / 'square.csv'
        assert main(['resample', str(source), '--spacing', '0.25', '--out', str(out)]) == 0
        rows = read_rows(out)
        assert len(rows) == 16
        assert list(rows[0]) == ['x', 'y']

    def test_csv_input_with_header(self, tmp_path: Path) -> None:
        source = tmp_path / 'square.csv'
        source.write_text('x,y\n' + '\n'.join(f'{x},{y}' for x, y in UNIT_SQUARE) + '\n', encoding='utf-8')
        out = tmp_path / 'resampled.csv'
        assert main(['resample', str(source), '--spacing', '0.5', '--out', str(out)]) == 0
        assert len(read_rows(out)) == 8

    def test_console_output(self, tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
        source = tmp_path / 'square.json'
        source.write_text(json.dumps({'vertices': UNIT_SQUARE}), encoding='utf-8')
        assert main(['resample', str(source), '--spacing', '0.5']) == 0
        assert capsys.readouterr().out.splitlines()[0] == 'x,y'

    def test_spacing_too_large(self, tmp_path: Path) -> None:
        source = tmp_path / 'square.json'
        source.write_text(json.dumps({'vertices': UNIT_SQUARE}), encoding='utf-8')
        assert main(['resample', str(source), '--spacing', '2.0']) == 1

    def test_missing_vertices(self, tmp_path: Path) -> None:
        source = tmp_path / 'empty.json'
        source.write_text('{}', encoding='utf-8')
        assert main(['resample', str(source), '--spacing', '0.1']) == 1


class TestReplayCommand:
    """Test the replay command exit codes."""

    @pytest.fixture
    def trajectory(self, box_scenario, tmp_path: Path) -> Path:
        controls = [
            ControlInput(u_u=[0.0, 0.0, 0.0], u_a=[0.2, -0.1, 0.1, 0.0]),
            ControlInput(u_u=[0.0, 0.0, 0.0], u_a=[-0.1, 0.1, 0.0, 0.0]),
        ]
        states = [box_scenario.start]
        for control in controls:
            states.append(step(box_scenario.robot, box_scenario.obj, states[-1], control))
        records = [
            TrajectoryRecord(step=k, state=state, control=controls[k] if k < 2 else None,
                             phase='contact-free' if k < 2 else None)
            for k, state in enumerate(states)
        ]
        return write_trajectory(tmp_path / 'trajectory.csv', records, box_scenario)

    def test_consistent_trajectory(self, trajectory: Path, resources_dir: Path) -> None:
        assert main(['replay', str(trajectory), str(resources_dir / 'box_reorient_0.json')]) == 0

    def test_tampered_trajectory(self, trajectory: Path, resources_dir: Path) -> None:
        rows = read_rows(trajectory)
        rows[1]['x_u'] = repr(float(rows[1]['x_u']) + 1e-3)
        with open(trajectory, 'w', encoding='utf-8', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        assert main(['replay', str(trajectory), str(resources_dir / 'box_reorient_0.json')]) == 2

    def test_missing_trajectory(self, tmp_path: Path, resources_dir: Path) -> None:
        missing = tmp_path / 'absent.csv'
        assert main(['replay', str(missing), str(resources_dir / 'box_reorient_0.json')]) == 1


class TestPlanCommand:
    """Test the plan command on runs that need no pipeline iteration."""

    def test_goal_at_start(self, resources_dir: Path, tmp_path: Path) -> None:
        scenario = scenario_copy(resources_dir, tmp_path, goal=[0.75, -0.35, 0.0])
        out = tmp_path / 'out'
        assert main(['plan', str(scenario), '--out', str(out)]) == 0
        assert len(read_rows(out / 'trajectory.csv')) == 1
        stats = json.loads((out / 'stats.json').read_text(encoding='utf-8'))
        assert stats['success'] is True
        assert stats['iterations'] == 0

    def test_budget_exhausted(self, resources_dir: Path, tmp_path: Path) -> None:
        scenario = scenario_copy(resources_dir, tmp_path)
        out = tmp_path / 'out'
        assert main(['plan', str(scenario), '--out', str(out), '--max-iters', '0', '--seed', '3']) == 2
        stats = json.loads((out / 'stats.json').read_text(encoding='utf-8'))
        assert stats['success'] is False
        assert stats['seed'] == 3
        assert (out / 'tree.json').exists()

    def test_bad_scenario(self, tmp_path: Path) -> None:
        path = tmp_path / 'broken.json'
        path.write_text('[]', encoding='utf-8')
        assert main(['plan', str(path), '--out', str(tmp_path / 'out')]) == 1


def run_summary(iterations: int, total: float = 1.0, face_changes: int = 0) -> dict:
    return {'iterations': iterations, 'timing': {'total': total}, 'face_changes': face_changes}


class TestBatchSummary:
    """Test summarize() of the batch command."""

    def test_failures_charged_with_cap(self) -> None:
        runs = [(0, run_summary(3, 2.0, 1)), (2, run_summary(200)), (1, {})]
        summary = summarize(runs, 200)
        assert summary['runs'] == 3
        assert summary['successes'] == 1
        assert summary['errors'] == 1
        assert summary['success_rate'] == pytest.approx(1 / 3)
        assert summary['median_iterations'] == 200.0
        assert summary['median_success_time'] == 2.0
        assert summary['face_changes'] == [1]

    def test_own_counts_without_cap(self) -> None:
        runs = [(0, run_summary(3)), (2, run_summary(200)), (1, {})]
        assert summarize(runs, None)['median_iterations'] == pytest.approx(101.5)

    def test_no_successes(self) -> None:
        summary = summarize([(2, run_summary(50))], 50)
        assert summary['success_rate'] == 0.0
        assert summary['median_success_time'] is None
        assert np.isclose(summary['median_iterations'], 50.0)
