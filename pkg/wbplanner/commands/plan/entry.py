"""Plan command - run the planner on one scenario and write the result files.

Exit status is 0 when the goal was reached, 2 when the budgets ran out
first and 1 on any error.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Any

from ... import config
from ...core.pipeline import plan
from ...lib.plannerUtils import log
from ...storage import ResultSaveError, ScenarioLoadError, ScenarioValidationError, load_scenario, save_results
from ...storage.results import stats_to_dict
from .overrides import add_override_arguments, planner_overrides

# Command identity
CMD_ID = f'{config.COMPANY_NAME}_{config.APP_NAME}_plan'
CMD_NAME = 'plan'
CMD_DESCRIPTION = 'Plan a whole-body pushing motion for a scenario'

EXIT_SUCCESS = 0
EXIT_ERROR = 1
EXIT_NOT_REACHED = 2


def register(subparsers: Any) -> None:
    parser = subparsers.add_parser(CMD_NAME, help=CMD_DESCRIPTION, description=CMD_DESCRIPTION)
    parser.add_argument('scenario', type=Path, help='Scenario JSON file')
    parser.add_argument('--seed', type=int, default=None, help='Random seed (overrides the scenario)')
    parser.add_argument('--out', type=Path, required=True, help='Output directory')
    add_override_arguments(parser)
    parser.set_defaults(cmd_id=CMD_ID)


def execute(
    scenario_path: Path, seed: int | None, out_dir: Path, overrides: dict[str, Any]
) -> tuple[int, dict[str, Any]]:
    """
    Load, plan and save one run.

    Returns:
        (exit status, statistics summary); the summary is empty on load errors
    """
    try:
        scenario = load_scenario(scenario_path).with_overrides(seed=seed, **overrides)
    except (ScenarioLoadError, ScenarioValidationError) as e:
        log(str(e), logging.ERROR)
        return EXIT_ERROR, {}

    log(f'Planning {scenario.name} with seed {scenario.seed}')
    try:
        result = plan(scenario)
    except ScenarioValidationError as e:
        log(str(e), logging.ERROR)
        return EXIT_ERROR, {}
    try:
        paths = save_results(result, scenario, out_dir)
    except ResultSaveError as e:
        log(str(e), logging.ERROR)
        return EXIT_ERROR, {}
    for kind, path in paths.items():
        log(f'{kind}: {path}', logging.DEBUG)

    summary = stats_to_dict(result, scenario)
    if not result.success:
        log(f'Goal not reached after {result.stats.iterations} iterations', logging.WARNING)
        return EXIT_NOT_REACHED, summary
    log(f'Goal reached: {len(result.states) - 1} steps, cost {result.cost:.4g}')
    return EXIT_SUCCESS, summary


def run(args: argparse.Namespace) -> int:
    status, _ = execute(args.scenario, args.seed, args.out, planner_overrides(args))
    return status
