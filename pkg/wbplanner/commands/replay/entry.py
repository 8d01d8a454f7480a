"""Replay command - re-step a trajectory file through the model.

Exit status is 0 when every row is reproduced, 2 on a mismatch and 1 on
any error.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Any

from ... import config
from ...core import tolerances as tol
from ...lib.plannerUtils import log
from ...storage import (
    ReplayMismatchError,
    ScenarioLoadError,
    ScenarioValidationError,
    load_scenario,
    read_trajectory,
    replay_trajectory,
)

# Command identity
CMD_ID = f'{config.COMPANY_NAME}_{config.APP_NAME}_replay'
CMD_NAME = 'replay'
CMD_DESCRIPTION = 'Verify that a trajectory file replays through the quasistatic model'


def register(subparsers: Any) -> None:
    parser = subparsers.add_parser(CMD_NAME, help=CMD_DESCRIPTION, description=CMD_DESCRIPTION)
    parser.add_argument('trajectory', type=Path, help='Trajectory CSV written by plan')
    parser.add_argument('scenario', type=Path, help='Scenario JSON the trajectory was planned for')
    parser.add_argument('--tolerance', type=float, default=tol.REPLAY_TOL,
                        help='Largest accepted per-component deviation')
    parser.set_defaults(cmd_id=CMD_ID)


def run(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario(args.scenario)
        records = read_trajectory(args.trajectory)
    except (ScenarioLoadError, ScenarioValidationError, OSError, ValueError) as e:
        log(str(e), logging.ERROR)
        return 1

    try:
        worst = replay_trajectory(records, scenario.robot, scenario.obj, args.tolerance)
    except ReplayMismatchError as e:
        log(str(e), logging.ERROR)
        return 2
    log(f'{len(records)} rows replayed, largest deviation {worst:.3g}')
    return 0
