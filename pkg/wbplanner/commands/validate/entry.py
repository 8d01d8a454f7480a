"""Validate command - load a scenario and print its validation report."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Any

from ... import config
from ...lib.plannerUtils import log
from ...storage import ScenarioLoadError, ScenarioValidationError, load_scenario

# Command identity
CMD_ID = f'{config.COMPANY_NAME}_{config.APP_NAME}_validate'
CMD_NAME = 'validate'
CMD_DESCRIPTION = 'Check a scenario file and list the defaults it relies on'


def register(subparsers: Any) -> None:
    parser = subparsers.add_parser(CMD_NAME, help=CMD_DESCRIPTION, description=CMD_DESCRIPTION)
    parser.add_argument('scenario', type=Path, help='Scenario JSON file')
    parser.set_defaults(cmd_id=CMD_ID)


def run(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioValidationError as e:
        for issue in e.issues:
            log(f'invalid: {issue}', logging.ERROR)
        return 1
    except ScenarioLoadError as e:
        log(str(e), logging.ERROR)
        return 1

    obj = scenario.obj
    log(f'{scenario.name}: valid')
    log(f'  robot: {scenario.robot.n_joints} joints, links {scenario.robot.link_lengths}')
    log(f'  object: {obj.outline.n_points} outline points, {len(obj.polygon_faces)} faces, '
        f'mu {obj.friction_mu:g}, k_L {obj.limit_surface_coeff:.4g} m')
    for line in scenario.report:
        log(f'  default: {line}')
    return 0
