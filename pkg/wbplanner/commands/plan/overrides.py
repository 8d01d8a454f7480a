"""Command-line overrides of scenario planner options."""

from __future__ import annotations

import argparse
from typing import Any, get_args

from ...models.types import ContactMode, GuideMode


def add_override_arguments(parser: argparse.ArgumentParser) -> None:
    """Options that take precedence over the scenario file."""
    parser.add_argument('--subgoal-random', action='store_true', default=None,
                        help='Replace the goal by a random perturbation each iteration')
    parser.add_argument('--max-iters', type=int, default=None, help='Pipeline iteration budget')
    parser.add_argument('--time-budget', type=float, default=None, help='Wall time budget in seconds')
    parser.add_argument('--guide-mode', choices=get_args(GuideMode), default=None,
                        help='In-contact guide variant')
    parser.add_argument('--contact-mode', choices=get_args(ContactMode), default=None,
                        help='Contact location variant')


def planner_overrides(args: argparse.Namespace) -> dict[str, Any]:
    """Planner option values set on the command line; unset ones are None."""
    return {
        'subgoal_random': getattr(args, 'subgoal_random', None),
        'max_iterations': getattr(args, 'max_iters', None),
        'time_budget': getattr(args, 'time_budget', None),
        'guide_mode': getattr(args, 'guide_mode', None),
        'contact_mode': getattr(args, 'contact_mode', None),
    }
