"""Batch command - run scenario and seed sweeps in a process pool.

Every (scenario, seed) job writes into its own directory
`<out>/<scenario>/seed_<k>`; a summary with success rate and median
iterations per scenario is written to `<out>/summary.json`. Runs that miss
the goal count with the iteration cap in the median.
"""

from __future__ import annotations

import argparse
import json
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Any

import numpy as np

from ... import config
from ...lib.plannerUtils import handle_error, log
from ...storage.results import ResultSaveError, atomic_write
from ..plan.entry import EXIT_ERROR, EXIT_SUCCESS, execute
from ..plan.overrides import add_override_arguments, planner_overrides

# Command identity
CMD_ID = f'{config.COMPANY_NAME}_{config.APP_NAME}_batch'
CMD_NAME = 'batch'
CMD_DESCRIPTION = 'Run several scenarios over several seeds and summarize success rates'

SUMMARY_FILENAME = 'summary.json'


def register(subparsers: Any) -> None:
    parser = subparsers.add_parser(CMD_NAME, help=CMD_DESCRIPTION, description=CMD_DESCRIPTION)
    parser.add_argument('scenarios', type=Path, nargs='+', help='Scenario JSON files')
    parser.add_argument('--seeds', type=int, default=10, help='Seeds 0..N-1 per scenario')
    parser.add_argument('--out', type=Path, required=True, help='Output root directory')
    parser.add_argument('--workers', type=int, default=None, help='Worker processes (defaults to CPU count)')
    add_override_arguments(parser)
    parser.set_defaults(cmd_id=CMD_ID)


def _job(scenario_path: Path, seed: int, out_dir: Path, overrides: dict[str, Any]) -> tuple[int, dict[str, Any]]:
    try:
        return execute(scenario_path, seed, out_dir, overrides)
    except Exception:
        handle_error(f'batch job {scenario_path.stem} seed {seed}')
        return EXIT_ERROR, {}


def summarize(runs: list[tuple[int, dict[str, Any]]], iteration_cap: int | None) -> dict[str, Any]:
    """
    Success rate and iteration statistics of one scenario's runs.

    Args:
        runs: (exit status, statistics summary) per seed
        iteration_cap: Iterations charged to unsuccessful runs; their own count when None
    """
    successes = [summary for status, summary in runs if status == EXIT_SUCCESS]
    charged = []
    for status, summary in runs:
        if status == EXIT_SUCCESS:
            charged.append(summary['iterations'])
        elif iteration_cap is not None:
            charged.append(iteration_cap)
        elif summary:
            charged.append(summary['iterations'])
    return {
        'runs': len(runs),
        'successes': len(successes),
        'errors': sum(1 for status, _ in runs if status == EXIT_ERROR),
        'success_rate': len(successes) / len(runs) if runs else 0.0,
        'median_iterations': float(np.median(charged)) if charged else None,
        'median_success_time': (
            float(np.median([s['timing']['total'] for s in successes])) if successes else None
        ),
        'face_changes': [s['face_changes'] for s in successes],
    }


def run(args: argparse.Namespace) -> int:
    overrides = planner_overrides(args)
    jobs = [(path, seed) for path in args.scenarios for seed in range(args.seeds)]
    results: dict[str, list[tuple[int, dict[str, Any]]]] = {path.stem: [] for path in args.scenarios}

    with ProcessPoolExecutor(max_workers=args.workers) as pool:
        futures = {
            pool.submit(_job, path, seed, args.out / path.stem / f'seed_{seed}', overrides): (path, seed)
            for path, seed in jobs
        }
        for future in as_completed(futures):
            path, seed = futures[future]
            status, summary = future.result()
            results[path.stem].append((status, summary))
            log(f'{path.stem} seed {seed}: exit {status}')

    cap = overrides['max_iterations']
    summary = {name: summarize(runs, cap) for name, runs in results.items()}
    try:
        atomic_write(args.out / SUMMARY_FILENAME, lambda f: json.dump(summary, f, indent=2, sort_keys=True))
    except ResultSaveError as e:
        log(str(e), logging.ERROR)
        return EXIT_ERROR

    for name, entry in summary.items():
        log(f"{name}: {entry['successes']}/{entry['runs']} succeeded, "
            f"median iterations {entry['median_iterations']}")
    return EXIT_ERROR if any(entry['errors'] for entry in summary.values()) else EXIT_SUCCESS
