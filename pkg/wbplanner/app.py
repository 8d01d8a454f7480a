# Entry point of the command-line interface.
# Commands are defined in commands/__init__.py; nothing here needs to change
# when a command is added.
from __future__ import annotations

import argparse
import logging
import sys

from . import commands, config
from .lib.plannerUtils import handle_error, log


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=config.APP_NAME,
        description='Whole-body contact-rich planar pushing planner',
    )
    parser.add_argument('--debug', action='store_true', help='Emit stage-level diagnostics')
    subparsers = parser.add_subparsers(dest='command', required=True)
    commands.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.debug:
        logging.getLogger(config.APP_NAME).setLevel(logging.DEBUG)
    try:
        return int(commands.item_by_id(args.cmd_id).run(args))
    except KeyboardInterrupt:
        log('Interrupted', logging.WARNING)
        return 1
    except Exception:
        handle_error(args.command)
        return 1


if __name__ == '__main__':
    sys.exit(main())
