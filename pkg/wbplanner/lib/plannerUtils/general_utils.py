"""Logging and error helpers shared by the commands and the planner."""

from __future__ import annotations

import logging
import time
import traceback
from collections.abc import Iterator
from contextlib import contextmanager

__all__ = ['log', 'handle_error', 'stage_timer']

# Attempt to read DEBUG flag from parent config.
try:
    from ... import config
    DEBUG = config.DEBUG
    _LOGGER_NAME = config.APP_NAME
except ImportError:
    DEBUG = False
    _LOGGER_NAME = 'wbplanner'

_logger = logging.getLogger(_LOGGER_NAME)
if not _logger.handlers:
    _handler = logging.StreamHandler()
    _handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s'))
    _logger.addHandler(_handler)
_logger.setLevel(logging.DEBUG if DEBUG else logging.INFO)


def log(message: str, level: int = logging.INFO, force_console: bool = False) -> None:
    """Utility function to easily handle logging in the app.

    Arguments:
    message -- The message to log.
    level -- The logging severity level.
    force_console -- Emits DEBUG messages even when config.DEBUG is off.
    """
    if force_console and level < logging.INFO:
        level = logging.INFO
    _logger.log(level, message)


def handle_error(name: str) -> str:
    """Utility function to simplify error handling.

    Logs the active exception with its traceback under the given label.

    Arguments:
    name -- A name used to label the error.

    :returns:
        The formatted traceback, so callers can persist it next to results.
    """
    details = traceback.format_exc()
    log('===== Error =====', logging.ERROR)
    log(f'{name}\n{details}', logging.ERROR)
    return details


@contextmanager
def stage_timer(timings: dict[str, float], stage: str) -> Iterator[None]:
    """Accumulate wall time spent inside the block under timings[stage]."""
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[stage] = timings.get(stage, 0.0) + time.perf_counter() - start
