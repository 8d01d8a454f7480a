"""Scenario loading and result persistence."""

from .results import (
    ReplayMismatchError,
    ResultSaveError,
    emit_plot_data,
    read_trajectory,
    replay_trajectory,
    replay_tree,
    save_results,
)
from .scenarios import (
    Scenario,
    ScenarioLoadError,
    ScenarioManager,
    ScenarioValidationError,
    load_scenario,
)

__all__ = [
    'Scenario',
    'ScenarioManager',
    'ScenarioLoadError',
    'ScenarioValidationError',
    'load_scenario',
    'ResultSaveError',
    'ReplayMismatchError',
    'save_results',
    'emit_plot_data',
    'read_trajectory',
    'replay_trajectory',
    'replay_tree',
]
