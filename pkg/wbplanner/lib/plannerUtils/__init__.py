from .general_utils import handle_error, log, stage_timer

__all__ = ['log', 'handle_error', 'stage_timer']
