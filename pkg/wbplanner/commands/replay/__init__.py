"""Replay command - re-step a trajectory file through the model."""
