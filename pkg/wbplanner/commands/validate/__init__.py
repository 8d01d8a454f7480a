"""Validate command - load a scenario and print its validation report."""
