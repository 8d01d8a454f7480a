"""Batch command - run scenario and seed sweeps in a process pool."""
