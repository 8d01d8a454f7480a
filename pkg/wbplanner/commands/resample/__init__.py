"""Resample command - uniform arc-length resampling of a polygon file."""
