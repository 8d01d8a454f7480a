"""Shared type definitions for the planner.

This module provides common type aliases and Literal types used
throughout the codebase to ensure type safety and consistency.
"""

from typing import Literal

# 2D coordinate types (meters)
Point2D = tuple[float, float]
Vector2D = tuple[float, float]

# Planar pose (x, y, angle)
Pose2D = tuple[float, float, float]

# Edge phases in the plan tree
Phase = Literal["contact-free", "in-contact"]

# Sliding direction imposed on the object contact parameter by the in-contact guide
SlidingDirection = Literal["cw", "ccw"]

# Solver outcome categories
SolveStatus = Literal["optimal", "acceptable", "infeasible", "max_iter", "diverged"]

# Why a tracking run stopped
StopReason = Literal[
    "end_of_guide",
    "not_converged",
    "static",
    "collision",
    "constraint_violation",
    "step_limit",
]

# Pipeline variants
GuideMode = Literal["long_horizon", "constant_goal"]
ContactMode = Literal["optimized", "random"]
