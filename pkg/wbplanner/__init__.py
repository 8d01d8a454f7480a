"""wbplanner - whole-body contact-rich planar manipulation planner.

A robot arm pushes a convex object with any part of its links. The planner
grows a tree of quasistatic states by alternating contact planning, guide
generation and guide tracking, then extracts the cheapest path to the goal.
"""

from . import core
from . import models
from . import storage

__all__ = ['core', 'models', 'storage']
