"""
Pytest configuration for wbplanner tests.

This conftest.py sets up the Python path and module aliases so that tests can
import project modules using simple names (e.g., `from core.x import y`) while
the production code uses relative imports inside the wbplanner package.

How it works:
1. Adds the project root to sys.path
2. Imports wbplanner as a package (triggering __init__.py)
3. Creates module aliases so `import core` resolves to `wbplanner.core`
"""
import sys
from pathlib import Path

import pytest

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# Import package submodules and create aliases
# This allows tests to use simple imports like `from core.x import y`
import wbplanner.core as core
import wbplanner.models as models
import wbplanner.storage as storage

sys.modules['core'] = core
sys.modules['models'] = models
sys.modules['storage'] = storage

# Also alias the submodules for imports like `from core.kinematics import x`
for _name in (
    'constraints', 'contact_planning', 'extraction', 'guides', 'kinematics', 'metrics', 'nlp',
    'options', 'outline', 'pipeline', 'polygons', 'problem', 'sampling', 'tolerances', 'tracking',
):
    sys.modules[f'core.{_name}'] = getattr(core, _name)

sys.modules['models.constraint_data'] = models.constraint_data
sys.modules['models.outline'] = models.outline
sys.modules['models.planning'] = models.planning
sys.modules['models.system'] = models.system
sys.modules['models.types'] = models.types

sys.modules['storage.scenarios'] = storage.scenarios
sys.modules['storage.results'] = storage.results

# Import and alias test helpers module
import tests.helpers as helpers
sys.modules['helpers'] = helpers

from wbplanner import config  # noqa: E402
from core.problem import PlanningProblem  # noqa: E402
from storage.scenarios import Scenario, load_scenario  # noqa: E402


@pytest.fixture(scope='session')
def resources_dir() -> Path:
    """Directory of the bundled scenario files."""
    return config.RESOURCES_DIR


@pytest.fixture(scope='session')
def box_scenario(resources_dir: Path) -> Scenario:
    """Three-link arm and the 276 x 198 mm box, pure translation task."""
    return load_scenario(resources_dir / 'box_reorient_0.json')


@pytest.fixture(scope='session')
def cylinder_scenario(resources_dir: Path) -> Scenario:
    """Three-link arm and the 75 mm cylinder."""
    return load_scenario(resources_dir / 'cylinder_push.json')


@pytest.fixture
def robot(box_scenario: Scenario):
    return box_scenario.robot


@pytest.fixture
def box(box_scenario: Scenario):
    return box_scenario.obj


@pytest.fixture
def cylinder(cylinder_scenario: Scenario):
    return cylinder_scenario.obj


@pytest.fixture
def problem(box_scenario: Scenario) -> PlanningProblem:
    """Fresh planning problem (empty program cache) over the box scenario."""
    return PlanningProblem.from_scenario(box_scenario)
