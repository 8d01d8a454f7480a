# Application Global Variables
# This module serves as a way to share variables across different
# modules (global variables).

import os
from pathlib import Path

# Flag that indicates to run in Debug mode or not. When running in Debug mode
# stage-level diagnostics of the planner are written to the console. It can
# also be switched on without editing this file through WBPLANNER_DEBUG=1.
DEBUG = os.environ.get('WBPLANNER_DEBUG', '0') == '1'

# Name used for the application logger and in command identifiers.
APP_NAME = 'wbplanner'
COMPANY_NAME = 'Custom'

# Bundled scenario fixtures
PACKAGE_DIR = Path(__file__).resolve().parent
RESOURCES_DIR = PACKAGE_DIR / 'resources'

# Output file names written by the plan command
TRAJECTORY_FILENAME = 'trajectory.csv'
TREE_FILENAME = 'tree.json'
STATS_FILENAME = 'stats.json'
OUTLINES_FILENAME = 'plot_outlines.csv'
CONTACTS_FILENAME = 'plot_contacts.csv'
NODES_FILENAME = 'plot_nodes.csv'
