"""Tolerance constants and planner defaults.

Centralizes every tolerance and default value used throughout the codebase
for consistency and easy tuning. Lengths are in meters, angles in radians,
impulses in N·s and torques in N·m.
"""

import math

# Zero vector detection threshold
# Outline derivatives below this norm have no usable contact frame
SINGULAR_FRAME: float = 1e-9

# Number of periodic images each Gaussian coefficient is summed over (offsets -1, 0, +1)
PERIODIC_IMAGES: tuple[int, ...] = (-1, 0, 1)

# Quadrature sub-intervals per outline vertex for arc length integrals
ARC_QUADRATURE_LIMIT: int = 400

# Turning angle above which a polygon vertex is kept as a corner when resampling
RESAMPLE_CORNER_ANGLE: float = math.radians(30.0)

# Two face normals closer than this (radians) are merged into one half-space
FACE_MERGE_ANGLE: float = 1e-6

# Turn of the pushed face normal (radians) counted as a face change in plan statistics
FACE_CHANGE_ANGLE: float = math.radians(60.0)

# Quasistatic regularization epsilon (N·m·s/rad) and planning time step (s)
DEFAULT_EPSILON: float = 1.0
DEFAULT_DT: float = 0.1

# Limit surface characteristic length as a fraction of the mean vertex radius
LIMIT_SURFACE_RADIUS_FRACTION: float = 0.6

# Contact and collision tolerances
IN_CONTACT_TOL: float = 1e-4            # Q_IC residual accepted for in-contact states (m)
COLLISION_MARGIN: float = 1e-3          # NLP clearance margin for contact-free states (m)
CONTACT_PENETRATION_TOL: float = 1e-4   # exact clearance floor for in-contact states (m)
SMOOTHING_BETA: float = 200.0           # log-sum-exp temperature of reported clearances (1/m)
NLP_SMOOTHING_BETA: float = 1000.0      # log-sum-exp temperature inside NLPs (1/m)
LINK_SAMPLE_COUNT: int = 64             # outline points per link for collision constraints

# Complementarity relaxation schedule driven over solver restarts
COMPLEMENTARITY_SCHEDULE: tuple[float, ...] = (1e-2, 1e-4, 1e-6)
COMPLEMENTARITY_TOL: float = 1e-6

# Default control bounds
IMPULSE_MAX: float = 0.01               # |λ_n|, |λ_t| upper bound (N·s)
RELABEL_RATE_MAX: float = 0.5           # |v_u|, |v_a| in U_B (outline fraction per step)
SLIDING_RATE_MAX: float = 0.03          # |v_u|, |v_a| while in contact (outline fraction per step)

# Default object workspace bounds
WORKSPACE_XY: float = 2.0
ORIENTATION_LIMIT: float = 4.0 * math.pi

# Metrics
GAMMA_0: float = 5.0
GOAL_WEIGHTS: tuple[float, ...] = (10.0, 10.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0)
GOAL_TOLERANCE: float = 0.01
# Edge cost weights for plan extraction (object pose plus joint motion)
EXTRACTION_WEIGHTS: tuple[float, ...] = (10.0, 10.0, 3.0, 0.0, 0.5, 0.5, 0.5, 0.0)

# Solver contract defaults
SOLVER_MAX_ITER: int = 500
SOLVER_FEAS_TOL: float = 1e-6
SOLVER_OPT_TOL: float = 1e-4
SOLVER_TIME_BUDGET: float = 20.0        # seconds per NLP solve

# Planner hyperparameters
LINK_LENGTH_SCALE: float = 0.3          # ℓ for link sampling weights exp(-d/ℓ)
CONTACT_HORIZON: int = 8                # N_c
GUIDE_HORIZON: int = 25                 # N_l
TRACKING_LOOKAHEAD: int = 3             # N_s
CONTROL_KNOTS: int = 3
LOOKAHEAD_DECAY: float = 0.5
MARGIN_MAX: float = 0.05                # D_c at the start of the approach path
MARGIN_MIN: float = 0.005               # D_c at the approach point
MARGIN_TAPER_FRACTION: float = 0.2
WAYPOINT_SPACING: float = 0.02
WAYPOINT_REACHED: float = 0.01
SWITCHING_PENALTY: float = 0.05
MAX_ITERATIONS: int = 200
TIME_BUDGET: float = 600.0
STATIC_CONTROL_TOL: float = 1e-5        # ‖u‖∞ in scaled units counted as a static solution
MAX_TRACKING_STEPS: int = 60
APPROACH_REPLANS: int = 2               # fresh approach paths after a stalled contact-free run
SUBGOAL_SPREAD: tuple[float, float, float] = (0.05, 0.05, 0.35)

# Tracking objective weights
CONTACT_FREE_TRACKING_WEIGHT: float = 100.0
POSTURE_WEIGHT: float = 0.01
CONTROL_REGULARIZATION: float = 1e-4
JOINT_DEVIATION_WEIGHT: float = 0.1     # W_a in the contact planning objective

# Scenario defaults
OUTLINE_SPACING: float = 0.01           # vertex spacing of generated shape outlines (m)
DEFAULT_FRICTION_MU: float = 0.5
DEFAULT_SEED: int = 0
REPLAY_TOL: float = 1e-9                # per-component replay agreement of stored edges
