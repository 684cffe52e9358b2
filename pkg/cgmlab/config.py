"""Configuration settings for the verification library and CLI."""

from typing import Dict, Tuple

# -------- Model spaces --------
# Absolute tolerance on the quadratic form for membership tests
CONTAINS_TOL = 1e-12

# Tangency / unit-length tolerance for user-supplied vectors
TANGENT_TOL = 1e-9

# Below this length exp_map switches to the sinc series
EXP_SERIES_BRANCH = 1e-8

# -------- Finite differences --------
# Central-difference step for first derivatives (differentials of F)
FIRST_DERIVATIVE_STEP = 1e-5

# Five-point stencil step used by the definition-level connection map
CONNECTION_STENCIL_STEP = 1e-4

# Five-point step for split coordinate vectors that are differentiated twice more
ORACLE_STENCIL_STEP = 2e-3

# Step for the nested differences of Christoffel / Riemann
SECOND_DERIVATIVE_STEP = 1e-3

RICHARDSON = True

# Points closer than BOUNDARY_MARGIN * step to a chart box edge are rejected
BOUNDARY_MARGIN = 10.0

# |g(v,v)g(w,w) - g(v,w)^2| below this is a degenerate plane
DEGENERATE_PLANE_TOL = 1e-8

# |det g| below this is a singular metric
SINGULAR_METRIC_TOL = 1e-10

# Metric symmetry tolerance
SYMMETRY_TOL = 1e-13

# -------- Acceptance thresholds --------
CLOSED_FORM_TOL = 1e-10
NUMERIC_TOL = 1e-6
CURVATURE_TOL = 1e-4
GROUP_TOL = 1e-12
R_SWEEP_TOL = 1e-15
SANITY_TOL = 1e-5
FLAT_TOL = 1e-8

# Allowed shortfall of the observed central-difference order below 2
ORDER_SLACK = 0.05

# r values swept by the unit-bundle r-independence check
R_SWEEP: Tuple[float, ...] = (0.0, 1.0, 5.0)

# -------- CLI defaults --------
DEFAULT_SEED = 7
DEFAULT_FD_STEP = SECOND_DERIVATIVE_STEP

# Sample counts per scenario when --samples is omitted
DEFAULT_SAMPLES: Dict[str, int] = {
    "sphere-isometry": 1000,
    "berger-isometry": 200,
    "hyperbolic-immersion": 500,
    "curvature-closed-vs-oracle": 4,
    "constant-curvature-T1": 50,
    "positivity-sample": 20,
    "oracle-sanity": 5,
}

# -------- Output formats --------
REPORT_KEYS = ("scenario", "params", "checks", "passed", "wall_ms")
TABLE_HEADER = ("c", "m", "r", "plane", "closed_form", "oracle", "delta")

# Exit codes
EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
