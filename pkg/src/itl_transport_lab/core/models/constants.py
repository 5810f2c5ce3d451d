"""
Numerical constants shared across the lab.
"""

# Integrators
BLOWUP_THRESHOLD = 1e12
MIDPOINT_TOLERANCE = 1e-12
MIDPOINT_MAX_ITER = 100
STEP_COUNT_SLACK = 1e-9

# Duhamel fixed point
DUHAMEL_SUBINTERVALS = 64
CONTRACTION_TARGET = 0.5

# Monte Carlo
DEFAULT_Z_THRESHOLD = 3.0
MIN_EFFECTIVE_SAMPLE_SIZE = 10.0
SAMPLE_BAND_FACTOR = 4

# Density
PROVEN_DENSITY_MIN_S = 1.5
DEFAULT_NLS_T_BAR = 0.25

# Hermitian symmetry tolerance (relative) accepted before exact symmetrization
HERMITIAN_TOLERANCE = 1e-9
