"""Constants for Loewner."""

# Eigensolver
JACOBI_THRESHOLD_REL = 1e-13
JACOBI_MAX_SWEEPS = 100

# Default tolerances (relative to max(1, ||M||_F))
PSD_TOL_REL = 1e-9
PD_FLOOR_REL = 1e-8
CLUSTER_TOL_REL = 1e-8
COMMUTE_TOL_REL = 1e-9
HERMITIAN_TOL_REL = 1e-12
DECOMPOSITION_TOL_REL = 1e-10
UNITARY_ROW_TOL = 1e-9
PARTITION_TOL = 1e-9
SIMULTANEOUS_OFFDIAG_REL = 1e-8
COMPRESSION_TOL_REL = 1e-9

# Verdicts
VIOLATION_FLOOR = 1e-7
VIOLATION_REL = 1e-9
MAX_ACCEPTED_TOLERANCE = 1e-3
BOUNDARY_NUDGE = 1e-6

# Sampling
SPECTRUM_LOW = 1e-2
SPECTRUM_HIGH = 1e2
SPECTRUM_EDGE_MARGIN = 1e-2
WEIGHT_REGULARIZATION = 0.05
SIMULTANEOUS_RETRY_CAP = 5
ROW_RESAMPLE_CAP = 10

# Growth bound grid
GROWTH_GRID_FLOOR = 1e-6
GROWTH_GRID_POINTS = 25

# CLI guards and formats
DEFAULT_MAX_DIM = 4096
TEXT_SIGNIFICANT_DIGITS = 6
WITNESS_ORDERING = "lex-1based"
