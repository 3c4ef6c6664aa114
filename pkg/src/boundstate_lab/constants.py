"""Constants for the bound-state laboratory."""

import math
from pathlib import Path

# Output locations (relative to the working directory)
DEFAULT_OUT_DIR = Path("out")
SUMMARY_FILE = "summary.json"
REPORTS_FILE = "reports.csv"
CURVES_DIR = "curves"

# Schema version written into every summary and report
SCHEMA_VERSION = 1

# Grid limits
MIN_POINTS_PER_AXIS = 8
MAX_DENSE_SIZE = 4096  # largest N^d assembled as a dense matrix
SUPPORTED_DIMENSIONS = (1, 2)
MIN_EXPONENT = 0.5

# Annular quadrature of the unit ball |xi| < 1
K_ANN = 30
NODES_PER_ANNULUS = 16
ANGULAR_NODES = 32

# Harmonic oscillator h = c_d(-Delta + x^2), normalized so that h >= e^e
E_TO_E = math.e**math.e
HERMITE_ORDER_1D = 200
HERMITE_ORDER_2D = 80
HERMITE_GRAM_TOL = 1e-6
HERMITE_RESIDUAL_TOL = 1e-6

# Eigenvalue counting
KINETIC_NOISE_FLOOR = 1e-6  # tau = floor * max(1, max |xi|^{2s})
DELTA_ONE = 1e-6  # eigenvalues within this distance of 1 are flagged
RANK_TOL = 1e-10  # relative to the largest Gram eigenvalue
SYMMETRY_TOL = 1e-10
PSD_TOL = 1e-10
COUNT_TOL = 1e-10

# Energy sweep E_j = -2^{-j}, j = 0..SWEEP_J_MAX
SWEEP_J_MAX = 20
PLATEAU_RUN = 3
TOP_EIGENVALUES = 10

# Refinement check of the low-frequency trace
QUADRATURE_REFINE_TOL = 1e-4
EXTRA_ANNULI = 10

# Critical weight
DEFAULT_EPS = 0.01
DEFAULT_DELTA = 0.5

# Cwikel machinery
SHELL_K_MAX = 4
HOLDER_HORN_CONSTANT = 2.0
LATTICE_CUTOFF_1D = 4000  # frequency cubes |m| <= cutoff for symbol lattice norms
LATTICE_CUTOFF_2D = 200
CUBE_QUADRATURE_NODES = 24
SLOPE_TOL = 0.1  # allowed excess of a fitted decay or growth slope over its prediction

# Report identifiers
THEOREM_IDS = (
    "T1.1-nonint",
    "T1.1-int",
    "T1.2",
    "T1.5",
    "T1.6",
    "Bargmann",
    "D2-rearr",
    "D2-orlicz",
)
RUN_MODES = ("count", "verify", "sweep", "quasinorm", "cwikel", "selftest")

# Self-test sizes
SELFTEST_VARIATIONAL_CASES = 1000
SELFTEST_FAN_CASES = 500
SELFTEST_MINMAX_CASES = 50

# Run modes
CHAIN_ENERGIES = (-1.0, -0.1, -0.01)
# Largest relative change of C_emp under N -> 2N and under Hermite M -> 2M
GRID_STABILITY_TOL = 0.10
HERMITE_STABILITY_TOL = 0.15
GRID_REFINED_THEOREMS = ("T1.1-nonint", "T1.1-int")
CWIKEL_P_PRIMES = (1.6, 1.8)
CWIKEL_WEIGHT_EXPONENT = 1.0  # r in the embedding <x>^r f
SELFTEST_WELL_DEPTHS = (0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0)
SELFTEST_WELL_GRID = (40, 512)  # (L, N) of the square-well oracle
SELFTEST_SWEEP_GRID = (20, 128)  # (L, N) of the monotonicity sweep
FAR_ENERGY = -1e6
