"""
Configuration Module - Single Source of Truth for All Settings
==============================================================
All project constants defined here. Import and use everywhere.
NEVER hardcode tolerances or limits in other modules.

Environment-specific values (paths, seed, log level) can be overridden
in a .env file; everything else is routing logic and stays here.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# =============================================================================
# PATHS
# =============================================================================

BASE_DIR = Path(__file__).parent.parent
DATA_DIR = Path(os.getenv("TCH_DATA_DIR", BASE_DIR / "data"))

GRAPH_DIR = DATA_DIR / "graphs"
HIERARCHY_DIR = DATA_DIR / "hierarchies"
QUERY_DIR = DATA_DIR / "queries"
REPORT_DIR = DATA_DIR / "reports"

# =============================================================================
# TIME MODEL
# =============================================================================

# One planning period (seconds); every TTF of a graph shares it
PERIOD = float(os.getenv("TCH_PERIOD", 86400))

# =============================================================================
# TOLERANCES
# =============================================================================

ABS_TOL = 1e-9              # equality of times/values in checks
COLLINEAR_TOL = 1e-12       # breakpoint merging after every TTF operation
WITNESS_TOLERANCE = 1e-9    # a candidate must undercut the witness by more than this
PRUNE_TOLERANCE = 1e-9      # relative slack on U before a node is pruned

# =============================================================================
# CONTRACTION
# =============================================================================

WITNESS_SETTLE_LIMIT = 50
WITNESS_HOP_LIMIT = 16

# Approximate contraction: labels above this size are re-approximated
APPROX_LABEL_MAX_POINTS = 64

# Progress log interval (contracted nodes)
CONTRACTION_LOG_EVERY = 500

# =============================================================================
# NODE ORDERING
# =============================================================================

ORDER_EDGE_DIFF_WEIGHT = 1.0
ORDER_DELETED_NEIGHBOR_WEIGHT = 1.0
ORDER_SAMPLES = 4                  # departure_samples(k) default k
ORDER_WITNESS_SETTLE_LIMIT = 50

# =============================================================================
# QUERY
# =============================================================================

ALGORITHMS = ("dijkstra", "tch", "pruned", "atch", "profile")
PRUNING_METHODS = ("none", "static", "interval")
DEFAULT_PRUNING = "static"

# =============================================================================
# GENERATOR
# =============================================================================

DEFAULT_SEED = int(os.getenv("TCH_SEED", 1))

GEN_POINTS_MIN = 2
GEN_POINTS_MAX = 8
GEN_BASE_MIN = 60.0         # seconds
GEN_BASE_MAX = 600.0
GEN_PEAK_AMPLITUDE = 0.5    # peak value = base * (1 + amplitude)
GEN_MIN_SLOPE = -1.0 + 1e-6
GEN_AVG_DEGREE = 3.0

# =============================================================================
# VERIFICATION / BENCHMARK
# =============================================================================

VERIFY_REL_TOL = 1e-6
VERIFY_QUERIES = 1000
VERIFY_PROFILE_QUERIES = 20     # profiles are expensive, check a prefix only
PROFILE_SAMPLES = 100           # departures evaluated per profile

BENCH_QUERIES = 200

# =============================================================================
# FILE RETRY SETTINGS
# =============================================================================

FILE_MAX_RETRIES = 3
FILE_RETRY_DELAY = 2  # seconds

# =============================================================================
# LOGGING
# =============================================================================

LOG_LEVEL = os.getenv("TCH_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


# =============================================================================
# PRINT SETTINGS FOR DEBUGGING
# =============================================================================

if __name__ == "__main__":
    print("Configuration Settings")
    print("=" * 60)
    print(f"\nPaths:")
    print(f"  BASE_DIR: {BASE_DIR}")
    print(f"  DATA_DIR: {DATA_DIR}")

    print(f"\nPeriod: {PERIOD:.0f} s")

    print(f"\nContraction:")
    print(f"  Witness settle limit: {WITNESS_SETTLE_LIMIT}")
    print(f"  Witness hop limit: {WITNESS_HOP_LIMIT}")
    print(f"  Approx label max points: {APPROX_LABEL_MAX_POINTS}")

    print(f"\nOrdering weights: edge_diff={ORDER_EDGE_DIFF_WEIGHT}, "
          f"deleted_neighbors={ORDER_DELETED_NEIGHBOR_WEIGHT}")
    print(f"Verification tolerance: {VERIFY_REL_TOL}")
    print(f"Log level: {LOG_LEVEL}")
