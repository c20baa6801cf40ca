"""Configuration settings for the hypothesis-testing capacity toolkit"""

import os
import sys
import logging
from pathlib import Path
from dotenv import load_dotenv

# ====================================
# ENVIRONMENT SETUP
# ====================================

# Get the base directory of the project
BASE_DIR = Path(__file__).resolve().parent

# Load environment variables from .env file
load_dotenv(BASE_DIR / ".env")

# ====================================
# APPLICATION SETTINGS
# ====================================

APP_NAME: str = os.getenv("APP_NAME", "dhtoolkit")
APP_VERSION: str = os.getenv("APP_VERSION", "1.0.0")

# Debug mode (set DEBUG=true in .env to enable)
DEBUG: bool = os.getenv("DEBUG", "false").lower() == "true"

# Logging level
LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO").upper()

# ====================================
# NUMERICS
# ====================================

# "2" reports bits, "e" reports nats; switchable at runtime via core.units
LOG_BASE: str = os.getenv("LOG_BASE", "2").lower()

# Largest composite Hilbert-space dimension any operator may reach
MAX_COMPOSITE_DIM: int = int(os.getenv("MAX_COMPOSITE_DIM", "4096"))

# Solver tolerances
DUALITY_GAP_TOL: float = float(os.getenv("DUALITY_GAP_TOL", "1e-7"))
BISECTION_TOL: float = float(os.getenv("BISECTION_TOL", "1e-12"))
RANK_TOL: float = float(os.getenv("RANK_TOL", "1e-9"))
PINV_TOL: float = float(os.getenv("PINV_TOL", "1e-10"))

# Exact codebook enumeration cap (|X|^m)
ENUMERATION_CAP: int = int(os.getenv("ENUMERATION_CAP", "10000"))

# Full input-simplex search over X^n is only allowed up to this many labels
FULL_SEARCH_CAP: int = int(os.getenv("FULL_SEARCH_CAP", "64"))

# ====================================
# RESULTS ARCHIVE
# ====================================

# Certified results are archived here when the CLI runs with --archive
RESULTS_DATABASE_URL: str = os.getenv(
    "RESULTS_DATABASE_URL",
    f"sqlite:///{BASE_DIR / 'results.db'}"
)

# ====================================
# STARTUP INFO (DEBUG mode only)
# ====================================

if DEBUG:
    logging.basicConfig(level=logging.DEBUG)
    print(f"\nConfiguration Loaded:", file=sys.stderr)
    print(f"  APP: {APP_NAME} v{APP_VERSION}", file=sys.stderr)
    print(f"  LOG_LEVEL: {LOG_LEVEL}", file=sys.stderr)
    print(f"  LOG_BASE: {LOG_BASE}", file=sys.stderr)
    print(f"  MAX_COMPOSITE_DIM: {MAX_COMPOSITE_DIM}", file=sys.stderr)
    print(f"  TOLERANCES: gap={DUALITY_GAP_TOL} bisect={BISECTION_TOL} "
          f"rank={RANK_TOL} pinv={PINV_TOL}", file=sys.stderr)
    print(f"  ARCHIVE: {RESULTS_DATABASE_URL}", file=sys.stderr)
    print(file=sys.stderr)
