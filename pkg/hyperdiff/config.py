import os
from dotenv import load_dotenv

load_dotenv()


def _env_int(name, default):
    value = os.getenv(f"HYPERDIFF_{name}")
    return int(value) if value not in (None, "") else default


def _env_flag(name, default):
    value = os.getenv(f"HYPERDIFF_{name}")
    if value in (None, ""):
        return default
    return value.strip().lower() in ("1", "true", "yes", "on")


# Application constants
APP_TITLE = "Hyperdiff - Differential Identity Report"
APP_ICON = "∂"
APP_DESCRIPTION = "Differentials as algebraic objects, checked against exact infinitesimal jets"

# Hyperreal arithmetic
DEFAULT_TRUNC = _env_int("TRUNC", 8)
MIN_TRUNC = 3

# Differential / derivative guards
MAX_DIFFERENTIAL_ORDER = _env_int("MAX_DIFFERENTIAL_ORDER", 6)
MAX_DERIVATIVE_ORDER = _env_int("MAX_DERIVATIVE_ORDER", 4)

# Random jet assignments
DEFAULT_SEED = _env_int("SEED", 2024)
DEFAULT_ASSIGNMENT_COUNT = _env_int("COUNT", 5)
JET_MAX_DEGREE = _env_int("JET_MAX_DEGREE", 4)
JET_COEFF_RANGE = _env_int("JET_COEFF_RANGE", 3)
JET_RESAMPLE_LIMIT = _env_int("JET_RESAMPLE_LIMIT", 50)

# Runtime behaviour
LOG_LEVEL = os.getenv("HYPERDIFF_LOG_LEVEL", "WARNING")
SHOW_PROGRESS = _env_flag("SHOW_PROGRESS", False)
PARALLEL_ASSIGNMENTS = _env_flag("PARALLEL_ASSIGNMENTS", True)

# UI settings
DEFAULT_UI_COUNT = 3
VERDICT_COLORS = {
    "pass": "green",
    "expected-fail": "orange",
    "FAIL": "red",
}

# Parser guards
MAX_EXPONENT = _env_int("MAX_EXPONENT", 32)
