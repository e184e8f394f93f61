"""
Configuration settings for the worst-class error toolkit.
"""
import os
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import load_dotenv

# Project root directory
PROJECT_ROOT = Path(__file__).parent.parent.parent

# Pick up IMB_SEED / IMB_JOBS from a local .env if present
load_dotenv(PROJECT_ROOT / ".env")

# Data directories
DATA_DIR = PROJECT_ROOT / "data"
RESULTS_DIR = DATA_DIR / "results"
LOGS_DIR = DATA_DIR / "logs"

# Application logger name; modules log to dotted children of it
LOGGER_NAME = "worst_class_evt"

# Supported class-conditional families
FAMILIES: List[str] = ["uniform", "gaussian", "laplace", "frechet"]

# Accepted spellings for each family
FAMILY_ALIASES: Dict[str, str] = {
    "uniform": "uniform",
    "unif": "uniform",
    "gaussian": "gaussian",
    "normal": "gaussian",
    "gauss": "gaussian",
    "laplace": "laplace",
    "frechet": "frechet",
    "fréchet": "frechet",
    "twosidedfrechet": "frechet",
    "two_sided_frechet": "frechet",
}

# Figure presets reachable through `reproduce`
REPRODUCE_TARGETS: List[str] = ["fig1", "fig3", "fig4"]

# Classifiers available to experiment campaigns
CLASSIFIERS: List[str] = ["hard-svm", "soft-svm", "logistic"]

# Solver defaults
DEFAULT_SVM_TOL = 1e-10
DEFAULT_HARD_MARGIN_C = 1e8
DEFAULT_SOFT_MARGIN_C = 1.0
DEFAULT_MAX_PAIR_UPDATES = 10_000_000
DEFAULT_LOGISTIC_STEPS = 2000
DEFAULT_LOGISTIC_STEP_SIZE = 0.5

# Data generation defaults
DEFAULT_EPSILON = 0.1
DEFAULT_FRECHET_ALPHA = 2.0
UNIFORM_HALF_WIDTH = 0.5
DEFAULT_TEST_POINTS = 100_000
FIG1_TEST_POINTS = 1_000_000
FIG1_GRID_SIZE = 12

# Monte Carlo defaults
DEFAULT_THEOREM_TRIALS = 2000
DEFAULT_FIG1_TRIALS = 500
DEFAULT_GRID_TRIALS = 100
WILSON_CONFIDENCE = 0.99
DEFAULT_KS_THRESHOLD = 0.05
QUADRATURE_ABS_TOL = 1e-12

# Seeding
DEFAULT_SEED = 0
SEED_ENV_VAR = "IMB_SEED"
JOBS_ENV_VAR = "IMB_JOBS"

# CSV layout shared by every campaign
RESULT_CSV_HEADER: List[str] = [
    "kind", "family", "classifier", "dim", "mu", "n", "beta",
    "stat", "mean", "std", "trials", "failures",
]


def env_seed() -> Optional[int]:
    """
    Seed fallback from the IMB_SEED environment variable.

    Returns:
        The integer seed, or None when the variable is unset

    Raises:
        ValueError: If the variable is set but is not an integer
    """
    raw = os.getenv(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def default_jobs() -> int:
    """
    Worker count: IMB_JOBS if set, else the available CPU count.

    Raises:
        ValueError: If the variable is set but is not an integer
    """
    raw = os.getenv(JOBS_ENV_VAR)
    if raw and raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"{JOBS_ENV_VAR} must be an integer, got {raw!r}")
    return max(1, os.cpu_count() or 1)
