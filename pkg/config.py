"""
Configuration settings for galband
"""

import os
from pathlib import Path


def _thread_cap() -> int:
    default = min(32, (os.cpu_count() or 1) + 4)
    raw = os.getenv("GALBAND_THREADS", "")
    try:
        value = int(raw)
    except ValueError:
        return default
    return max(1, min(default, value))


class Config:
    """Configuration class for the galband library and CLI"""

    # Project directories
    PROJECT_ROOT = Path(__file__).parent
    LOGS_DIR = Path(os.getenv("GALBAND_LOG_DIR", str(PROJECT_ROOT / "logs")))

    # File settings
    LOG_FILE = LOGS_DIR / "galband.log"

    # Processing settings
    MAX_WORKERS = _thread_cap()  # GALBAND_THREADS caps the pool
    TASK_TIMEOUT = 240  # seconds per verification criterion

    # Elliptic kernel
    TOL_ID = 1e-12
    EPS_POLE = 1e-8  # lattice-distance units

    # Floquet oracle
    ODE_METHOD = "DOP853"
    ODE_RTOL = 1e-10
    ODE_ATOL = 1e-12
    SCAN_POINTS_PER_UNIT = 2000
    SCAN_POINTS_MIN = 100
    SCAN_POINTS_CAP = 20000
    REFINE_POINTS = 16  # interior points per bracket per multisection round
    EDGE_TOL = 1e-10
    EDGE_MERGE_TOL = 1e-8
    TANGENCY_TOL = 1e-6
    TOL_DISC = 1e-6

    # QES catalog
    COLLOCATION_COND_MAX = 1e12
    ENERGY_DEDUP_TOL = 1e-9
    PARAMETER_TOL = 1e-9
    MIDBAND_FIT_FACTOR = 3  # collocation rows per unknown in mid-band fits
    QES_MAX_ORDER = 12  # largest closure n tried by the sector sweep

    # Grids
    POTENTIAL_GRID = 512
    RESIDUAL_GRID = 256
    PARTNER_GRID = 4096

    # SUSY
    PSI_FLOOR = 1e-12
    IDENTIFY_TOL = 1e-8

    # Logging configuration
    LOG_LEVEL = os.getenv("GALBAND_LOG_LEVEL", "INFO")
    LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Performance thresholds
    TARGET_SUITE_TIME = 300  # seconds for the full verification suite
    WARNING_THRESHOLD = 0.8
