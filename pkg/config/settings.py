"""
Runtime settings for attachlab
Reads the environment (and an optional .env file) and sets up logging
"""

import logging
import math
import os
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

# Algorithm defaults; every one of them can be overridden per call.
DEFAULT_A = 10.0
DEFAULT_C = 20.0
DEFAULT_CUTOFF = 0.25
DEFAULT_POSA_BUDGET = 10**6
DEFAULT_STALL_FACTOR = 5
CROSS_CHECK_LIMIT = 2000
HELD_KARP_LIMIT = 24
EXHAUSTIVE_PATH_LIMIT = 20

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def get_threads() -> int:
    """Worker count for Monte Carlo trials (ATTACHLAB_THREADS, else all cores)."""
    raw = os.getenv("ATTACHLAB_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        threads = int(raw)
    except ValueError:
        raise ValueError(f"ATTACHLAB_THREADS must be an integer, got {raw!r}")
    if threads < 1:
        raise ValueError(f"ATTACHLAB_THREADS must be at least 1, got {threads}")
    return threads


def get_results_dir() -> str:
    return os.getenv("ATTACHLAB_RESULTS_DIR", "./results")


def default_omega(n: int) -> int:
    """omega = ceil(log n), never below 1."""
    return max(1, math.ceil(math.log(n))) if n > 1 else 1


def configure_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> None:
    """Install the stream handler (and a file handler when ATTACHLAB_LOG_FILE is set)."""
    level = level or os.getenv("ATTACHLAB_LOG_LEVEL", "INFO")
    log_file = log_file or os.getenv("ATTACHLAB_LOG_FILE")

    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file, mode="a"))

    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, handlers=handlers, force=True)
