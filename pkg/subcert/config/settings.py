"""
subcert Settings
Core configuration values read from the environment.
"""

import os

import psutil

# Tool Identity
TOOL_NAME = "subcert"
REPORT_SCHEMA_VERSION = 1


def _default_threads() -> int:
    cores = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    return max(1, int(cores))


# Parallelism (verifier levels, sampling passes)
THREADS = max(1, int(os.environ.get("SUBCERT_THREADS", str(_default_threads()))))

# Numerical policy
RANK_TOL = float(os.environ.get("SUBCERT_TOL", "1e-10"))
SEED = int(os.environ.get("SUBCERT_SEED", "20240601"))

# Logging
LOG_LEVEL = os.environ.get("SUBCERT_LOG_LEVEL", "WARNING")

# Data Directories
DATA_DIR = os.environ.get("SUBCERT_DATA_DIR", os.path.expanduser("~/.subcert"))
CONFIG_FILE = os.environ.get("SUBCERT_CONFIG", os.path.join(DATA_DIR, "config.yaml"))
