"""
subcert Configuration Module
Environment settings and numerical defaults.
"""

from subcert.config.settings import (
    TOOL_NAME,
    REPORT_SCHEMA_VERSION,
    THREADS,
    RANK_TOL,
    SEED,
    LOG_LEVEL,
    DATA_DIR,
    CONFIG_FILE,
)
from subcert.config.defaults import (
    DEFAULT_CONFIG,
    get_config,
    save_config,
    update_config,
    validate_config,
    section,
)

__all__ = [
    "TOOL_NAME", "REPORT_SCHEMA_VERSION", "THREADS", "RANK_TOL", "SEED",
    "LOG_LEVEL", "DATA_DIR", "CONFIG_FILE",
    "DEFAULT_CONFIG", "get_config", "save_config", "update_config",
    "validate_config", "section",
]
