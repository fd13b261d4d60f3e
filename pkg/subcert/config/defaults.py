"""
subcert Default Configuration
Default numerical parameters and YAML override management.
"""

import copy
import logging
import os
from typing import Any, Dict, Optional, Tuple

import yaml

from subcert.config import settings

logger = logging.getLogger(__name__)

DEFAULT_CONFIG: Dict[str, Any] = {
    "tolerances": {
        "rank": 1e-10,
        "hamilton": 1e-12,
        "psd": 1e-10,
    },
    "tower": {
        "kmax": None,  # None -> 2n
    },
    "ellipticity": {
        "samples_per_dim2": 10,
        "descent_steps": 50,
    },
    "sampling": {
        "radii": 24,
        "directions": 128,
        "radius_min": 1.0,
        "radius_max": 1000.0,
        "seed": 20240601,
        "region_slack": 4.0,
    },
    "search": {
        "max_doublings": 24,
        "epsilon": 0.1,
        "scale_min_exp": -8,
        "scale_max_exp": 8,
        "decay_slope": 0.25,
    },
    "verifier": {
        "levels": [8, 16, 24, 32],
        "guard": 2,
        "decay_ratio": 0.5,
    },
    "report": {
        "format": "text",
        "timings": False,
    },
}


# (path, mtime) -> merged config of the last override file read
_CACHE: Dict[Tuple[str, int], Dict[str, Any]] = {}


def _positive_leaves(config: Dict[str, Any], path: str = "") -> Optional[str]:
    for key, value in config.items():
        where = f"{path}.{key}" if path else key
        if isinstance(value, dict):
            err = _positive_leaves(value, where)
            if err:
                return err
        elif isinstance(value, bool) or value is None or isinstance(value, (str, list)):
            continue
        elif isinstance(value, (int, float)):
            if where.endswith("_exp"):
                continue
            if value <= 0:
                return f"Non-positive value for {where}: {value}"
        else:
            return f"Unsupported value type for {where}: {type(value).__name__}"
    return None


def validate_config(config_data: Dict[str, Any]) -> Tuple[bool, str]:
    """
    Validate a configuration override.
    Returns (is_valid, error_message).
    """
    if not isinstance(config_data, dict):
        return False, "Configuration must be a mapping"

    for section, value in config_data.items():
        if section not in DEFAULT_CONFIG:
            return False, f"Unknown section: {section}"
        if not isinstance(value, dict):
            return False, f"Section {section} must be a mapping"
        for key in value:
            if key not in DEFAULT_CONFIG[section]:
                return False, f"Unknown key: {section}.{key}"

    err = _positive_leaves(config_data)
    if err:
        return False, err

    levels = config_data.get("verifier", {}).get("levels")
    if levels is not None:
        if not levels or any(int(d) <= 0 for d in levels):
            return False, "verifier.levels must be a non-empty list of positive integers"
        if list(levels) != sorted(set(levels)):
            return False, "verifier.levels must be strictly increasing"

    search = config_data.get("search", {})
    lo = search.get("scale_min_exp", DEFAULT_CONFIG["search"]["scale_min_exp"])
    hi = search.get("scale_max_exp", DEFAULT_CONFIG["search"]["scale_max_exp"])
    if lo > hi:
        return False, "search.scale_min_exp exceeds search.scale_max_exp"

    return True, ""


def get_config(path: Optional[str] = None) -> Dict[str, Any]:
    """Load the YAML override file, if any, merged over the defaults."""
    path = path or settings.CONFIG_FILE
    merged = copy.deepcopy(DEFAULT_CONFIG)
    merged["tolerances"]["rank"] = settings.RANK_TOL
    merged["sampling"]["seed"] = settings.SEED

    try:
        stamp = (path, os.stat(path).st_mtime_ns)
    except OSError:
        return merged

    if stamp in _CACHE:
        return copy.deepcopy(_CACHE[stamp])

    try:
        with open(path, "r", encoding="utf-8") as f:
            override = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as exc:
        logger.warning("Ignoring unreadable config %s: %s", path, exc)
        override = {}

    is_valid, error = validate_config(override)
    if is_valid:
        _deep_merge(merged, override)
    else:
        logger.warning("Ignoring invalid config %s: %s", path, error)

    _CACHE.clear()
    _CACHE[stamp] = copy.deepcopy(merged)
    return merged


def save_config(config: Dict[str, Any], path: Optional[str] = None) -> None:
    """Write an override file atomically."""
    path = path or settings.CONFIG_FILE
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        yaml.safe_dump(config, f, sort_keys=True)
    os.replace(tmp, path)


def update_config(key_path: str, value: Any, path: Optional[str] = None) -> Dict[str, Any]:
    """
    Update a single override by dot-separated path.

    Example: update_config("verifier.guard", 4)
    """
    path = path or settings.CONFIG_FILE
    override: Dict[str, Any] = {}
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as f:
            override = yaml.safe_load(f) or {}

    keys = key_path.split(".")
    current = override
    for key in keys[:-1]:
        current = current.setdefault(key, {})
    current[keys[-1]] = value

    is_valid, error = validate_config(override)
    if not is_valid:
        raise ValueError(error)

    save_config(override, path)
    return get_config(path)


def section(name: str) -> Dict[str, Any]:
    """Shortcut for one section of the active configuration."""
    return get_config()[name]


def _deep_merge(base: dict, override: dict) -> None:
    """Deep merge override into base."""
    for key, value in override.items():
        if key in base and isinstance(base[key], dict) and isinstance(value, dict):
            _deep_merge(base[key], value)
        else:
            base[key] = value
