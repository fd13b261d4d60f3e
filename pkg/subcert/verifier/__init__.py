"""
subcert Verifier Module
Rayleigh-quotient probes of the weighted lower bound on truncated bases.
"""

from subcert.verifier.probe import (
    EstimateProbe,
    RayleighReport,
    MonotonicityReport,
    TREND_STABLE,
    TREND_DECAYING,
    build_weight_diag,
    weight_entries,
    subellipticity_constant,
    sharpness_scan,
    system_monotonicity,
    classify_trend,
    level_mass_profile,
)

__all__ = [
    "EstimateProbe", "RayleighReport", "MonotonicityReport", "TREND_STABLE",
    "TREND_DECAYING", "build_weight_diag", "weight_entries",
    "subellipticity_constant", "sharpness_scan", "system_monotonicity",
    "classify_trend", "level_mass_profile",
]
