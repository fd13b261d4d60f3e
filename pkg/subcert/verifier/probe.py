"""
Estimate Probe
Best constant of the weighted lower bound

    c(D) = min over interior u of (sum_j ||q_j^w u||^2 + ||u||^2) / ||W u||^2

on truncated Hermite bases, tracked across truncation levels.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg

from subcert.config import section, settings
from subcert.core.symplectic import QuadraticForm, SystemOfForms
from subcert.errors import InputError, NumericalFailure
from subcert.quantization.hermite import Convention, HermiteBasis
from subcert.quantization.weyl import OperatorMatrix, quantize_form

logger = logging.getLogger(__name__)

TREND_STABLE = "stable"
TREND_DECAYING = "decaying"
MIN_GUARD = 2


@dataclass
class EstimateProbe:
    """A system, its k0 and the truncation levels to probe."""

    system: SystemOfForms
    k0: int
    levels: List[int] = field(default_factory=lambda: list(section("verifier")["levels"]))
    guard: int = MIN_GUARD
    exponent: Optional[float] = None

    def __post_init__(self):
        self.levels = [int(d) for d in self.levels]
        if not self.levels or any(d < 0 for d in self.levels):
            raise InputError("levels must be a non-empty list of non-negative integers", kind="range")
        if self.levels != sorted(set(self.levels)):
            raise InputError("levels must be strictly increasing", kind="range")
        if self.guard < MIN_GUARD:
            raise InputError(f"guard must be >= {MIN_GUARD}, got {self.guard}", kind="range")
        if self.k0 < 0:
            raise InputError(f"k0 must be >= 0, got {self.k0}", kind="range")

    @property
    def weight_exponent(self) -> float:
        return 1.0 / (2 * self.k0 + 1) if self.exponent is None else float(self.exponent)

    def with_exponent(self, s: float) -> "EstimateProbe":
        return EstimateProbe(self.system, self.k0, list(self.levels), self.guard, s)


@dataclass
class LevelConstant:
    level: int
    constant: float
    interior_dim: int
    vector: Optional[np.ndarray] = None
    basis: Optional[HermiteBasis] = None


@dataclass
class RayleighReport:
    """c(D) per level, its trend, and the witness at the largest level."""

    exponent: float
    levels: List[int]
    constants: List[float]
    trend: str
    witness: List[float]
    decay_ratio: float

    @property
    def decaying(self) -> bool:
        return self.trend == TREND_DECAYING

    def to_dict(self) -> Dict[str, Any]:
        return {
            "exponent": self.exponent,
            "levels": list(self.levels),
            "constants": [float(c) for c in self.constants],
            "trend": self.trend,
            "decay_ratio": self.decay_ratio,
            "witness_level_mass": [float(m) for m in self.witness],
        }


def weight_entries(levels: np.ndarray, n: int, exponent: float) -> np.ndarray:
    """(1 + 2|alpha| + n)^s."""
    return (1.0 + 2.0 * np.asarray(levels, dtype=float) + n) ** exponent


def build_weight_diag(k0: int, basis: HermiteBasis, exponent: Optional[float] = None) -> OperatorMatrix:
    """
    Diagonal proxy for (<X>^{2/(2k0+1)})^w: the power 1/(2k0+1) of 1 + the
    harmonic oscillator, by spectral calculus on the Hermite basis.
    """
    if basis.convention is not Convention.BODY:
        raise InputError("The weight proxy is defined in the body convention", kind="range")
    s = 1.0 / (2 * k0 + 1) if exponent is None else exponent
    return OperatorMatrix(basis, np.diag(weight_entries(basis.levels, basis.n, s)).astype(complex), band=0, guard=0)


def _level_constant(system: SystemOfForms, level: int, guard: int, exponent: float) -> LevelConstant:
    basis = HermiteBasis(system.n, level + guard)
    cols = np.flatnonzero(basis.levels <= level)
    if cols.size == 0:
        raise NumericalFailure(f"Empty interior at level {level}", kind="interior")

    L = np.eye(cols.size, dtype=complex)
    for q in system.forms:
        A = quantize_form(q, basis).matrix[:, cols]
        L += A.conj().T @ A
    L = (L + L.conj().T) / 2.0
    W2 = weight_entries(basis.levels[cols], system.n, 2.0 * exponent)

    try:
        values, vectors = linalg.eigh(L, np.diag(W2).astype(complex), subset_by_index=[0, 0])
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"Generalized eigensolve failed at level {level}: {exc}", kind="eigensolver") from exc

    c = float(values[0])
    logger.info("level %d: c = %.6g (interior dim %d)", level, c, cols.size)
    return LevelConstant(level, c, cols.size, vectors[:, 0], basis)


def level_mass_profile(vector: np.ndarray, basis: HermiteBasis, level: int) -> List[float]:
    """Fraction of ||u||^2 carried by each level 0..level."""
    cols = np.flatnonzero(basis.levels <= level)
    mass = np.abs(vector) ** 2
    total = float(mass.sum()) or 1.0
    lv = basis.levels[cols]
    return [float(mass[lv == k].sum() / total) for k in range(level + 1)]


def classify_trend(constants: Sequence[float], decay_ratio: float) -> str:
    """Decaying iff c(D_max) < ratio * c(D_min) and the sequence never increases."""
    c = list(constants)
    monotone = all(c[i + 1] <= c[i] * (1.0 + 1e-9) for i in range(len(c) - 1))
    if len(c) > 1 and monotone and c[-1] < decay_ratio * c[0]:
        return TREND_DECAYING
    return TREND_STABLE


def _constants(probe: EstimateProbe, exponent: float) -> List[LevelConstant]:
    workers = max(1, min(settings.THREADS, len(probe.levels)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_level_constant, probe.system, D, probe.guard, exponent) for D in probe.levels
        ]
        return [f.result() for f in futures]


def subellipticity_constant(probe: EstimateProbe, decay_ratio: Optional[float] = None) -> RayleighReport:
    """c(D) for every probe level with its trend classification."""
    decay_ratio = float(section("verifier")["decay_ratio"]) if decay_ratio is None else decay_ratio
    s = probe.weight_exponent
    results = _constants(probe, s)
    constants = [r.constant for r in results]
    last = results[-1]
    return RayleighReport(
        exponent=s,
        levels=list(probe.levels),
        constants=constants,
        trend=classify_trend(constants, decay_ratio),
        witness=level_mass_profile(last.vector, last.basis, last.level),
        decay_ratio=decay_ratio,
    )


def sharpness_scan(probe: EstimateProbe, exponents: Sequence[float]) -> List[RayleighReport]:
    """Repeat the probe with weight exponent s in place of 1/(2k0+1)."""
    reports = []
    for s in exponents:
        if not 0.0 <= s <= 1.0:
            raise InputError(f"Weight exponent {s} outside [0, 1]", kind="range")
        reports.append(subellipticity_constant(probe.with_exponent(s)))
    return reports


@dataclass
class MonotonicityReport:
    base: List[float]
    extended: List[float]

    @property
    def non_decreasing(self) -> bool:
        return all(e >= b * (1.0 - 1e-9) for b, e in zip(self.base, self.extended))


def system_monotonicity(probe: EstimateProbe, extra_form: QuadraticForm) -> MonotonicityReport:
    """c(D) for the system and for the system with one more operator."""
    extended = EstimateProbe(
        probe.system.with_form(extra_form), probe.k0, list(probe.levels), probe.guard, probe.exponent
    )
    s = probe.weight_exponent
    return MonotonicityReport(
        base=[r.constant for r in _constants(probe, s)],
        extended=[r.constant for r in _constants(extended, s)],
    )
