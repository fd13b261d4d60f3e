"""
Constant Search
Choose Λ_j, α_j and the part scales by doubling, each step validated by
sampled sub-inequalities, refine the per-operator constants c_p, then certify
the target lower bound

    1 + sum_p (Re q_p + c_p H_{Im q_p} g_p) >= c <X>^{2/(2m+1)}

on a sample region. Sampling is evidence, never a proof.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from subcert.config import section
from subcert.core.singular import positive_definiteness_check, system_tower
from subcert.core.symplectic import SystemOfForms, gram_matrices, japanese_bracket
from subcert.errors import InputError, NumericalFailure
from subcert.weights.assembly import FieldSample, WeightAssembly, WeightField, decompose

logger = logging.getLogger(__name__)

Predicate = Callable[[np.ndarray], np.ndarray]

# per-operator multipliers c_p tried on top of the global scales
OPERATOR_FACTORS = (0.25, 0.5, 1.0, 2.0, 4.0)


# ── Sample region ────────────────────────────────────────────────────────────


@dataclass
class RegionSample:
    points: np.ndarray
    radius_index: np.ndarray
    radii: np.ndarray


@dataclass
class SampleRegion:
    """Log-spaced radii times seeded unit directions (plus the ± axes), optionally filtered."""

    n: int
    radii: np.ndarray
    directions: int
    seed: int
    predicate: Optional[Predicate] = None

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        if self.radii.ndim != 1 or self.radii.size == 0 or np.any(self.radii <= 0):
            raise InputError("radii must be a non-empty list of positive numbers", kind="range")
        if self.directions < 0:
            raise InputError("directions must be >= 0", kind="range")

    @classmethod
    def default(
        cls,
        n: int,
        radii: Optional[int] = None,
        directions: Optional[int] = None,
        radius_min: Optional[float] = None,
        radius_max: Optional[float] = None,
        seed: Optional[int] = None,
    ) -> "SampleRegion":
        cfg = section("sampling")
        lo = float(cfg["radius_min"] if radius_min is None else radius_min)
        hi = float(cfg["radius_max"] if radius_max is None else radius_max)
        if not 0 < lo <= hi:
            raise InputError(f"Invalid radius range [{lo}, {hi}]", kind="range")
        count = int(cfg["radii"] if radii is None else radii)
        return cls(
            n=n,
            radii=np.geomspace(lo, hi, count),
            directions=int(cfg["directions"] if directions is None else directions),
            seed=int(cfg["seed"] if seed is None else seed),
        )

    def unit_directions(self) -> np.ndarray:
        dim = 2 * self.n
        rng = np.random.default_rng(self.seed)
        Z = rng.standard_normal((self.directions, dim))
        Z = Z / np.linalg.norm(Z, axis=1, keepdims=True)
        return np.vstack([np.eye(dim), -np.eye(dim), Z])

    def points(self) -> RegionSample:
        U = self.unit_directions()
        X = (self.radii[:, None, None] * U[None, :, :]).reshape(-1, 2 * self.n)
        idx = np.repeat(np.arange(self.radii.size), len(U))
        if self.predicate is not None:
            keep = np.asarray(self.predicate(X), dtype=bool)
            X, idx = X[keep], idx[keep]
        if len(X) == 0:
            raise NumericalFailure("The sample region contains no points", kind="empty_region")
        return RegionSample(X, idx, self.radii)

    def restricted(self, predicate: Predicate) -> "SampleRegion":
        outer = self.predicate
        if outer is None:
            combined = predicate
        else:
            def combined(X):
                return np.asarray(outer(X), dtype=bool) & np.asarray(predicate(X), dtype=bool)
        return SampleRegion(self.n, self.radii, self.directions, self.seed, combined)


# ── Reports ──────────────────────────────────────────────────────────────────


@dataclass
class SampleReport:
    """Both sides of a sampled inequality with their pointwise margins (>= 0 means it holds)."""

    name: str
    points: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    margins: np.ndarray
    fitted_constant: float
    claimed_constant: Optional[float] = None
    scaling: Dict[str, float] = field(default_factory=dict)
    scaling_ok: Optional[bool] = None

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margins)) if self.margins.size else 0.0

    @property
    def passed(self) -> bool:
        return self.min_margin >= 0.0

    @property
    def worst_point(self) -> Optional[np.ndarray]:
        if not self.margins.size:
            return None
        return self.points[int(np.argmin(self.margins))]

    def to_dict(self, include_points: bool = False) -> Dict[str, Any]:
        worst = self.worst_point
        data = {
            "name": self.name,
            "samples": int(self.margins.size),
            "passed": self.passed,
            "min_margin": self.min_margin,
            "fitted_constant": float(self.fitted_constant),
            "claimed_constant": self.claimed_constant,
            "scaling": {k: float(v) for k, v in self.scaling.items()},
            "scaling_ok": self.scaling_ok,
            "worst_point": None if worst is None else [float(v) for v in worst],
        }
        if include_points:
            data["points"] = self.points.tolist()
            data["lhs"] = self.lhs.tolist()
            data["rhs"] = self.rhs.tolist()
        return data


@dataclass
class SearchFailure:
    constant: str
    worst_point: Optional[List[float]]
    sub_inequality: str
    margin: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "constant": self.constant,
            "worst_point": self.worst_point,
            "sub_inequality": self.sub_inequality,
            "margin": self.margin,
        }


@dataclass
class SearchOutcome:
    success: bool
    m: int
    assembly: Optional[WeightAssembly] = None
    report: Optional[SampleReport] = None
    failure: Optional[SearchFailure] = None
    steps: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "success": self.success,
            "m": self.m,
            "assembly": None if self.assembly is None else self.assembly.to_dict(),
            "report": None if self.report is None else self.report.to_dict(),
            "failure": None if self.failure is None else self.failure.to_dict(),
            "steps": list(self.steps),
        }


# ── Helpers ──────────────────────────────────────────────────────────────────


def _as_list(X: np.ndarray) -> List[float]:
    return [float(v) for v in X]


def shell_minima(values: np.ndarray, radius_index: np.ndarray, radii: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per-radius minimum of values over the shells that hold samples."""
    present = np.unique(radius_index)
    minima = np.array([values[radius_index == i].min() for i in present])
    return radii[present], minima


def upper_half_slope(radii: np.ndarray, values: np.ndarray) -> Optional[float]:
    """Log-log slope of values against radii over the upper half of the shells."""
    keep = values > 0
    radii, values = radii[keep], values[keep]
    if radii.size < 4:
        return None
    half = radii.size // 2
    slope, _ = np.polyfit(np.log(radii[half:]), np.log(values[half:]), 1)
    return float(slope)


def _pd_witness(sys: SystemOfForms, m: int, radius: float) -> np.ndarray:
    total = sum(gram_matrices(sys, m))
    _, vectors = linalg.eigh((total + total.T) / 2.0, subset_by_index=[0, 0])
    return radius * vectors[:, 0]


def _doubling(
    label: str,
    start: float,
    max_doublings: int,
    check: Callable[[float], Tuple[np.ndarray, np.ndarray]],
    steps: List[Dict[str, Any]],
) -> Tuple[Optional[float], Optional[np.ndarray], float]:
    """Double a constant until check(value) has non-negative margins everywhere."""
    value = start
    worst, margin = None, -np.inf
    for _ in range(max_doublings + 1):
        margins, points = check(value)
        margin = float(np.min(margins)) if margins.size else 0.0
        steps.append({"constant": label, "value": value, "min_margin": margin})
        if margin >= 0.0:
            logger.debug("%s = %g accepted", label, value)
            return value, None, margin
        worst = points[int(np.argmin(margins))]
        value *= 2.0
    return None, worst, margin


# ── Constant search ──────────────────────────────────────────────────────────


def constant_search(
    sys: SystemOfForms,
    m: Optional[int] = None,
    region: Optional[SampleRegion] = None,
    *,
    epsilon: Optional[float] = None,
    max_doublings: Optional[int] = None,
    scale_exponents: Optional[Sequence[int]] = None,
    decay_slope: Optional[float] = None,
    require_pd: bool = True,
) -> SearchOutcome:
    """
    Search the constants of the weight assembly at level m.

    The order is: the level m-1 sub-assembly on Ω_1, then Λ_0, α_1, Λ_1, ...
    by doubling, then a grid over the two part scales. Success needs a
    positive sampled constant that does not decay across radius shells.
    """
    cfg = section("search")
    epsilon = float(cfg["epsilon"] if epsilon is None else epsilon)
    max_doublings = int(cfg["max_doublings"] if max_doublings is None else max_doublings)
    decay_slope = float(cfg["decay_slope"] if decay_slope is None else decay_slope)
    if scale_exponents is None:
        scale_exponents = range(int(cfg["scale_min_exp"]), int(cfg["scale_max_exp"]) + 1)
    scales = [2.0**e for e in scale_exponents]

    if m is None:
        tower, _ = system_tower(sys)
        m = max(tower.k0 or 1, 1)
    if m < 1:
        raise InputError(f"m must be >= 1, got {m}", kind="range")

    region = region or SampleRegion.default(sys.n)
    sample = region.points()
    X = sample.points
    steps: List[Dict[str, Any]] = []

    lam = positive_definiteness_check(sys, m)
    tol = section("tolerances")["psd"] * max(1.0, sys.scale)
    if require_pd and lam <= tol:
        witness = _pd_witness(sys, m, float(region.radii.max()))
        logger.warning("sum of r_k up to %d is not positive definite (λ_min = %.3g)", m, lam)
        return SearchOutcome(
            False, m,
            failure=SearchFailure(
                "c0", _as_list(witness),
                f"sum_{{k<={m}}} r_k(X) >= c0 |X|^2", lam,
            ),
            steps=steps,
        )
    c4 = max(lam, tol) / 2.0

    sub = None
    if m >= 2:
        G_m = gram_matrices(sys, m)[m]

        def omega1(Y, c4=c4):
            r_m = np.einsum("pi,ij,pj->p", Y, G_m, Y)
            return r_m < c4 * np.sum(Y**2, axis=1)

        try:
            sub_outcome = constant_search(
                sys, m - 1, region.restricted(omega1),
                epsilon=epsilon, max_doublings=max_doublings,
                scale_exponents=scale_exponents, decay_slope=decay_slope, require_pd=False,
            )
        except NumericalFailure as exc:
            if exc.kind != "empty_region":
                raise
            logger.info("Ω_1 holds no samples at level %d, default sub-assembly", m)
            sub = _default_sub(m - 1, c4)
        else:
            steps.extend({**s, "level": m - 1} for s in sub_outcome.steps)
            if not sub_outcome.success:
                return SearchOutcome(
                    False, m,
                    failure=SearchFailure(
                        f"sub-assembly (m={m - 1})",
                        sub_outcome.failure.worst_point if sub_outcome.failure else None,
                        sub_outcome.failure.sub_inequality if sub_outcome.failure else "",
                        sub_outcome.failure.margin if sub_outcome.failure else None,
                    ),
                    steps=steps,
                )
            sub = sub_outcome.assembly

    assembly = WeightAssembly(m, c4=c4 if m >= 2 else None, sub=sub)
    jb = japanese_bracket(X)
    slack = epsilon / max(m - 1, 1) * jb ** (2.0 / (2 * m + 1))

    for j in range(m - 1):
        if j >= 1:
            def alpha_check(value, j=j):
                trial = assembly.replace(alphas=_set(assembly.alphas, j - 1, value))
                s = WeightField(sys, trial).sample(X, with_weights=False)
                return _alpha_margins(s, trial, j, slack), X

            value, worst, margin = _doubling(f"alpha_{j}", 1.0, max_doublings, alpha_check, steps)
            if value is None:
                return _fail(m, f"alpha_{j}", worst, margin, steps,
                             f"sum_p |alpha_{j - 1} B2_{j - 1},p| <= (alpha_{j} good_{j} + later goods + sum Re q)/2 + eps <X>^s")
            assembly = assembly.replace(alphas=_set(assembly.alphas, j - 1, value))

        def lambda_check(value, j=j):
            trial = assembly.replace(lambdas=_set(assembly.lambdas, j, value))
            s = WeightField(sys, trial).sample(X, with_weights=False)
            return _lambda_margins(s, j, slack), X

        value, worst, margin = _doubling(f"Lambda_{j}", 1.0, max_doublings, lambda_check, steps)
        if value is None:
            return _fail(m, f"Lambda_{j}", worst, margin, steps,
                         f"sum_p (|B1_{j},p| + |B3_{j},p|) + |sum_p B4_{j},p - 2 good_{j}| <= good_{j}/2 + eps <X>^s")
        assembly = assembly.replace(lambdas=_set(assembly.lambdas, j, value))

    return _scale_scan(sys, assembly, sample, scales, decay_slope, steps)


def _set(values: Sequence[float], i: int, value: float) -> List[float]:
    out = list(values)
    out[i] = value
    return out


def _default_sub(m: int, c4: float) -> WeightAssembly:
    if m == 1:
        return WeightAssembly(1)
    return WeightAssembly(m, c4=c4, sub=_default_sub(m - 1, c4))


def _fail(m, constant, worst, margin, steps, inequality) -> SearchOutcome:
    logger.warning("constant search failed on %s (margin %.3g)", constant, margin)
    return SearchOutcome(
        False, m,
        failure=SearchFailure(constant, None if worst is None else _as_list(worst), inequality, margin),
        steps=steps,
    )


def _lambda_margins(s: FieldSample, j: int, slack: np.ndarray) -> np.ndarray:
    N = len(s.gtilde)
    lhs = np.zeros(len(s.points))
    drift = np.zeros(len(s.points))
    for p in range(N):
        t = decompose(s, j, p).terms
        lhs += np.abs(t["B1"]) + np.abs(t["B3"])
        drift += t["B4"]
    good = s.good[j].value
    lhs += np.abs(drift - 2.0 * good)
    return 0.5 * good + slack - lhs


def _alpha_margins(s: FieldSample, assembly: WeightAssembly, j: int, slack: np.ndarray) -> np.ndarray:
    N = len(s.gtilde)
    lhs = np.zeros(len(s.points))
    for p in range(N):
        lhs += np.abs(assembly.alpha(j - 1) * decompose(s, j - 1, p).terms["B2"])
    later = sum((s.good[i].value for i in range(j + 1, s.m - 1)), np.zeros(len(s.points)))
    rhs = 0.5 * (assembly.alpha(j) * s.good[j].value + later + s.re_sum) + slack
    return rhs - lhs


def _scale_scan(
    sys: SystemOfForms,
    assembly: WeightAssembly,
    sample,
    scales: Sequence[float],
    decay_slope: float,
    steps: List[Dict[str, Any]],
) -> SearchOutcome:
    m = assembly.m
    X = sample.points
    s = WeightField(sys, assembly).sample(X)
    base, main, chain = s.target_parts()
    weight = japanese_bracket(X) ** (2.0 / (2 * m + 1))

    chain_scales = scales if m >= 2 else [0.0]
    best = None
    for c_main in scales:
        for c_chain in chain_scales:
            ratio = (base + c_main * main + c_chain * chain) / weight
            low = float(ratio.min())
            if best is None or low > best[0]:
                best = (low, c_main, c_chain, ratio)
    low, c_main, c_chain, ratio = best
    steps.append({"constant": "scales", "value": [c_main, c_chain], "min_margin": low})

    base, mains, chains = s.operator_parts()
    parts = [c_main * mains[p] + c_chain * chains[p] for p in range(sys.N)]
    factors = [1.0] * sys.N
    for p in range(sys.N):
        for factor in OPERATOR_FACTORS:
            trial = ratio + (factor - factors[p]) * parts[p] / weight
            trial_low = float(trial.min())
            if trial_low > low:
                low, ratio, factors[p] = trial_low, trial, factor
    steps.append({"constant": "operator_constants", "value": list(factors), "min_margin": low})

    lhs = base + sum(factors[p] * parts[p] for p in range(sys.N))
    shell_r, shell_min = shell_minima(ratio, sample.radius_index, sample.radii)
    slope = upper_half_slope(shell_r, shell_min)
    decays = slope is not None and slope < -decay_slope
    c = 0.5 * low if low > 0 else 0.0

    report = SampleReport(
        name="target",
        points=X,
        lhs=lhs,
        rhs=weight,
        margins=lhs - c * weight if low > 0 else ratio,
        fitted_constant=low,
        claimed_constant=c,
        scaling={"shell_slope": slope if slope is not None else 0.0},
        scaling_ok=not decays,
    )
    final = assembly.replace(
        scales=(c_main, c_chain),
        c=c,
        operator_constants=factors,
    )
    if low <= 0.0 or decays:
        worst = X[int(np.argmin(ratio))]
        what = "shell decay of the sampled constant" if low > 0 else "non-positive sampled constant"
        logger.warning("target inequality fails at level %d: %s", m, what)
        return SearchOutcome(
            False, m, assembly=final, report=report,
            failure=SearchFailure(
                "c",
                _as_list(worst),
                f"1 + sum Re q_p + sum H_p g_p >= c <X>^(2/{2 * m + 1}) ({what})",
                low,
            ),
            steps=steps,
        )
    logger.info("level %d certified on samples: c = %.4g", m, c)
    return SearchOutcome(True, m, assembly=final, report=report, steps=steps)
