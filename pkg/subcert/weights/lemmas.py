"""
Lemma Sampler
Sampled evidence for the auxiliary inequalities of the weight construction.

Plain lemmas are sampled on a SampleRegion. Λ-dependent lemmas are sampled
on points adapted to their region {Λ r_{k-1} ≲ r_k^{(2k-1)/(2k+1)}}, and the
fitted constants at Λ and 4Λ are compared with the predicted power of Λ.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from subcert.config import section
from subcert.core.singular import kernel, system_tower
from subcert.core.symplectic import SystemOfForms, gram_matrices
from subcert.errors import InputError, NumericalFailure
from subcert.weights.assembly import Bracketed, WeightAssembly, WeightField
from subcert.weights.cutoffs import PSI
from subcert.weights.search import SampleRegion, SampleReport, shell_minima, upper_half_slope

logger = logging.getLogger(__name__)

EXACT_SLACK = 1e-10
FIT_FLOOR = 1e-9
LAMBDAS = (1.0, 4.0, 16.0)
THETAS = (1.2, 1.4, 1.6, 1.8)
EDGE_SLOPE = 0.25


@dataclass(frozen=True)
class LemmaSpec:
    """One catalogued inequality: lhs <= C rhs."""

    name: str
    description: str
    claimed: Optional[float] = None
    lambda_power: Optional[float] = None

    @property
    def adapted(self) -> bool:
        return self.lambda_power is not None


LEMMAS: Dict[str, LemmaSpec] = {
    spec.name: spec
    for spec in (
        LemmaSpec("cauchy_schwarz", "|r~_{k+1,p}| <= (r_k r_{k+1})^(1/2)", claimed=1.0),
        LemmaSpec("gradient_bound", "|grad r_k|^2 <= 4 ||G_k|| r_k", claimed=1.0),
        LemmaSpec("edge_bracket", "|H_p W~0| <~ <X>^(2/(2m+1))"),
        LemmaSpec("bracket_quotient", "|r~_{k,p} H_p r_k^(-2k/(2k+1))| <~ Λ^(-1/2) r_k^(1/(2k+1))", lambda_power=-0.5),
        LemmaSpec("commutator_deviation", "|sum_p 2 X.G_{k-1} F_p^2 X| r_k^(-2k/(2k+1)) <~ Λ^(-1/2) r_k^(1/(2k+1))", lambda_power=-0.5),
        LemmaSpec("cutoff_bracket", "|H_p Ψ_j| <~ Λ^(1/2) r_k^(1/(2k+1))", lambda_power=0.5),
        LemmaSpec("power_bracket", "|H_p r_k| <= 4 (r_k r_{k+1})^(1/2)", claimed=4.0, lambda_power=0.0),
    )
}


def _fit(lhs: np.ndarray, rhs: np.ndarray, floor: np.ndarray) -> float:
    usable = rhs > floor
    if not np.any(usable):
        return 0.0
    return float(np.max(lhs[usable] / rhs[usable]))


def _margins(lhs: np.ndarray, rhs: np.ndarray, floor: np.ndarray, constant: float) -> np.ndarray:
    return constant * (1.0 + EXACT_SLACK) * rhs + floor - lhs


# ── Plain lemmas ─────────────────────────────────────────────────────────────


def _cauchy_schwarz(s, m, N, floor2):
    lhs, rhs, floors = [], [], []
    for k in range(m):
        bound = np.sqrt(np.maximum(s.r[k].value * s.r[k + 1].value, 0.0))
        for p in range(N):
            lhs.append(np.abs(s.rt[(k + 1, p)].value))
            rhs.append(bound)
            floors.append(floor2)
    return lhs, rhs, floors


def _gradient_bound(X, grams, floor2):
    lhs, rhs, floors = [], [], []
    for G in grams:
        grad = 2.0 * X @ G
        value = np.einsum("pi,ij,pj->p", X, G, X)
        lhs.append(np.sum(grad**2, axis=1))
        rhs.append(4.0 * np.linalg.norm(G, 2) * value)
        floors.append(floor2 * max(1.0, np.linalg.norm(G, 2)) ** 2)
    return lhs, rhs, floors


def _plain(spec: LemmaSpec, sys: SystemOfForms, assembly: WeightAssembly, region: SampleRegion) -> SampleReport:
    sample = region.points()
    X = sample.points
    field_ = WeightField(sys, assembly)
    s = field_.sample(X, with_weights=False)
    m, N = assembly.m, sys.N
    floor2 = FIT_FLOOR * max(1.0, sys.scale) ** 2 * np.sum(X**2, axis=1)

    if spec.name == "cauchy_schwarz":
        lhs, rhs, floors = _cauchy_schwarz(s, m, N, floor2)
    elif spec.name == "gradient_bound":
        lhs, rhs, floors = _gradient_bound(X, field_.grams, floor2)
    else:
        weight = s.japanese ** (2.0 / (2 * m + 1))
        edge = np.max(np.abs(s.wt0.bracket), axis=0)
        fitted = edge / weight
        radii, per_shell = shell_minima(-fitted, sample.radius_index, sample.radii)
        slope = upper_half_slope(radii, -per_shell)
        constant = float(fitted.max()) if fitted.size else 0.0
        return SampleReport(
            name=spec.name,
            points=X,
            lhs=edge,
            rhs=weight,
            margins=constant * (1.0 + EXACT_SLACK) * weight - edge,
            fitted_constant=constant,
            scaling={"shell_slope": 0.0 if slope is None else slope},
            scaling_ok=slope is None or slope <= EDGE_SLOPE,
        )

    lhs, rhs, floors = (np.concatenate(v) for v in (lhs, rhs, floors))
    points = np.tile(X, (len(lhs) // len(X), 1))
    fitted = _fit(lhs, rhs, floors)
    return SampleReport(
        name=spec.name,
        points=points,
        lhs=lhs,
        rhs=rhs,
        margins=_margins(lhs, rhs, floors, spec.claimed),
        fitted_constant=fitted,
        claimed_constant=spec.claimed,
    )


# ── Adapted points ───────────────────────────────────────────────────────────


def _range_basis(G: np.ndarray, tol: float) -> np.ndarray:
    return linalg.orth(G, rcond=tol)


def adapted_points(
    sys: SystemOfForms,
    k: int,
    region: SampleRegion,
    lambdas: Sequence[float] = LAMBDAS,
    thetas: Sequence[float] = THETAS,
    slack: Optional[float] = None,
) -> Dict[float, np.ndarray]:
    """
    X = X_⊥ + τ X_∥ with X_⊥ in Ker G_{k-1}, X_∥ a unit vector of its range
    and τ = τ_0 Λ^(-1/2), τ_0 chosen so that Λ r_{k-1} = θ r_k^b at X_⊥.
    """
    if k < 1:
        raise InputError(f"Adapted points need k >= 1, got {k}", kind="range")
    slack = float(section("sampling")["region_slack"] if slack is None else slack)
    tol = section("tolerances")["rank"]
    grams = gram_matrices(sys, k)
    G_prev, G_k = grams[k - 1], grams[k]
    null = kernel(G_prev, tol=tol, space=sys.space).basis.T
    rng_basis = _range_basis(G_prev, tol)
    if null.shape[0] == 0 or rng_basis.shape[1] == 0:
        raise NumericalFailure(f"No adapted points at k = {k}: degenerate kernel of G_{k - 1}", kind="empty_region")

    b = (2 * k - 1) / (2 * k + 1)
    gen = np.random.default_rng(region.seed)
    count = max(region.directions, 1)
    u = gen.standard_normal((count, null.shape[0]))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    v = gen.standard_normal((count, rng_basis.shape[1]))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    perp_dirs = u @ null
    par = v @ rng_basis.T

    def quad(A, Y):
        return np.einsum("pi,ij,pj->p", Y, A, Y)

    out: Dict[float, np.ndarray] = {}
    for lam in lambdas:
        blocks = []
        for R in region.radii:
            perp = R * perp_dirs
            rk = quad(G_k, perp)
            rprev_par = quad(G_prev, par)
            ok = (rk > FIT_FLOOR * R**2) & (rprev_par > 0)
            if not np.any(ok):
                continue
            for theta in thetas:
                tau0 = np.sqrt(theta * rk[ok] ** b / rprev_par[ok])
                blocks.append(perp[ok] + (tau0 / np.sqrt(lam))[:, None] * par[ok])
        if not blocks:
            raise NumericalFailure(f"No adapted points at k = {k}", kind="empty_region")
        Y = np.vstack(blocks)
        r_prev, r_k = quad(G_prev, Y), quad(G_k, Y)
        keep = (r_k > 0) & (lam * r_prev <= 2.0 * slack * np.maximum(r_k, 0.0) ** b)
        if region.predicate is not None:
            keep &= np.asarray(region.predicate(Y), dtype=bool)
        if not np.any(keep):
            raise NumericalFailure(f"No adapted points at k = {k}, Λ = {lam}", kind="empty_region")
        out[lam] = Y[keep]
    return out


def _adapted_sides(name: str, sys: SystemOfForms, s, k: int, lam: float) -> Tuple[np.ndarray, np.ndarray]:
    N = sys.N
    rk = s.r[k]
    target = rk.power(1.0 / (2 * k + 1)).value
    if name == "bracket_quotient":
        inv = rk.power(-2 * k / (2 * k + 1))
        lhs = np.max([np.abs(s.rt[(k, p)].value * inv.along(p)) for p in range(N)], axis=0)
        return lhs, target
    if name == "commutator_deviation":
        G_prev = gram_matrices(sys, k - 1)[k - 1]
        X = s.points
        dev = sum(
            2.0 * np.einsum("pi,ij,pj->p", X, G_prev, X @ (F @ F).T) for F in sys.im_maps
        )
        return np.abs(dev) * rk.power(-2 * k / (2 * k + 1)).value, target
    if name == "cutoff_bracket":
        b = (2 * k - 1) / (2 * k + 1)
        psi = (Bracketed.quotient(s.r[k - 1], rk, b) * lam).compose(PSI)
        return np.max(np.abs(psi.bracket), axis=0), target
    # power_bracket
    lhs = np.max(np.abs(rk.bracket), axis=0)
    return lhs, np.sqrt(np.maximum(rk.value * s.r[k + 1].value, 0.0))


def _adapted(
    spec: LemmaSpec,
    sys: SystemOfForms,
    assembly: WeightAssembly,
    region: SampleRegion,
    j: int,
    lambdas: Sequence[float],
) -> SampleReport:
    m = assembly.m
    if m < 2 or not 0 <= j <= m - 2:
        raise InputError(f"Lemma {spec.name} needs m >= 2 and j in 0..{m - 2}", kind="range")
    k = m - j - 1
    grouped = adapted_points(sys, k, region, lambdas)
    field_ = WeightField(sys, WeightAssembly(max(m, k + 1)))

    points: List[np.ndarray] = []
    lhs_all: List[np.ndarray] = []
    rhs_all: List[np.ndarray] = []
    fitted: Dict[float, float] = {}
    for lam, Y in grouped.items():
        s = field_.sample(Y, with_weights=False)
        lhs, rhs = _adapted_sides(spec.name, sys, s, k, lam)
        floor = FIT_FLOOR * np.max(rhs) if rhs.size else 0.0
        fitted[lam] = _fit(lhs, rhs, np.full_like(rhs, floor))
        points.append(Y)
        lhs_all.append(lhs)
        rhs_all.append(rhs)

    ordered = sorted(fitted)
    scaling_ok = True
    for lo in ordered:
        hi = 4.0 * lo
        if hi not in fitted or fitted[lo] <= 0:
            continue
        predicted = 4.0**spec.lambda_power
        observed = fitted[hi] / fitted[lo]
        if not predicted / 2.0 <= observed <= predicted * 2.0:
            logger.warning("%s: fitted ratio %.3g at Λ=%g vs predicted %.3g", spec.name, observed, hi, predicted)
            scaling_ok = False

    lhs = np.concatenate(lhs_all)
    rhs = np.concatenate(rhs_all)
    constant = spec.claimed if spec.claimed is not None else max(fitted.values())
    floor = FIT_FLOOR * float(np.max(rhs)) if rhs.size else 0.0
    return SampleReport(
        name=spec.name,
        points=np.vstack(points),
        lhs=lhs,
        rhs=rhs,
        margins=_margins(lhs, rhs, np.full_like(rhs, floor), constant),
        fitted_constant=max(fitted.values()),
        claimed_constant=spec.claimed,
        scaling={f"lambda={lam:g}": value for lam, value in fitted.items()},
        scaling_ok=scaling_ok,
    )


# ── Entry point ──────────────────────────────────────────────────────────────


def lemma_sampler(
    lemma_id: str,
    sys: SystemOfForms,
    region: Optional[SampleRegion] = None,
    assembly: Optional[WeightAssembly] = None,
    j: int = 0,
    lambdas: Sequence[float] = LAMBDAS,
) -> SampleReport:
    """Sample one catalogued inequality and report its fitted constant and margins."""
    if lemma_id not in LEMMAS:
        raise InputError(f"Unknown lemma '{lemma_id}' (choose from {', '.join(sorted(LEMMAS))})", kind="range")
    spec = LEMMAS[lemma_id]
    if assembly is None:
        tower, _ = system_tower(sys)
        assembly = WeightAssembly(max(tower.k0 or 1, 1))
    region = region or SampleRegion.default(sys.n)
    logger.debug("sampling %s at m = %d", lemma_id, assembly.m)
    if spec.adapted:
        return _adapted(spec, sys, assembly, region, j, lambdas)
    return _plain(spec, sys, assembly, region)


def lemma_catalogue() -> List[Dict[str, object]]:
    return [
        {"name": s.name, "description": s.description, "claimed": s.claimed, "lambda_power": s.lambda_power}
        for s in LEMMAS.values()
    ]
