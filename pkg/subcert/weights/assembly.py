"""
Weight Assembly
Pointwise evaluation of the weight functions g_p and of their brackets
H_{Im q_p} g_p by exact chain rule.

Every intermediate quantity is carried as a Bracketed value: its values at P
sample points together with its Hamilton derivatives along all N imaginary
parts, so products, powers and cutoff compositions stay exact.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from subcert.core.symplectic import (
    QuadraticForm,
    SystemOfForms,
    gram_matrices,
    hamilton_vector_field,
    japanese_bracket,
    rtilde_matrix,
)
from subcert.errors import InputError, NumericalFailure
from subcert.weights.cutoffs import PSI, W1, W2, CutoffSpec

logger = logging.getLogger(__name__)

SUM_CHECK_TOL = 1e-9
FD_STEP = 1e-4


# ── Bracketed values ─────────────────────────────────────────────────────────


@dataclass
class Bracketed:
    """Values (P,) of a function and its brackets (N, P) along H_{Im q_p}."""

    value: np.ndarray
    bracket: np.ndarray

    @classmethod
    def constant(cls, value: float, N: int, P: int) -> "Bracketed":
        return cls(np.full(P, float(value)), np.zeros((N, P)))

    def _lift(self, other: Union["Bracketed", float]) -> "Bracketed":
        if isinstance(other, Bracketed):
            return other
        return Bracketed(np.full_like(self.value, float(other)), np.zeros_like(self.bracket))

    def __add__(self, other):
        other = self._lift(other)
        return Bracketed(self.value + other.value, self.bracket + other.bracket)

    __radd__ = __add__

    def __neg__(self):
        return Bracketed(-self.value, -self.bracket)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Bracketed):
            return Bracketed(self.value * float(other), self.bracket * float(other))
        return Bracketed(
            self.value * other.value,
            self.bracket * other.value + self.value * other.bracket,
        )

    __rmul__ = __mul__

    def power(self, e: float) -> "Bracketed":
        """value^e, set to zero (with zero bracket) where value <= 0."""
        pos = self.value > 0
        base = np.where(pos, self.value, 1.0)
        value = np.where(pos, base**e, 0.0)
        slope = np.where(pos, e * base ** (e - 1.0), 0.0)
        return Bracketed(value, slope * self.bracket)

    def compose(self, cutoff: CutoffSpec) -> "Bracketed":
        value, deriv = cutoff(self.value)
        return Bracketed(value, deriv * np.nan_to_num(self.bracket, nan=0.0, posinf=0.0, neginf=0.0))

    @classmethod
    def quotient(cls, num: "Bracketed", den: "Bracketed", b: float) -> "Bracketed":
        """num / den^b, +inf where den <= 0 < num and 0 where both vanish; no bracket there."""
        pos = den.value > 0
        base = np.where(pos, den.value, 1.0)
        inv = base ** (-b)
        value = np.where(pos, num.value * inv, np.where(num.value > 0, np.inf, 0.0))
        bracket = num.bracket * inv - b * num.value * base ** (-b - 1.0) * den.bracket
        return cls(value, np.where(pos, bracket, 0.0))

    def along(self, p: int) -> np.ndarray:
        return self.bracket[p]


# ── Assembly ─────────────────────────────────────────────────────────────────


@dataclass
class WeightAssembly:
    """
    Constants of the weight construction at level m.

    lambdas: Λ_0..Λ_{m-2}; alphas: α_1..α_{m-2}; scales: multipliers of the
    main part G and of the chain part 𝔭; c: the certified lower-bound constant;
    operator_constants: c_p multiplying g_p (empty means all ones);
    sub: the level m-1 assembly used on Ω_1.
    """

    m: int
    lambdas: List[float] = field(default_factory=list)
    alphas: List[float] = field(default_factory=list)
    scales: Tuple[float, float] = (1.0, 1.0)
    c: float = 0.0
    operator_constants: List[float] = field(default_factory=list)
    c4: Optional[float] = None
    sub: Optional["WeightAssembly"] = None

    def __post_init__(self):
        if self.m < 1:
            raise InputError(f"m must be >= 1, got {self.m}", kind="range")
        if not self.lambdas:
            self.lambdas = [1.0] * (self.m - 1)
        if not self.alphas:
            self.alphas = [1.0] * max(self.m - 2, 0)
        if len(self.lambdas) != self.m - 1:
            raise InputError(f"Expected {self.m - 1} Λ constants, got {len(self.lambdas)}", kind="range")
        if len(self.alphas) != max(self.m - 2, 0):
            raise InputError(f"Expected {max(self.m - 2, 0)} α constants, got {len(self.alphas)}", kind="range")
        if any(v < 1 for v in list(self.lambdas) + list(self.alphas)):
            raise InputError("Λ and α constants must be >= 1", kind="range")
        if any(v <= 0 for v in self.operator_constants):
            raise InputError("Operator constants must be positive", kind="range")
        if self.sub is not None and self.sub.m != self.m - 1:
            raise InputError("The sub-assembly must sit one level below", kind="range")

    def alpha(self, j: int) -> float:
        """α_j with α_0 = 1."""
        return 1.0 if j == 0 else float(self.alphas[j - 1])

    def replace(self, **changes) -> "WeightAssembly":
        data = dict(
            m=self.m,
            lambdas=list(self.lambdas),
            alphas=list(self.alphas),
            scales=tuple(self.scales),
            c=self.c,
            operator_constants=list(self.operator_constants),
            c4=self.c4,
            sub=self.sub,
        )
        data.update(changes)
        return WeightAssembly(**data)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "lambdas": [float(v) for v in self.lambdas],
            "alphas": [float(v) for v in self.alphas],
            "scales": [float(v) for v in self.scales],
            "c": float(self.c),
            "operator_constants": [float(v) for v in self.operator_constants],
            "c4": None if self.c4 is None else float(self.c4),
            "sub": None if self.sub is None else self.sub.to_dict(),
        }


@dataclass
class FieldSample:
    """All components of the construction at a batch of points."""

    points: np.ndarray
    m: int
    r: List[Bracketed]
    rt: Dict[Tuple[int, int], Bracketed]
    jb2: Bracketed
    norm2: Bracketed
    gtilde: List[Bracketed]
    wt0: Bracketed
    psi: List[Bracketed] = field(default_factory=list)
    w: List[Optional[Bracketed]] = field(default_factory=list)
    prod_w: List[Bracketed] = field(default_factory=list)
    rho: List[List[Bracketed]] = field(default_factory=list)
    chain_parts: List[List[Bracketed]] = field(default_factory=list)
    good: List[Bracketed] = field(default_factory=list)
    chain: List[Bracketed] = field(default_factory=list)
    main: List[Bracketed] = field(default_factory=list)
    weights: List[Bracketed] = field(default_factory=list)
    re_sum: Optional[np.ndarray] = None

    @property
    def japanese(self) -> np.ndarray:
        return np.sqrt(self.jb2.value)

    def target_parts(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """1 + sum Re q_p, sum_p H_p G_p, sum_p H_p 𝔭_p."""
        base, mains, chains = self.operator_parts()
        return base, sum(mains), sum(chains, np.zeros_like(base))

    def operator_parts(self) -> Tuple[np.ndarray, List[np.ndarray], List[np.ndarray]]:
        """1 + sum Re q_p, then H_p G_p and H_p 𝔭_p for each p."""
        base = 1.0 + self.re_sum
        mains = [g.along(p) for p, g in enumerate(self.main)]
        chains = [g.along(p) for p, g in enumerate(self.chain)] or [np.zeros_like(base)] * len(mains)
        return base, mains, chains


class WeightField:
    """Evaluator of a WeightAssembly for one system."""

    def __init__(self, system: SystemOfForms, assembly: WeightAssembly):
        self.system = system
        self.assembly = assembly
        if assembly.operator_constants and len(assembly.operator_constants) != system.N:
            raise InputError(
                f"Expected {system.N} operator constants, got {len(assembly.operator_constants)}", kind="range"
            )
        m = assembly.m
        self.grams = gram_matrices(system, m)
        self.rtilde = {
            (k, p): rtilde_matrix(system, k, p, self.grams)
            for k in range(1, m + 1)
            for p in range(system.N)
        }
        self.M = system.space.symplectic_matrix
        self.sub_field = WeightField(system, assembly.sub) if assembly.sub is not None else None

    # ingredients

    def _directions(self, X: np.ndarray) -> np.ndarray:
        """U[p] = (2 Im Q_p X)^T M, so H_p f = U[p] . grad f."""
        return np.stack([(2.0 * X @ q.im) @ self.M for q in self.system.forms])

    def quadratic(self, X: np.ndarray, A: np.ndarray, U: Optional[np.ndarray] = None) -> Bracketed:
        U = self._directions(X) if U is None else U
        AX = X @ A
        value = np.einsum("pi,pi->p", X, AX)
        bracket = np.einsum("npi,pi->np", U, 2.0 * AX)
        return Bracketed(value, bracket)

    def sample(self, X: np.ndarray, with_weights: bool = True) -> FieldSample:
        X = self.system.space.check(np.atleast_2d(np.asarray(X, dtype=float)))
        a = self.assembly
        m, N = a.m, self.system.N
        U = self._directions(X)

        r = [self.quadratic(X, G, U) for G in self.grams]
        rt = {key: self.quadratic(X, R, U) for key, R in self.rtilde.items()}
        norm2 = self.quadratic(X, np.eye(self.system.space.dim), U)
        jb2 = norm2 + 1.0

        edge_arg = r[m - 1] * jb2.power(-(2 * m - 1) / (2 * m + 1))
        gtilde = [
            edge_arg.compose(PSI) * jb2.power(-2 * m / (2 * m + 1)) * rt[(m, p)] for p in range(N)
        ]
        wt0 = edge_arg.compose(W1)

        sample = FieldSample(X, m, r, rt, jb2, norm2, gtilde, wt0)
        sample.re_sum = sum(q.evaluate(X).real for q in self.system.forms)
        self._chain(sample)
        if with_weights:
            self._weights(sample)
        return sample

    def _chain(self, s: FieldSample) -> None:
        """Ψ_j, W_j, 𝔭_{j,p}, good_j and 𝔭_p for m >= 2."""
        a, m, N = self.assembly, s.m, self.system.N
        P = len(s.points)
        one = Bracketed.constant(1.0, N, P)

        s.w = [None]
        for j in range(1, m):
            k = m - j
            ratio = Bracketed.quotient(s.r[k - 1], s.r[k], (2 * k - 1) / (2 * k + 1))
            s.w.append((ratio * a.lambdas[j - 1]).compose(W2))

        s.prod_w = [one]
        for j in range(1, m):
            s.prod_w.append(s.prod_w[-1] * s.w[j])

        for j in range(m - 1):
            k = m - j - 1
            b = (2 * k - 1) / (2 * k + 1)
            ratio = Bracketed.quotient(s.r[k - 1], s.r[k], b)
            psi_j = (ratio * a.lambdas[j]).compose(PSI)
            s.psi.append(psi_j)
            frame = s.wt0 * s.prod_w[j] * psi_j
            inv = s.r[k].power(-2 * k / (2 * k + 1))
            rho = [s.rt[(k, p)] * inv for p in range(N)]
            s.rho.append(rho)
            s.chain_parts.append([frame * rho[p] for p in range(N)])
            s.good.append(frame * s.r[k].power(1.0 / (2 * k + 1)))

        s.chain = [
            sum((s.chain_parts[j][p] * a.alpha(j) for j in range(m - 1)), Bracketed.constant(0.0, N, P))
            for p in range(N)
        ]

    def _weights(self, s: FieldSample) -> None:
        a, m, N = self.assembly, s.m, self.system.N
        if m == 1:
            s.main = list(s.gtilde)
        else:
            if self.sub_field is None or a.c4 is None:
                raise InputError("Level m >= 2 needs a sub-assembly and c4", kind="range")
            sub = self.sub_field.sample(s.points)
            cut = (Bracketed.quotient(s.r[m], s.norm2, 1.0) * (4.0 / a.c4)).compose(PSI)
            away = s.norm2.power(0.5).compose(W1)
            s.main = [s.gtilde[p] + cut * away * sub.weights[p] for p in range(N)]

        c_main, c_chain = a.scales
        factors = a.operator_constants or [1.0] * N
        if m == 1:
            s.weights = [g * (c_main * factors[p]) for p, g in enumerate(s.main)]
        else:
            s.weights = [(s.main[p] * c_main + s.chain[p] * c_chain) * factors[p] for p in range(N)]


# ── Public operations ────────────────────────────────────────────────────────


@dataclass
class WeightValues:
    """g_p and H_{Im q_p} g_p at each point, shapes (N, P)."""

    values: np.ndarray
    brackets: np.ndarray
    outside: Optional[np.ndarray] = None
    fd_error: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sup_abs_weight": float(np.max(np.abs(self.values))) if self.values.size else 0.0,
            "points_outside_region": None if self.outside is None else int(self.outside.sum()),
            "fd_error": self.fd_error,
        }


def hamilton_field_fd(
    f: Callable[[np.ndarray], np.ndarray], q: QuadraticForm, X: np.ndarray, h: Optional[float] = None
) -> np.ndarray:
    """Central difference of f along the Hamilton field of the real form q, step h <X> (default 1e-4 <X>)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    v = hamilton_vector_field(q.real_part(), X).real
    speed = np.linalg.norm(v, axis=1)
    direction = v / np.where(speed > 0, speed, 1.0)[:, None]
    step = (FD_STEP if h is None else h) * japanese_bracket(X)
    plus = f(X + step[:, None] * direction)
    minus = f(X - step[:, None] * direction)
    return speed * (plus - minus) / (2.0 * step)


def fd_relative_error(exact: np.ndarray, approx: np.ndarray, floor: float = 1e-8) -> float:
    scale = max(float(np.max(np.abs(exact))), floor)
    return float(np.max(np.abs(exact - approx)) / scale)


def weight_evaluate(
    sys: SystemOfForms,
    assembly: WeightAssembly,
    X: np.ndarray,
    check: bool = False,
    region: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> WeightValues:
    """g_p(X) and H_{Im q_p} g_p(X) for every operator p."""
    field_ = WeightField(sys, assembly)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    s = field_.sample(X)
    values = np.stack([g.value for g in s.weights])
    brackets = np.stack([g.along(p) for p, g in enumerate(s.weights)])

    outside = None
    if region is not None:
        outside = ~np.asarray(region(X), dtype=bool)
        if outside.any():
            logger.warning("%d of %d points lie outside the region", int(outside.sum()), len(X))

    fd_error = None
    if check:
        errors = []
        for p, q in enumerate(sys.forms):
            fd = hamilton_field_fd(lambda Y, p=p: field_.sample(Y).weights[p].value, q.imag_part(), X)
            errors.append(fd_relative_error(brackets[p], fd))
        fd_error = max(errors)

    return WeightValues(values, brackets, outside, fd_error)


@dataclass
class BracketTerms:
    """Additive pieces of H_{Im q_p} 𝔭_{j,p} and their exact total."""

    j: int
    p: int
    terms: Dict[str, np.ndarray]
    total: np.ndarray

    @property
    def residual(self) -> float:
        return float(np.max(np.abs(sum(self.terms.values()) - self.total)))


def decompose(s: FieldSample, j: int, p: int) -> BracketTerms:
    """B1..B4 (and B5 for j >= 1) from an evaluated sample."""
    m = s.m
    if not 0 <= j <= m - 2:
        raise InputError(f"j must lie in 0..{m - 2}", kind="range")
    k = m - j - 1
    a = 2 * k / (2 * k + 1)
    wt0, prod, psi = s.wt0, s.prod_w[j], s.psi[j]
    rho = s.rho[j][p]
    rtk = s.rt[(k, p)]
    inv = s.r[k].power(-a)

    terms = {
        "B1": wt0.along(p) * prod.value * psi.value * rho.value,
        "B2": wt0.value * prod.value * psi.along(p) * rho.value,
        "B3": wt0.value * prod.value * psi.value * inv.along(p) * rtk.value,
        "B4": wt0.value * prod.value * psi.value * rtk.along(p) * inv.value,
    }
    if j >= 1:
        terms["B5"] = wt0.value * prod.along(p) * psi.value * rho.value

    total = s.chain_parts[j][p].along(p)
    out = BracketTerms(j, p, terms, total)
    scale = sum(np.abs(t) for t in terms.values()) + np.abs(total)
    bad = np.abs(sum(terms.values()) - total) > SUM_CHECK_TOL * np.maximum(scale, 1e-300)
    if np.any(bad & (scale > 0)):
        raise NumericalFailure(f"Bracket decomposition of chain term ({j}, {p}) does not sum up", kind="sum_check")
    return out


def bracket_decomposition(
    sys: SystemOfForms, assembly: WeightAssembly, j: int, p: int, X: np.ndarray
) -> BracketTerms:
    """The four (j = 0) or five additive terms of H_{Im q_p} 𝔭_{j,p}(X)."""
    sys.index(p)
    s = WeightField(sys, assembly).sample(X, with_weights=False)
    return decompose(s, j, p)


@dataclass
class PartitionMargins:
    """Covering margin W~0 (Ψ0 + ... + ΠW) - W~0 and the step margins Ψ_j + W_{j+1} - 1."""

    covering: np.ndarray
    steps: np.ndarray

    @property
    def min_margin(self) -> float:
        values = [float(np.min(self.covering))] if self.covering.size else []
        if self.steps.size:
            values.append(float(np.min(self.steps)))
        return min(values) if values else 0.0


def partition_check(sys: SystemOfForms, assembly: WeightAssembly, X: np.ndarray) -> PartitionMargins:
    """Pointwise covering inequality of the cutoff products."""
    s = WeightField(sys, assembly).sample(X, with_weights=False)
    m = s.m
    P = len(s.points)
    if m == 1:
        return PartitionMargins(np.zeros(P), np.zeros((0, P)))

    cover = sum((s.prod_w[j].value * s.psi[j].value for j in range(m - 1)), np.zeros(P))
    cover = cover + s.prod_w[m - 1].value
    covering = s.wt0.value * cover - s.wt0.value
    steps = np.stack([s.psi[j].value + s.w[j + 1].value - 1.0 for j in range(m - 1)])
    return PartitionMargins(covering, steps)
