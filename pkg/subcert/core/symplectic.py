"""
Symplectic Core
Quadratic forms on phase space, Hamilton maps, polarized forms, Poisson brackets
and the Gram families r_k / r~_{k,p}.

Coordinates are ordered (x1..xn, xi1..xin) and sigma(X, Y) = X^T M Y with
M = [[0, -I], [I, 0]], so that sigma((x, xi), (y, eta)) = xi.y - x.eta.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from subcert.core.monomials import format_monomial, parse_monomial
from subcert.errors import (
    DegreeError,
    DimensionMismatch,
    HypothesisViolation,
    IndexOutOfRange,
    InputError,
    NumericalFailure,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
IDENTITY_TOL = 1e-12


def symplectic_matrix(n: int) -> np.ndarray:
    """M with sigma(X, Y) = X^T M Y."""
    M = np.zeros((2 * n, 2 * n))
    M[:n, n:] = -np.eye(n)
    M[n:, :n] = np.eye(n)
    return M


def japanese_bracket(X: np.ndarray) -> np.ndarray:
    """<X> = (1 + |x|^2 + |xi|^2)^(1/2) along the last axis."""
    X = np.asarray(X)
    return np.sqrt(1.0 + np.sum(np.abs(X) ** 2, axis=-1))


# ── Phase space ──────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class PhaseSpace:
    """R^n_x x R^n_xi with its canonical symplectic form."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DimensionMismatch(f"Phase space needs n >= 1, got {self.n}")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def symplectic_matrix(self) -> np.ndarray:
        return symplectic_matrix(self.n)

    def sigma(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Canonical symplectic form, vectorized over leading axes."""
        M = self.symplectic_matrix
        return np.einsum("...i,ij,...j->...", X, M, Y)

    def check(self, X: np.ndarray, what: str = "point") -> np.ndarray:
        X = np.asarray(X)
        if X.shape[-1] != self.dim:
            raise DimensionMismatch(
                f"{what} has {X.shape[-1]} coordinates, phase space has {self.dim}"
            )
        return X


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """A point X = (x, xi) of phase space."""

    coordinates: np.ndarray

    @property
    def n(self) -> int:
        return len(self.coordinates) // 2

    @property
    def x(self) -> np.ndarray:
        return np.asarray(self.coordinates)[: self.n]

    @property
    def xi(self) -> np.ndarray:
        return np.asarray(self.coordinates)[self.n :]

    @property
    def japanese_bracket(self) -> float:
        return float(japanese_bracket(self.coordinates))


# ── Quadratic forms ──────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """q(X) = X^T Q X with a complex symmetric coefficient matrix."""

    space: PhaseSpace
    matrix: np.ndarray
    claimed_nonneg_real_part: bool = False
    name: str = ""
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        Q = np.array(self.matrix, dtype=complex)
        dim = self.space.dim
        if Q.shape != (dim, dim):
            raise DimensionMismatch(f"Coefficient matrix {Q.shape} does not match dim {dim}")
        Q = (Q + Q.T) / 2.0
        Q.setflags(write=False)
        object.__setattr__(self, "matrix", Q)

        if self.claimed_nonneg_real_part:
            lam = self.min_real_eigenvalue
            if lam < -self.tol * max(1.0, self.norm):
                raise HypothesisViolation(
                    f"Form '{self.name or 'q'}' has Re q with eigenvalue {lam:.3e} < 0",
                    path=self.name,
                    min_eigenvalue=lam,
                )

    # construction

    @classmethod
    def zero(cls, space: PhaseSpace) -> "QuadraticForm":
        return cls(space, np.zeros((space.dim, space.dim)))

    @classmethod
    def identity(cls, space: PhaseSpace) -> "QuadraticForm":
        """|X|^2."""
        return cls(space, np.eye(space.dim), claimed_nonneg_real_part=True)

    @classmethod
    def from_monomials(
        cls,
        n: int,
        terms: Iterable[Tuple[str, complex]],
        name: str = "",
        claimed_nonneg_real_part: bool = False,
        tol: float = DEFAULT_TOL,
    ) -> "QuadraticForm":
        """Sum of coefficient * monomial, each monomial of degree exactly two."""
        space = PhaseSpace(n)
        Q = np.zeros((space.dim, space.dim), dtype=complex)
        for mono, coeff in terms:
            exps = parse_monomial(mono, n, max_degree=2)
            if sum(exps) != 2:
                raise DegreeError(f"Monomial '{mono}' is not quadratic", path=name)
            idx = [i for i, e in enumerate(exps) for _ in range(e)]
            a, b = idx
            Q[a, b] += coeff / 2.0
            Q[b, a] += coeff / 2.0
        return cls(space, Q, claimed_nonneg_real_part=claimed_nonneg_real_part, name=name, tol=tol)

    def to_monomials(self) -> List[Tuple[str, complex]]:
        """Upper-triangular monomial expansion, zero coefficients dropped."""
        terms = []
        dim = self.space.dim
        for a in range(dim):
            for b in range(a, dim):
                coeff = self.matrix[a, b] if a == b else 2.0 * self.matrix[a, b]
                if coeff != 0:
                    exps = [0] * dim
                    exps[a] += 1
                    exps[b] += 1
                    terms.append((format_monomial(tuple(exps)), complex(coeff)))
        return terms

    # derived data

    @property
    def n(self) -> int:
        return self.space.n

    @cached_property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2)) if self.matrix.any() else 0.0

    @property
    def re(self) -> np.ndarray:
        return self.matrix.real

    @property
    def im(self) -> np.ndarray:
        return self.matrix.imag

    @cached_property
    def min_real_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.re)[0])

    @property
    def is_real(self) -> bool:
        return not np.any(self.im)

    def real_part(self) -> "QuadraticForm":
        return QuadraticForm(self.space, self.re, name=f"Re {self.name}".strip())

    def imag_part(self) -> "QuadraticForm":
        return QuadraticForm(self.space, self.im, name=f"Im {self.name}".strip())

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        X = self.space.check(X)
        return np.einsum("...i,ij,...j->...", X, self.matrix, X)

    def polarize(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        X = self.space.check(X)
        Y = self.space.check(Y)
        return np.einsum("...i,ij,...j->...", X, self.matrix, Y)

    def gradient(self, X: np.ndarray) -> np.ndarray:
        X = self.space.check(X)
        return 2.0 * X @ self.matrix

    def compose(self, A: np.ndarray) -> "QuadraticForm":
        """X -> q(A X)."""
        A = np.asarray(A)
        return QuadraticForm(self.space, A.T @ self.matrix @ A)

    def with_claim(self, name: Optional[str] = None) -> "QuadraticForm":
        """Same form, validated as having non-negative real part."""
        return QuadraticForm(
            self.space,
            self.matrix,
            claimed_nonneg_real_part=True,
            name=self.name if name is None else name,
            tol=self.tol,
        )

    # algebra

    def _same_space(self, other: "QuadraticForm") -> None:
        if other.space != self.space:
            raise DimensionMismatch(f"Forms live on n={self.n} and n={other.n}")

    def __add__(self, other: "QuadraticForm") -> "QuadraticForm":
        self._same_space(other)
        return QuadraticForm(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "QuadraticForm") -> "QuadraticForm":
        self._same_space(other)
        return QuadraticForm(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "QuadraticForm":
        return QuadraticForm(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "QuadraticForm":
        return QuadraticForm(self.space, -self.matrix)

    def __repr__(self) -> str:
        label = self.name or "q"
        return f"QuadraticForm({label}, n={self.n})"


# ── Hamilton maps ────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class HamiltonMap:
    """F with sigma(X, F Y) = q(X; Y)."""

    space: PhaseSpace
    matrix: np.ndarray

    @property
    def re_part(self) -> np.ndarray:
        return np.asarray(self.matrix).real

    @property
    def im_part(self) -> np.ndarray:
        return np.asarray(self.matrix).imag

    def apply(self, X: np.ndarray) -> np.ndarray:
        return self.space.check(X) @ np.asarray(self.matrix).T

    def skew_residual(self) -> float:
        """||F^T M + M F|| relative to ||F|| ||M||."""
        F = np.asarray(self.matrix)
        scale = np.linalg.norm(F, 2)
        if scale == 0:
            return 0.0
        M = self.space.symplectic_matrix
        return float(np.linalg.norm(F.T @ M + M @ F, 2) / scale)


def hamilton_map(q: QuadraticForm, tol: float = IDENTITY_TOL) -> HamiltonMap:
    """F = M^{-1} Q, checked against sigma(e_i, F e_j) = q(e_i; e_j)."""
    space = q.space
    F = -space.symplectic_matrix @ q.matrix
    E = np.eye(space.dim)
    # entry (i, j) is sigma(e_i, F e_j)
    left, right = np.broadcast_arrays(E[:, None, :], (E @ F.T)[None, :, :])
    pairing = space.sigma(left, right)
    residual = float(np.max(np.abs(pairing - q.matrix))) if F.size else 0.0
    if residual > tol * max(q.norm, np.finfo(float).tiny):
        raise NumericalFailure(f"Hamilton map identity off by {residual:.3e}")
    return HamiltonMap(q.space, F)


def polarize(q: QuadraticForm, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """q(X; Y) = X^T Q Y."""
    return q.polarize(X, Y)


def poisson_bracket(a: QuadraticForm, b: QuadraticForm) -> QuadraticForm:
    """H_a b = {a, b} = d_xi a . d_x b - d_x a . d_xi b, a quadratic form."""
    a._same_space(b)
    M = a.space.symplectic_matrix
    C = 2.0 * (a.matrix @ M @ b.matrix - b.matrix @ M @ a.matrix)
    return QuadraticForm(a.space, C)


def poisson_bracket_at(a: QuadraticForm, b: QuadraticForm, X: np.ndarray) -> np.ndarray:
    """{a, b}(X) through the gradient contraction grad a^T M grad b."""
    a._same_space(b)
    M = a.space.symplectic_matrix
    return np.einsum("...i,ij,...j->...", a.gradient(X), M, b.gradient(X))


def hamilton_vector_field(a: QuadraticForm, X: np.ndarray) -> np.ndarray:
    """v(X) with H_a f(X) = v(X) . grad f(X)."""
    M = a.space.symplectic_matrix
    return -a.gradient(X) @ M.T


# ── Systems ──────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class SystemOfForms:
    """q_1..q_N on a common phase space, each with non-negative real part."""

    space: PhaseSpace
    forms: Tuple[QuadraticForm, ...]
    names: Tuple[str, ...] = ()
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        forms = tuple(self.forms)
        if not forms:
            raise InputError("A system needs at least one form", kind="dimension")
        for q in forms:
            if q.space != self.space:
                raise DimensionMismatch(f"Form '{q.name}' has n={q.n}, system has n={self.space.n}")

        names = tuple(self.names) or tuple(q.name or f"q{i + 1}" for i, q in enumerate(forms))
        if len(names) != len(forms):
            raise InputError("One name per form is required", kind="dimension")

        claimed = tuple(
            q if q.claimed_nonneg_real_part else q.with_claim(name=label)
            for q, label in zip(forms, names)
        )
        object.__setattr__(self, "forms", claimed)
        object.__setattr__(self, "names", names)

    @classmethod
    def of(cls, *forms: QuadraticForm, metadata: Optional[Dict[str, Any]] = None) -> "SystemOfForms":
        if not forms:
            raise InputError("A system needs at least one form", kind="dimension")
        return cls(forms[0].space, tuple(forms), metadata=dict(metadata or {}))

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def N(self) -> int:
        return len(self.forms)

    def index(self, p: int, what: str = "operator index") -> int:
        if not 0 <= p < self.N:
            raise IndexOutOfRange(f"{what} {p} outside 0..{self.N - 1}")
        return p

    @cached_property
    def hamilton_maps(self) -> Tuple[HamiltonMap, ...]:
        return tuple(hamilton_map(q) for q in self.forms)

    @cached_property
    def re_maps(self) -> Tuple[np.ndarray, ...]:
        return tuple(F.re_part for F in self.hamilton_maps)

    @cached_property
    def im_maps(self) -> Tuple[np.ndarray, ...]:
        return tuple(F.im_part for F in self.hamilton_maps)

    @cached_property
    def re_matrices(self) -> Tuple[np.ndarray, ...]:
        return tuple(q.re for q in self.forms)

    @cached_property
    def im_forms(self) -> Tuple[QuadraticForm, ...]:
        return tuple(q.imag_part() for q in self.forms)

    @cached_property
    def scale(self) -> float:
        """Largest coefficient norm, the reference for relative tolerances."""
        return max(q.norm for q in self.forms)

    def sum_form(self) -> QuadraticForm:
        total = sum((q.matrix for q in self.forms), np.zeros((self.space.dim,) * 2, dtype=complex))
        return QuadraticForm(self.space, total, claimed_nonneg_real_part=True, name="sum")

    def with_form(self, q: QuadraticForm, name: str = "") -> "SystemOfForms":
        label = name or q.name or f"q{self.N + 1}"
        return SystemOfForms(self.space, self.forms + (q,), self.names + (label,), dict(self.metadata))

    def scaled(self, t: float) -> "SystemOfForms":
        if t <= 0:
            raise InputError("Scaling factor must be positive", kind="range")
        return SystemOfForms(
            self.space, tuple(q * t for q in self.forms), self.names, dict(self.metadata)
        )

    def __repr__(self) -> str:
        return f"SystemOfForms(n={self.n}, N={self.N}, names={list(self.names)})"


# ── Gram families ────────────────────────────────────────────────────────────


def gram_matrices(sys: SystemOfForms, kmax: int) -> List[np.ndarray]:
    """G_0 = sum Re Q_j, G_k = sum_l (Im F_l)^T G_{k-1} Im F_l."""
    if kmax < 0:
        raise IndexOutOfRange(f"kmax must be >= 0, got {kmax}")
    G = sum(sys.re_matrices)
    grams = [G]
    for _ in range(kmax):
        G = sum(F.T @ G @ F for F in sys.im_maps)
        grams.append((G + G.T) / 2.0)
    return grams


def r_tower(sys: SystemOfForms, kmax: int) -> List[QuadraticForm]:
    """r_0..r_kmax, r_k(X) = sum over j and words of length k of Re q_j(Im F_w X)."""
    return [
        QuadraticForm(sys.space, G, name=f"r{k}")
        for k, G in enumerate(gram_matrices(sys, kmax))
    ]


def rtilde_matrix(sys: SystemOfForms, k: int, p: int, grams: Optional[Sequence[np.ndarray]] = None) -> np.ndarray:
    """Symmetric matrix of r~_{k,p}: sym(G_{k-1} Im F_p)."""
    if k < 1:
        raise IndexOutOfRange(f"r~ needs k >= 1, got {k}")
    sys.index(p)
    if grams is None or len(grams) < k:
        grams = gram_matrices(sys, k - 1)
    A = grams[k - 1] @ sys.im_maps[p]
    return (A + A.T) / 2.0


def rtilde(sys: SystemOfForms, k: int, p: int) -> QuadraticForm:
    """r~_{k,p}(X) = sum over j and words of length k-1 of Re q_j(Im F_w X; Im F_w Im F_p X)."""
    return QuadraticForm(sys.space, rtilde_matrix(sys, k, p), name=f"r~{k},{p}")


def word_matrix(sys: SystemOfForms, word: Sequence[int]) -> np.ndarray:
    """Im F_{l_1} ... Im F_{l_k}; identity for the empty word."""
    W = np.eye(sys.space.dim)
    for pos, l in enumerate(word):
        sys.index(l, what=f"word entry {pos}")
        W = W @ sys.im_maps[l]
    return W


def polarized_word_form(
    sys: SystemOfForms, j: int, p: int, word: Sequence[int], s1: int, s2: int
) -> QuadraticForm:
    """X -> Re q_j(W (Im F_p)^s1 X; W (Im F_p)^s2 X), assembled directly."""
    sys.index(j)
    sys.index(p)
    if s1 < 0 or s2 < 0:
        raise IndexOutOfRange("Powers s1, s2 must be non-negative")
    W = word_matrix(sys, word)
    Fp = sys.im_maps[p]
    A1 = W @ np.linalg.matrix_power(Fp, s1)
    A2 = W @ np.linalg.matrix_power(Fp, s2)
    return QuadraticForm(sys.space, A1.T @ sys.re_matrices[j] @ A2)


def hamilton_map_of_polarized(
    sys: SystemOfForms, j: int, p: int, word: Sequence[int], s1: int, s2: int
) -> np.ndarray:
    """
    Closed-form Hamilton map of polarized_word_form.

    Pushing M^{-1} through each transposed Im F factor flips its sign, which gives
    1/2 (-1)^(k+s1) Fp^s1 F_lk..F_l1 ReF_j F_l1..F_lk Fp^s2 plus the mirrored term.
    """
    sys.index(j)
    sys.index(p)
    Fp = sys.im_maps[p]
    W = word_matrix(sys, word)
    W_rev = word_matrix(sys, list(reversed(word)))
    ReF = sys.re_maps[j]
    k = len(word)

    def half(a: int, b: int) -> np.ndarray:
        sign = (-1.0) ** (k + a)
        return sign * np.linalg.matrix_power(Fp, a) @ W_rev @ ReF @ W @ np.linalg.matrix_power(Fp, b)

    return 0.5 * (half(s1, s2) + half(s2, s1))


# ── Bracket identities ───────────────────────────────────────────────────────


def bracket_identity_sides(
    sys: SystemOfForms, j: int, p: int, word: Sequence[int], s1: int, s2: int, X: np.ndarray
) -> Tuple[float, float]:
    """
    Both sides of
    H_{Im q_p} Re q_j(W Fp^s1 X; W Fp^s2 X)
        = 2 Re q_j(W Fp^(s1+1) X; W Fp^s2 X) + 2 Re q_j(W Fp^s1 X; W Fp^(s2+1) X).
    """
    X = sys.space.check(X)
    form = polarized_word_form(sys, j, p, word, s1, s2)
    lhs = poisson_bracket(sys.im_forms[p], form).evaluate(X).real
    rhs = (
        2.0 * polarized_word_form(sys, j, p, word, s1 + 1, s2).evaluate(X).real
        + 2.0 * polarized_word_form(sys, j, p, word, s1, s2 + 1).evaluate(X).real
    )
    return float(lhs), float(rhs)


def bracket_identity_check(
    sys: SystemOfForms, j: int, p: int, word: Sequence[int], s1: int, s2: int, X: np.ndarray
) -> float:
    """|LHS - RHS| of the polarized bracket identity at X."""
    lhs, rhs = bracket_identity_sides(sys, j, p, word, s1, s2, X)
    return abs(lhs - rhs)


def kee_identities(sys: SystemOfForms, p: int, k: int, X: np.ndarray) -> Tuple[float, float]:
    """
    Residuals of
    H_{Im q_p} r_k = 4 r~_{k+1,p} and
    H_{Im q_p} r~_{k+1,p}(X) = 2 r_k(Im F_p X) + 2 X^T G_k (Im F_p)^2 X.
    """
    sys.index(p)
    X = sys.space.check(X)
    grams = gram_matrices(sys, k)
    G = grams[k]
    Fp = sys.im_maps[p]
    im_p = sys.im_forms[p]

    r_k = QuadraticForm(sys.space, G)
    rt = QuadraticForm(sys.space, rtilde_matrix(sys, k + 1, p, grams))

    first = poisson_bracket(im_p, r_k).evaluate(X).real - 4.0 * rt.evaluate(X).real
    Y = X @ Fp.T
    expected = 2.0 * np.einsum("...i,ij,...j->...", Y, G, Y) + 2.0 * np.einsum(
        "...i,ij,...j->...", X, G @ Fp @ Fp, X
    )
    second = poisson_bracket(im_p, rt).evaluate(X).real - expected
    return float(np.max(np.abs(first))), float(np.max(np.abs(second)))


def iterated_commutator_symbol(sys: SystemOfForms, j: int, word: Sequence[int]) -> QuadraticForm:
    """H^2_{Im q_lk} ... H^2_{Im q_l1} Re q_j, l_1 applied first."""
    sys.index(j)
    symbol = sys.forms[j].real_part()
    for pos, l in enumerate(word):
        sys.index(l, what=f"word entry {pos}")
        a = sys.im_forms[l]
        symbol = poisson_bracket(a, poisson_bracket(a, symbol))
    return QuadraticForm(sys.space, symbol.re, name=f"commutator[{j}; {list(word)}]")


def iterated_commutator_map(sys: SystemOfForms, j: int, word: Sequence[int]) -> np.ndarray:
    """Hamilton map of iterated_commutator_symbol by nested -2 commutators."""
    sys.index(j)
    F = sys.re_maps[j].astype(complex)
    for l in word:
        A = sys.im_maps[sys.index(l)]
        for _ in range(2):
            F = -2.0 * (A @ F - F @ A)
    return F.real


def commutator_definiteness(symbol: QuadraticForm) -> Tuple[float, float]:
    """Extreme eigenvalues of a real symbol; both of one sign means elliptic."""
    lam = np.linalg.eigvalsh(symbol.re)
    return float(lam[0]), float(lam[-1])


# ── Sampling ─────────────────────────────────────────────────────────────────


def sphere_directions(dim: int, count: int, seed: int, include_axes: bool = True) -> np.ndarray:
    """Unit vectors: the coordinate axes (if asked) then seeded Gaussian directions."""
    rng = np.random.default_rng(seed)
    blocks = []
    if include_axes:
        blocks.append(np.eye(dim))
    extra = max(0, count - (dim if include_axes else 0))
    if extra:
        Z = rng.standard_normal((extra, dim))
        blocks.append(Z / np.linalg.norm(Z, axis=1, keepdims=True))
    return np.vstack(blocks)[:count] if blocks else np.zeros((0, dim))


def numerical_range_sample(q: QuadraticForm, num_samples: int, seed: int = 0) -> np.ndarray:
    """q(X_i) on the unit sphere: axes first, then seeded random directions."""
    if num_samples < 1:
        raise IndexOutOfRange("num_samples must be >= 1")
    X = sphere_directions(q.space.dim, num_samples, seed)
    return q.evaluate(X)
