"""
Polynomial Symbols
Phase-space polynomials of total degree at most four, stored as
exponent-vector -> complex coefficient maps.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np

from subcert.core.monomials import format_monomial, parse_monomial
from subcert.core.symplectic import PhaseSpace, QuadraticForm
from subcert.errors import DegreeError, DimensionMismatch

MAX_DEGREE = 4

Exponents = Tuple[int, ...]
Scalar = Union[int, float, complex]


@dataclass(frozen=True, eq=False)
class PolynomialSymbol:
    """a(X) = sum_e c_e X^e over exponent vectors e of length 2n."""

    n: int
    coeffs: Mapping[Exponents, complex]
    max_degree: int = MAX_DEGREE

    def __post_init__(self):
        clean: Dict[Exponents, complex] = {}
        for exps, value in self.coeffs.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != 2 * self.n:
                raise DimensionMismatch(f"Exponent vector {exps} does not match n={self.n}")
            if sum(exps) > self.max_degree:
                raise DegreeError(f"Monomial {format_monomial(exps)} exceeds degree {self.max_degree}")
            value = complex(value)
            if value != 0:
                clean[exps] = clean.get(exps, 0) + value
        object.__setattr__(self, "coeffs", {e: c for e, c in clean.items() if c != 0})

    # construction

    @classmethod
    def constant(cls, n: int, value: Scalar = 1.0) -> "PolynomialSymbol":
        return cls(n, {(0,) * (2 * n): value})

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[Tuple[str, Scalar]]) -> "PolynomialSymbol":
        coeffs: Dict[Exponents, complex] = {}
        for mono, value in terms:
            exps = parse_monomial(mono, n, max_degree=MAX_DEGREE)
            coeffs[exps] = coeffs.get(exps, 0) + complex(value)
        return cls(n, coeffs)

    @classmethod
    def from_quadratic_form(cls, q: QuadraticForm) -> "PolynomialSymbol":
        return cls.from_terms(q.n, q.to_monomials())

    def to_quadratic_form(self, name: str = "") -> QuadraticForm:
        if any(sum(e) != 2 for e in self.coeffs):
            raise DegreeError("Only homogeneous quadratic symbols convert to quadratic forms")
        return QuadraticForm.from_monomials(self.n, self.terms(), name=name)

    # inspection

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def terms(self) -> List[Tuple[str, complex]]:
        return [(format_monomial(e), c) for e, c in sorted(self.coeffs.items())]

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        X = PhaseSpace(self.n).check(X)
        if not self.coeffs:
            return np.zeros(X.shape[:-1], dtype=complex)
        E = np.array(list(self.coeffs.keys()))
        C = np.array(list(self.coeffs.values()))
        powers = np.prod(X[..., None, :] ** E, axis=-1)
        return powers @ C

    # calculus

    def derivative(self, i: int) -> "PolynomialSymbol":
        out: Dict[Exponents, complex] = {}
        for exps, c in self.coeffs.items():
            if exps[i]:
                e = list(exps)
                e[i] -= 1
                out[tuple(e)] = out.get(tuple(e), 0) + c * exps[i]
        return PolynomialSymbol(self.n, out)

    def gradient(self) -> List["PolynomialSymbol"]:
        return [self.derivative(i) for i in range(2 * self.n)]

    def laplacian(self) -> "PolynomialSymbol":
        total = PolynomialSymbol(self.n, {})
        for i in range(2 * self.n):
            total = total + self.derivative(i).derivative(i)
        return total

    def gradient_dot(self, other: "PolynomialSymbol") -> "PolynomialSymbol":
        """sum_i d_i a d_i b."""
        self._same_n(other)
        total = PolynomialSymbol(self.n, {})
        for i in range(2 * self.n):
            total = total + self.derivative(i) * other.derivative(i)
        return total

    def poisson(self, other: "PolynomialSymbol") -> "PolynomialSymbol":
        """{a, b} = d_xi a . d_x b - d_x a . d_xi b."""
        self._same_n(other)
        n = self.n
        total = PolynomialSymbol(n, {})
        for i in range(n):
            total = total + self.derivative(n + i) * other.derivative(i)
            total = total - self.derivative(i) * other.derivative(n + i)
        return total

    def scale_variables(self, factors: Union[Scalar, Sequence[Scalar]]) -> "PolynomialSymbol":
        """X -> a(diag(factors) X)."""
        f = np.broadcast_to(np.asarray(factors, dtype=complex), (2 * self.n,))
        out = {e: c * complex(np.prod(f ** np.array(e))) for e, c in self.coeffs.items()}
        return PolynomialSymbol(self.n, out)

    def conj(self) -> "PolynomialSymbol":
        return PolynomialSymbol(self.n, {e: np.conj(c) for e, c in self.coeffs.items()})

    # algebra

    def _same_n(self, other: "PolynomialSymbol") -> None:
        if other.n != self.n:
            raise DimensionMismatch(f"Symbols live on n={self.n} and n={other.n}")

    def _coerce(self, other: Union["PolynomialSymbol", Scalar]) -> "PolynomialSymbol":
        if isinstance(other, PolynomialSymbol):
            self._same_n(other)
            return other
        return PolynomialSymbol.constant(self.n, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return PolynomialSymbol(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return PolynomialSymbol(self.n, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, PolynomialSymbol):
            return PolynomialSymbol(self.n, {e: c * complex(other) for e, c in self.coeffs.items()})
        self._same_n(other)
        out: Dict[Exponents, complex] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if sum(e) > MAX_DEGREE:
                    raise DegreeError(
                        f"Product has degree {self.degree + other.degree} > {MAX_DEGREE}"
                    )
                out[e] = out.get(e, 0) + c1 * c2
        return PolynomialSymbol(self.n, out)

    __rmul__ = __mul__

    def close_to(self, other: "PolynomialSymbol", tol: float = 1e-12) -> bool:
        diff = self - other
        return all(abs(c) <= tol for c in diff.coeffs.values())

    def __repr__(self) -> str:
        body = " + ".join(f"({c:g})*{m}" for m, c in self.terms()) or "0"
        return f"PolynomialSymbol(n={self.n}: {body})"
