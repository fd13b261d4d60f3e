"""
Weyl Quantization
Matrices of a^w on truncated Hermite bases, built from fully symmetrized
ladder-operator products.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from subcert.core.symplectic import QuadraticForm
from subcert.errors import DimensionMismatch, InputError
from subcert.quantization.hermite import HermiteBasis, momentum, position
from subcert.quantization.symbols import PolynomialSymbol

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense matrix of an operator on a truncated basis; levels above max_level - guard are untrusted."""

    basis: HermiteBasis
    matrix: np.ndarray
    band: int
    guard: int

    @property
    def interior(self) -> np.ndarray:
        return self.basis.interior(self.guard)

    def interior_block(self) -> np.ndarray:
        idx = self.interior
        if idx.size == 0:
            raise InputError(
                f"No interior levels: max_level {self.basis.max_level} <= guard {self.guard}",
                kind="range",
            )
        return self.matrix[np.ix_(idx, idx)]

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.matrix.conj().T, self.band, self.guard)

    def hermitian_part(self) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, (self.matrix + self.matrix.conj().T) / 2.0, self.band, self.guard)

    def band_violation(self) -> float:
        """Largest entry coupling levels further apart than the band."""
        lv = self.basis.levels
        mask = np.abs(lv[:, None] - lv[None, :]) > self.band
        return float(np.max(np.abs(self.matrix[mask]))) if mask.any() else 0.0

    def interior_norm(self) -> float:
        return float(np.linalg.norm(self.interior_block(), 2))

    def _check(self, other: "OperatorMatrix") -> None:
        if other.basis.dim != self.basis.dim or other.basis.n != self.basis.n:
            raise DimensionMismatch("Operators act on different bases")

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(
            self.basis, self.matrix + other.matrix, max(self.band, other.band), max(self.guard, other.guard)
        )

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(
            self.basis, self.matrix - other.matrix, max(self.band, other.band), max(self.guard, other.guard)
        )

    def __mul__(self, scalar: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.matrix * scalar, self.band, self.guard)

    __rmul__ = __mul__

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        """Truncated product; exact on levels <= max_level - max(guard) with the guards summed."""
        self._check(other)
        return OperatorMatrix(
            self.basis, self.matrix @ other.matrix, self.band + other.band, self.guard + other.guard
        )


@lru_cache(maxsize=512)
def _mode_factor(x_pow: int, xi_pow: int, size: int) -> np.ndarray:
    """Average over distinct orderings of x^x_pow D^xi_pow on one mode."""
    if x_pow + xi_pow == 0:
        out = np.eye(size, dtype=complex)
        out.setflags(write=False)
        return out

    ops = {"x": position(size).astype(complex), "D": momentum(size)}
    orderings = set(itertools.permutations("x" * x_pow + "D" * xi_pow))
    total = np.zeros((size, size), dtype=complex)
    for word in orderings:
        product = np.eye(size, dtype=complex)
        for letter in word:
            product = product @ ops[letter]
        total += product
    total /= len(orderings)
    total.setflags(write=False)
    return total


def weyl_quantize(a: PolynomialSymbol, basis: HermiteBasis) -> OperatorMatrix:
    """Matrix of a^w on the basis, exact up to rounding."""
    if a.n != basis.n:
        raise DimensionMismatch(f"Symbol has n={a.n}, basis has n={basis.n}")
    degree = a.degree
    if basis.max_level < degree:
        raise InputError(f"max_level {basis.max_level} is below the symbol degree {degree}", kind="range")

    body = a.scale_variables(basis.convention.variable_scale)
    n = basis.n
    size = basis.max_level + degree + 1
    alphas = basis.alphas
    M = np.zeros((basis.dim, basis.dim), dtype=complex)

    for exps, coeff in body.coeffs.items():
        term = np.ones((basis.dim, basis.dim), dtype=complex)
        for i in range(n):
            if exps[i] + exps[n + i] == 0:
                term *= np.equal.outer(alphas[:, i], alphas[:, i])
                continue
            S = _mode_factor(exps[i], exps[n + i], size)
            term *= S[np.ix_(alphas[:, i], alphas[:, i])]
        M += coeff * term

    return OperatorMatrix(basis, M, band=degree, guard=degree)


def quantize_form(q: QuadraticForm, basis: HermiteBasis) -> OperatorMatrix:
    """q^w for a quadratic form."""
    return weyl_quantize(PolynomialSymbol.from_quadratic_form(q), basis)
