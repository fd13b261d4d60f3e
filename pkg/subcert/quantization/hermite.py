"""
Hermite Basis
Truncated multi-mode Hermite bases, the two quantization conventions and the
one-mode ladder matrices the Weyl and Wick assemblies are built from.
"""

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Tuple

import numpy as np
from scipy.special import gammaln

from subcert.core.symplectic import PhaseSpace, QuadraticForm
from subcert.errors import InputError


class Convention(str, Enum):
    """BODY: xi <-> D_x. APPENDIX: xi <-> D_x / (2 pi)."""

    BODY = "body"
    APPENDIX = "appendix"

    @property
    def variable_scale(self) -> float:
        """Factor s with a^w (this convention) unitarily equal to a(sX)^w (body)."""
        return 1.0 if self is Convention.BODY else 1.0 / math.sqrt(2.0 * math.pi)

    @property
    def wick_variance(self) -> float:
        """Per-coordinate variance of the coherent-state Gaussian."""
        return 0.5 if self is Convention.BODY else 1.0 / (4.0 * math.pi)


def convention_transport(q: QuadraticForm) -> Tuple[QuadraticForm, np.ndarray]:
    """
    q~(x, xi) = q(x, xi / 2 pi) and the symplectic scaling T = diag((2pi)^-1/2, (2pi)^1/2),
    for which q~ o T = q / (2 pi).
    """
    n = q.n
    D = np.diag(np.concatenate([np.ones(n), np.full(n, 1.0 / (2.0 * math.pi))]))
    T = np.diag(
        np.concatenate([np.full(n, (2.0 * math.pi) ** -0.5), np.full(n, (2.0 * math.pi) ** 0.5)])
    )
    transported = QuadraticForm(q.space, D @ q.matrix @ D, name=f"{q.name}~" if q.name else "")
    return transported, T


def multi_indices(n: int, max_level: int) -> np.ndarray:
    """All alpha in N^n with |alpha| <= max_level, graded by level then lexicographic."""
    rows = []
    for level in range(max_level + 1):
        for combo in itertools.combinations_with_replacement(range(n), level):
            alpha = [0] * n
            for i in combo:
                alpha[i] += 1
            rows.append(alpha)
    out = np.array(sorted(rows, key=lambda a: (sum(a), [-v for v in a])), dtype=int)
    return out.reshape(-1, n)


@dataclass(frozen=True, eq=False)
class HermiteBasis:
    """Hermite functions h_alpha with |alpha| <= max_level, in a given convention."""

    n: int
    max_level: int
    convention: Convention = Convention.BODY
    order: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        PhaseSpace(self.n)
        if self.max_level < 0:
            raise InputError(f"max_level must be >= 0, got {self.max_level}", kind="range")
        object.__setattr__(self, "convention", Convention(self.convention))

    @cached_property
    def alphas(self) -> np.ndarray:
        base = multi_indices(self.n, self.max_level)
        if self.order:
            if sorted(self.order) != list(range(len(base))):
                raise InputError("order must be a permutation of the basis", kind="range")
            base = base[list(self.order)]
        return base

    @property
    def dim(self) -> int:
        return math.comb(self.max_level + self.n, self.n)

    @cached_property
    def levels(self) -> np.ndarray:
        return self.alphas.sum(axis=1)

    @cached_property
    def index_map(self) -> Dict[Tuple[int, ...], int]:
        return {tuple(int(v) for v in a): i for i, a in enumerate(self.alphas)}

    def index_of(self, alpha) -> int:
        key = tuple(int(v) for v in alpha)
        if key not in self.index_map:
            raise InputError(f"Multi-index {key} is not in the basis", kind="range")
        return self.index_map[key]

    def interior(self, guard: int) -> np.ndarray:
        """Flat indices with level <= max_level - guard."""
        return np.flatnonzero(self.levels <= self.max_level - guard)

    def permuted(self, order) -> "HermiteBasis":
        return HermiteBasis(self.n, self.max_level, self.convention, tuple(int(i) for i in order))

    def oscillator_eigenvalues(self) -> np.ndarray:
        """Spectrum of (|x|^2 + |xi|^2)^w on this basis."""
        values = 2.0 * self.levels + self.n
        return values if self.convention is Convention.BODY else values / (2.0 * math.pi)


# ── One-mode ladder matrices ─────────────────────────────────────────────────


def annihilation(size: int) -> np.ndarray:
    """a with a h_k = sqrt(k) h_{k-1}, truncated to levels 0..size-1."""
    return np.diag(np.sqrt(np.arange(1, size, dtype=float)), k=1)


def position(size: int) -> np.ndarray:
    """x = (a + a^dagger) / sqrt 2."""
    a = annihilation(size)
    return (a + a.T) / math.sqrt(2.0)


def momentum(size: int) -> np.ndarray:
    """D = -i d/dx = i (a^dagger - a) / sqrt 2."""
    a = annihilation(size)
    return 1j * (a.T - a) / math.sqrt(2.0)


def coherent_coefficients(z: np.ndarray, size: int) -> np.ndarray:
    """
    Hermite coefficients e^{-|z|^2/2} z^k / sqrt(k!) of the coherent state at z,
    for an array of complex points; shape (..., size).
    """
    z = np.asarray(z, dtype=complex)
    k = np.arange(size)
    log_norm = 0.5 * gammaln(k + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        powers = np.where(k == 0, 1.0 + 0j, z[..., None] ** k)
    return np.exp(-0.5 * np.abs(z[..., None]) ** 2 - log_norm) * powers
