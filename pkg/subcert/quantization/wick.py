"""
Wick Quantization
Coherent-state (wave-packet) quantization: the closed form through Gaussian
smoothing, the quadrature oracle a^Wick = ∫ a(Y) Σ_Y dY, the wave-packet
transform and the composition residual.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import roots_hermite

from subcert.errors import DegreeError, DimensionMismatch, InputError, NumericalFailure
from subcert.quantization.hermite import Convention, HermiteBasis, coherent_coefficients
from subcert.quantization.symbols import PolynomialSymbol
from subcert.quantization.weyl import OperatorMatrix, weyl_quantize

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-6
COMPOSITION_GUARD = 4

Pointwise = Callable[[np.ndarray], np.ndarray]


def gaussian_smoothing(a: PolynomialSymbol, convention: Convention = Convention.BODY) -> PolynomialSymbol:
    """
    a~ = E[a(X + Y)] for Y Gaussian with the convention's per-coordinate variance v.

    For degree <= 4 the heat series stops: a + (v/2) Δa + (v^2/8) Δ²a.
    """
    v = Convention(convention).wick_variance
    lap = a.laplacian()
    return a + lap * (v / 2.0) + lap.laplacian() * (v * v / 8.0)


def wick_correction(a: PolynomialSymbol, convention: Convention = Convention.BODY) -> complex:
    """Constant a^Wick - a^w for a symbol of degree <= 2, i.e. tr(a'') v / 2."""
    if a.degree > 2:
        raise DegreeError("The Wick correction is a constant only for degree <= 2")
    v = Convention(convention).wick_variance
    lap = a.laplacian()
    return complex(lap.coeffs.get((0,) * (2 * a.n), 0.0)) * v / 2.0


def wick_quantize(a: PolynomialSymbol, basis: HermiteBasis) -> OperatorMatrix:
    """a^Wick = (a~)^w."""
    return weyl_quantize(gaussian_smoothing(a, basis.convention), basis)


def projector_symbol(Y: np.ndarray, X: np.ndarray, convention: Convention = Convention.BODY) -> np.ndarray:
    """Weyl symbol of Σ_Y: 2^n e^{-|X-Y|^2 / (2v)} with v the convention's variance."""
    Y = np.asarray(Y, dtype=float)
    X = np.asarray(X, dtype=float)
    n = Y.shape[-1] // 2
    v = Convention(convention).wick_variance
    return 2.0**n * np.exp(-np.sum((X - Y) ** 2, axis=-1) / (2.0 * v))


# ── Quadrature ───────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Phase-space nodes (convention coordinates), coherent labels and weights for ∫ · Σ_Y dY."""

    n: int
    convention: Convention
    points: np.ndarray
    labels: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.weights)

    @classmethod
    def gauss_hermite(cls, n: int, nodes: int, convention: Convention = Convention.BODY) -> "QuadratureGrid":
        """Tensor Gauss-Hermite grid, exact for polynomial times the coherent Gaussian up to degree 2*nodes-1 per axis."""
        if nodes < 1:
            raise InputError("nodes must be >= 1", kind="range")
        convention = Convention(convention)
        t, w = roots_hermite(nodes)
        axis_weights = w * np.exp(t**2)
        T = np.array(list(itertools.product(t, repeat=2 * n)))
        W = np.prod(np.array(list(itertools.product(axis_weights, repeat=2 * n))), axis=1)
        labels = T[:, :n] + 1j * T[:, n:]
        body = math.sqrt(2.0) * T
        return cls(n, convention, body * convention.variable_scale, labels, W / math.pi**n)

    @classmethod
    def point_mass(cls, point: np.ndarray, convention: Convention = Convention.BODY) -> "QuadratureGrid":
        """A single node of weight one, so the quadrature returns Σ_Y itself."""
        convention = Convention(convention)
        point = np.atleast_1d(np.asarray(point, dtype=float))
        n = point.shape[-1] // 2
        body = point / convention.variable_scale
        label = (body[:n] + 1j * body[n:]) / math.sqrt(2.0)
        return cls(n, convention, point[None, :], label[None, :], np.ones(1))


def _packet_coefficients(basis: HermiteBasis, grid: QuadratureGrid) -> np.ndarray:
    """C[p, alpha] = <h_alpha, phi_{Y_p}>, shape (points, basis.dim)."""
    if grid.n != basis.n:
        raise DimensionMismatch(f"Grid has n={grid.n}, basis has n={basis.n}")
    size = basis.max_level + 1
    C = np.ones((grid.size, basis.dim), dtype=complex)
    for i in range(basis.n):
        modes = coherent_coefficients(grid.labels[:, i], size)
        C *= modes[:, basis.alphas[:, i]]
    return C


def default_grid(basis: HermiteBasis, extra_nodes: int = 4) -> QuadratureGrid:
    return QuadratureGrid.gauss_hermite(basis.n, basis.max_level + extra_nodes, basis.convention)


def wick_by_quadrature(
    a: Union[PolynomialSymbol, Pointwise],
    basis: HermiteBasis,
    grid: Optional[QuadratureGrid] = None,
    tol: float = IDENTITY_TOL,
) -> OperatorMatrix:
    """
    Σ_p w_p a(Y_p) Σ_{Y_p} with Σ_Y the rank-one projection onto the wave packet at Y.

    Grids with more than one node are first checked against 1^Wick = Id.
    """
    grid = grid or default_grid(basis)
    if Convention(grid.convention) is not basis.convention:
        raise InputError("Grid and basis use different conventions", kind="range")
    evaluate = a.evaluate if isinstance(a, PolynomialSymbol) else a
    values = np.asarray(evaluate(grid.points), dtype=complex)

    C = _packet_coefficients(basis, grid)
    if grid.size > 1:
        identity = (C.T * grid.weights) @ C.conj()
        err = float(np.max(np.abs(identity - np.eye(basis.dim))))
        if err > tol:
            raise NumericalFailure(f"Quadrature grid too coarse: 1^Wick off identity by {err:.3e}", kind="grid")

    M = (C.T * (grid.weights * values)) @ C.conj()
    degree = a.degree if isinstance(a, PolynomialSymbol) else basis.max_level
    return OperatorMatrix(basis, M, band=degree, guard=degree)


def wave_packet_transform(u: np.ndarray, basis: HermiteBasis, grid: Optional[QuadratureGrid] = None) -> np.ndarray:
    """W u(Y_p) = <phi_{Y_p}, u> at the grid nodes."""
    grid = grid or default_grid(basis)
    u = np.asarray(u, dtype=complex)
    if u.shape[0] != basis.dim:
        raise DimensionMismatch(f"Vector has {u.shape[0]} entries, basis has {basis.dim}")
    return _packet_coefficients(basis, grid).conj() @ u


def wave_packet_norm(u: np.ndarray, basis: HermiteBasis, grid: Optional[QuadratureGrid] = None) -> float:
    """||W u|| under the grid's quadrature weights."""
    grid = grid or default_grid(basis)
    Wu = wave_packet_transform(u, basis, grid)
    return float(np.sqrt(np.sum(grid.weights * np.abs(Wu) ** 2)))


# ── Composition ──────────────────────────────────────────────────────────────


def composition_symbol(a: PolynomialSymbol, b: PolynomialSymbol, convention: Convention) -> PolynomialSymbol:
    """ab - v a'.b' + (v/i){a, b}."""
    v = Convention(convention).wick_variance
    return a * b - a.gradient_dot(b) * v + a.poisson(b) * (v / 1j)


def composition_residual(a: PolynomialSymbol, b: PolynomialSymbol, basis: HermiteBasis) -> OperatorMatrix:
    """S = a^Wick b^Wick - [ab - v a'.b' + (v/i){a,b}]^Wick, trusted on the interior block."""
    if a.degree > 2 or b.degree > 2:
        raise DegreeError("composition_residual takes symbols of degree <= 2")
    A = wick_quantize(a, basis)
    B = wick_quantize(b, basis)
    C = wick_quantize(composition_symbol(a, b, basis.convention), basis)
    S = A.matrix @ B.matrix - C.matrix
    return OperatorMatrix(basis, S, band=4, guard=COMPOSITION_GUARD)
