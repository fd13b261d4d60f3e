"""
Tests for subcert.quantization.wick: closed-form Wick quantization against the
quadrature oracle, corrections, positivity and composition.
"""

import math

import numpy as np
import pytest
from scipy import linalg

from subcert.errors import DegreeError, DimensionMismatch, InputError, NumericalFailure
from subcert.quantization.hermite import Convention, HermiteBasis
from subcert.quantization.symbols import PolynomialSymbol
from subcert.quantization.weyl import weyl_quantize
from subcert.quantization.wick import (
    QuadratureGrid,
    composition_residual,
    gaussian_smoothing,
    projector_symbol,
    wave_packet_norm,
    wave_packet_transform,
    wick_by_quadrature,
    wick_correction,
    wick_quantize,
)

OSCILLATOR = PolynomialSymbol.from_terms(1, [("x1*x1", 1.0), ("xi1*xi1", 1.0)])


class TestCorrections:
    """Tests for the constant a^Wick - a^w."""

    def test_oscillator_appendix(self):
        """Test the correction of x^2 + xi^2 is 1/(2 pi) in the appendix convention."""
        assert wick_correction(OSCILLATOR, Convention.APPENDIX) == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-10)

    def test_oscillator_body(self):
        """Test the correction of x^2 + xi^2 is 1 in the body convention."""
        assert wick_correction(OSCILLATOR, Convention.BODY) == pytest.approx(1.0, abs=1e-12)

    def test_linear_symbols_have_no_correction(self):
        """Test linear symbols quantize identically."""
        a = PolynomialSymbol.from_terms(2, [("x1", 2.0), ("xi2", -1.0j)])
        assert wick_correction(a) == 0

    def test_degree_limit(self):
        """Test the correction is only a constant up to degree two."""
        with pytest.raises(DegreeError):
            wick_correction(PolynomialSymbol.from_terms(1, [("x1*x1*x1", 1.0)]))

    @pytest.mark.parametrize("convention", list(Convention))
    def test_difference_is_scalar(self, convention):
        """Test a^Wick - a^w is the correction times the identity."""
        a = PolynomialSymbol.from_terms(2, [("x1*x1", 1.0), ("x2*xi1", 0.5j), ("xi2*xi2", 2.0)])
        basis = HermiteBasis(2, 5, convention)
        diff = wick_quantize(a, basis).matrix - weyl_quantize(a, basis).matrix
        assert np.allclose(diff, wick_correction(a, convention) * np.eye(basis.dim))


class TestSmoothing:
    """Tests for Gaussian smoothing of symbols."""

    def test_quartic(self):
        """Test E[(x + Y)^4] = x^4 + 3 x^2 + 3/4 for variance 1/2."""
        a = PolynomialSymbol.from_terms(1, [("x1*x1*x1*x1", 1.0)])
        expected = PolynomialSymbol.from_terms(1, [("x1*x1*x1*x1", 1.0), ("x1*x1", 3.0), ("1", 0.75)])
        assert gaussian_smoothing(a, Convention.BODY).close_to(expected)

    def test_projector_symbol_peak(self):
        """Test the Weyl symbol of Σ_Y equals 2^n at Y."""
        Y = np.array([0.3, -1.0, 0.5, 2.0])
        assert projector_symbol(Y, Y) == pytest.approx(4.0)
        assert projector_symbol(Y, Y + 10.0) < 1e-10


class TestQuadratureOracle:
    """Tests for a^Wick = ∫ a(Y) Σ_Y dY by Gauss-Hermite quadrature."""

    @pytest.mark.parametrize("convention", list(Convention))
    def test_identity(self, convention):
        """Test 1^Wick is the identity."""
        basis = HermiteBasis(1, 6, convention)
        one = wick_by_quadrature(PolynomialSymbol.constant(1), basis)
        assert np.allclose(one.matrix, np.eye(basis.dim), atol=1e-8)

    @pytest.mark.parametrize("convention", list(Convention))
    @pytest.mark.parametrize(
        "terms",
        [
            [("x1*x1", 1.0), ("xi1*xi1", 1.0)],
            [("x1*xi1", 1.0), ("xi1*xi1", 0.5j)],
            [("x1", 1.0), ("xi1*xi1", 2.0)],
        ],
    )
    def test_matches_closed_form(self, convention, terms):
        """Test the quadrature reproduces the closed form (a~)^w."""
        a = PolynomialSymbol.from_terms(1, terms)
        basis = HermiteBasis(1, 6, convention)
        closed = wick_quantize(a, basis).matrix
        oracle = wick_by_quadrature(a, basis).matrix
        assert np.allclose(oracle, closed, atol=1e-8)

    def test_two_dimensions(self):
        """Test the oracle on a coupled symbol in two dimensions."""
        a = PolynomialSymbol.from_terms(2, [("x1*xi2", 1.0), ("x2*x2", 1.0j)])
        basis = HermiteBasis(2, 3)
        assert np.allclose(wick_by_quadrature(a, basis).matrix, wick_quantize(a, basis).matrix, atol=1e-8)

    def test_coarse_grid_detected(self):
        """Test a grid that cannot reproduce the identity is a numerical failure."""
        basis = HermiteBasis(1, 6)
        grid = QuadratureGrid.gauss_hermite(1, 2)
        with pytest.raises(NumericalFailure) as exc:
            wick_by_quadrature(PolynomialSymbol.constant(1), basis, grid)
        assert exc.value.kind == "grid"

    def test_convention_mismatch(self):
        """Test grid and basis must share a convention."""
        basis = HermiteBasis(1, 4, Convention.BODY)
        grid = QuadratureGrid.gauss_hermite(1, 8, Convention.APPENDIX)
        with pytest.raises(InputError):
            wick_by_quadrature(PolynomialSymbol.constant(1), basis, grid)

    def test_point_mass_is_rank_one_projector(self):
        """Test a single node gives the projection onto one wave packet."""
        basis = HermiteBasis(1, 30)
        grid = QuadratureGrid.point_mass(np.array([0.7, -0.4]))
        P = wick_by_quadrature(PolynomialSymbol.constant(1), basis, grid).matrix
        assert np.allclose(P @ P, P, atol=1e-10)
        assert np.trace(P).real == pytest.approx(1.0, abs=1e-10)

    def test_wave_packet_isometry(self):
        """Test ||W u|| = ||u|| for a unit vector."""
        basis = HermiteBasis(1, 6)
        u = np.zeros(basis.dim, dtype=complex)
        u[0], u[3] = 0.6, 0.8j
        assert wave_packet_norm(u, basis) == pytest.approx(1.0, abs=1e-8)


class TestPositivity:
    """Tests for non-negativity of Wick quantization."""

    @pytest.mark.parametrize(
        "terms,floor",
        [([("xi1*xi1", 1.0)], 0.5), ([("x1*x1", 1.0), ("xi1*xi1", 1.0)], 2.0)],
    )
    def test_nonnegative_symbols(self, terms, floor):
        """Test a >= 0 gives a^Wick >= the smoothing constant."""
        a = PolynomialSymbol.from_terms(1, terms)
        block = wick_quantize(a, HermiteBasis(1, 10)).hermitian_part().matrix
        assert linalg.eigvalsh(block)[0] >= floor - 1e-9


class TestComposition:
    """Tests for the composition residual."""

    def test_linear_symbols_compose_exactly(self):
        """Test x^Wick xi^Wick = (x xi + i/2)^Wick with no residual."""
        a = PolynomialSymbol.from_terms(1, [("x1", 1.0)])
        b = PolynomialSymbol.from_terms(1, [("xi1", 1.0)])
        S = composition_residual(a, b, HermiteBasis(1, 10))
        assert S.interior_norm() == pytest.approx(0.0, abs=1e-10)

    def test_degree_limit(self):
        """Test symbols above degree two are refused."""
        a = PolynomialSymbol.from_terms(1, [("x1*x1*x1", 1.0)])
        with pytest.raises(DegreeError):
            composition_residual(a, a, HermiteBasis(1, 10))


def test_wave_packet_transform_shape():
    """Test the transform has one value per node and checks the vector length."""
    basis = HermiteBasis(1, 4)
    grid = QuadratureGrid.gauss_hermite(1, 6)
    u = np.eye(basis.dim)[0]
    assert wave_packet_transform(u, basis, grid).shape == (grid.size,)
    with pytest.raises(DimensionMismatch):
        wave_packet_transform(np.zeros(basis.dim + 1), basis, grid)
