"""
Tests for subcert.core.symplectic: forms, Hamilton maps, brackets and the r_k families.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subcert.core.symplectic import (
    PhaseSpace,
    QuadraticForm,
    SystemOfForms,
    bracket_identity_check,
    bracket_identity_sides,
    gram_matrices,
    hamilton_map,
    hamilton_map_of_polarized,
    hamilton_vector_field,
    iterated_commutator_map,
    iterated_commutator_symbol,
    kee_identities,
    numerical_range_sample,
    poisson_bracket,
    poisson_bracket_at,
    polarized_word_form,
    r_tower,
    rtilde,
    sphere_directions,
    word_matrix,
)
from subcert.errors import (
    DegreeError,
    DimensionMismatch,
    HypothesisViolation,
    IndexOutOfRange,
    InputError,
    NumericalFailure,
)

from conftest import random_system

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestQuadraticForm:
    """Tests for QuadraticForm construction and evaluation."""

    def test_symmetrizes_matrix(self):
        """Test the coefficient matrix is replaced by its symmetric part."""
        q = QuadraticForm(PhaseSpace(1), [[1.0, 2.0], [0.0, 3.0]])
        assert np.allclose(q.matrix, [[1.0, 1.0], [1.0, 3.0]])

    def test_rejects_negative_real_part_when_claimed(self):
        """Test a claimed form with an indefinite real part is refused."""
        with pytest.raises(HypothesisViolation) as exc:
            QuadraticForm.from_monomials(1, [("x1*x1", -1.0)], name="bad", claimed_nonneg_real_part=True)
        assert exc.value.kind == "hypothesis"
        assert exc.value.min_eigenvalue < 0

    def test_unclaimed_negative_form_is_allowed(self):
        """Test brackets and differences may have indefinite real parts."""
        q = QuadraticForm.from_monomials(1, [("x1*xi1", 1.0)])
        assert q.min_real_eigenvalue < 0

    def test_shape_mismatch(self):
        """Test a matrix of the wrong size is refused."""
        with pytest.raises(DimensionMismatch):
            QuadraticForm(PhaseSpace(2), np.eye(2))

    def test_from_monomials(self):
        """Test xi1^2 + i x1^2 lands on the right matrix entries."""
        q = QuadraticForm.from_monomials(1, [("xi1*xi1", 1.0), ("x1*x1", 1j)])
        assert np.allclose(q.matrix, [[1j, 0], [0, 1.0]])

    def test_cross_terms_split(self):
        """Test a mixed monomial puts half its coefficient on each off-diagonal entry."""
        q = QuadraticForm.from_monomials(2, [("x2*xi1", 2.0)])
        assert q.matrix[1, 2] == pytest.approx(1.0)
        assert q.matrix[2, 1] == pytest.approx(1.0)

    @pytest.mark.parametrize("mono", ["x1", "x1*x1*xi1"])
    def test_non_quadratic_monomials(self, mono):
        """Test monomials of degree other than two are refused."""
        with pytest.raises(DegreeError):
            QuadraticForm.from_monomials(1, [(mono, 1.0)])

    def test_unknown_variable(self):
        """Test unknown and out-of-range variables are input errors."""
        with pytest.raises(InputError):
            QuadraticForm.from_monomials(1, [("y1*y1", 1.0)])
        with pytest.raises(DimensionMismatch):
            QuadraticForm.from_monomials(1, [("x2*x2", 1.0)])

    def test_to_monomials_inverts_from_monomials(self):
        """Test the monomial expansion rebuilds the same form."""
        terms = [("x1*x1", 1.0), ("x1*xi2", 0.5 - 2j), ("xi2*xi2", 3j)]
        q = QuadraticForm.from_monomials(2, terms)
        again = QuadraticForm.from_monomials(2, q.to_monomials())
        assert np.allclose(q.matrix, again.matrix)

    def test_evaluate_matches_polarization(self, rng):
        """Test q(X) = q(X; X) and q is homogeneous of degree two."""
        q = random_system(7).forms[0]
        X = rng.standard_normal((5, 4))
        assert np.allclose(q.evaluate(X), q.polarize(X, X))
        assert np.allclose(q.evaluate(3.0 * X), 9.0 * q.evaluate(X))

    def test_parts(self):
        """Test real and imaginary parts split the matrix."""
        q = QuadraticForm.from_monomials(1, [("xi1*xi1", 1.0), ("x1*x1", 1j)])
        assert np.allclose(q.real_part().matrix + 1j * q.imag_part().matrix, q.matrix)
        assert q.real_part().is_real


class TestHamiltonMap:
    """Tests for the Hamilton map F = M^{-1} Q."""

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_defining_identity(self, seed):
        """Test sigma(X, F Y) = q(X; Y) for random forms and points."""
        gen = np.random.default_rng(seed)
        q = random_system(seed).forms[1]
        F = hamilton_map(q)
        X, Y = gen.standard_normal((2, 4))
        assert q.space.sigma(X, F.apply(Y)) == pytest.approx(q.polarize(X, Y), abs=1e-10 * (1 + q.norm))

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_skew_symmetric_for_sigma(self, seed):
        """Test F is skew with respect to sigma."""
        q = random_system(seed).forms[0]
        assert hamilton_map(q).skew_residual() <= 1e-10 * (1 + q.norm)

    def test_real_and_imaginary_parts(self):
        """Test Re F and Im F are the Hamilton maps of Re q and Im q."""
        q = random_system(3).forms[0]
        F = hamilton_map(q)
        assert np.allclose(F.re_part, hamilton_map(q.real_part()).matrix.real)
        assert np.allclose(F.im_part, hamilton_map(q.imag_part()).matrix.real)

    def test_identity_checked_through_sigma(self, monkeypatch):
        """Test a sign-flipped symplectic pairing makes the identity check fail."""
        q = random_system(5).forms[0]
        flipped = PhaseSpace.sigma
        monkeypatch.setattr(PhaseSpace, "sigma", lambda self, X, Y: -flipped(self, X, Y))
        with pytest.raises(NumericalFailure):
            hamilton_map(q)


class TestPoissonBracket:
    """Tests for brackets of quadratic forms."""

    def test_xi_squared_with_x_squared(self):
        """Test {xi^2, x^2} = 4 x xi and {x^2, xi^2} = -4 x xi."""
        x2 = QuadraticForm.from_monomials(1, [("x1*x1", 1.0)])
        xi2 = QuadraticForm.from_monomials(1, [("xi1*xi1", 1.0)])
        assert poisson_bracket(xi2, x2).to_monomials() == [("x1*xi1", 4.0)]
        assert poisson_bracket(x2, xi2).to_monomials() == [("x1*xi1", -4.0)]

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_matrix_and_gradient_forms_agree(self, seed):
        """Test the bracket matrix matches the pointwise gradient contraction."""
        gen = np.random.default_rng(seed)
        sys = random_system(seed)
        a, b = sys.forms
        X = gen.standard_normal((6, 4))
        assert np.allclose(poisson_bracket(a, b).evaluate(X), poisson_bracket_at(a, b, X), atol=1e-9)

    def test_antisymmetry(self):
        """Test {a, b} = -{b, a}."""
        a, b = random_system(11).forms
        assert np.allclose(poisson_bracket(a, b).matrix, -poisson_bracket(b, a).matrix)

    def test_vector_field(self, rng):
        """Test H_a f = v . grad f for the Hamilton field v."""
        a, b = random_system(5).forms
        X = rng.standard_normal((4, 4))
        v = hamilton_vector_field(a, X)
        assert np.allclose(np.einsum("pi,pi->p", v, b.gradient(X)), poisson_bracket_at(a, b, X))

    def test_mismatched_spaces(self):
        """Test forms on different phase spaces cannot be bracketed."""
        with pytest.raises(DimensionMismatch):
            poisson_bracket(QuadraticForm.identity(PhaseSpace(1)), QuadraticForm.identity(PhaseSpace(2)))


class TestTowerFamilies:
    """Tests for r_k, r~_{k,p} and the polarized bracket identities."""

    def test_gram_recursion(self):
        """Test r_k(X) is the sum over words of Re q_j(Im F_w X)."""
        sys = random_system(13)
        X = np.random.default_rng(1).standard_normal(4)
        r2 = r_tower(sys, 2)[2].evaluate(X).real
        brute = 0.0
        for j in range(sys.N):
            for w in [(a, b) for a in range(sys.N) for b in range(sys.N)]:
                Y = word_matrix(sys, w) @ X
                brute += sys.forms[j].real_part().evaluate(Y).real
        assert r2 == pytest.approx(brute, rel=1e-10)

    def test_ladder_tower_is_identity(self, ladder_system):
        """Test G_0 + G_1 = I for xi^2 + i x^2."""
        total = sum(gram_matrices(ladder_system, 1))
        assert np.allclose(total, np.eye(2))

    def test_ladder_rtilde(self, ladder_system):
        """Test r~_1 = -x xi and its bracket is 2 r_1."""
        rt = rtilde(ladder_system, 1, 0)
        assert rt.to_monomials() == [("x1*xi1", -1.0)]
        bracket = poisson_bracket(ladder_system.im_forms[0], rt)
        assert np.allclose(bracket.matrix, 2.0 * gram_matrices(ladder_system, 1)[1])

    @given(seeds, st.integers(min_value=0, max_value=2), st.integers(min_value=0, max_value=1))
    @settings(max_examples=30, deadline=None)
    def test_bracket_of_r_k(self, seed, k, p):
        """Test H_p r_k = 4 r~_{k+1,p} and the second-order identity."""
        sys = random_system(seed)
        X = np.random.default_rng(seed).standard_normal((3, 4))
        first, second = kee_identities(sys, p, k, X)
        scale = max(1.0, sys.scale) ** (2 * k + 4) * 16.0
        assert first <= 1e-9 * scale
        assert second <= 1e-9 * scale

    @given(
        seeds,
        st.lists(st.integers(min_value=0, max_value=1), max_size=2),
        st.integers(min_value=0, max_value=2),
        st.integers(min_value=0, max_value=2),
    )
    @settings(max_examples=30, deadline=None)
    def test_polarized_bracket_identity(self, seed, word, s1, s2):
        """Test H_{Im q_p} of a polarized word form splits into the two shifted forms."""
        sys = random_system(seed)
        X = np.random.default_rng(seed + 1).standard_normal(4)
        lhs, rhs = bracket_identity_sides(sys, 0, 1, word, s1, s2, X)
        assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-8)

    @given(seeds, st.lists(st.integers(min_value=0, max_value=1), max_size=2))
    @settings(max_examples=20, deadline=None)
    def test_closed_form_hamilton_map(self, seed, word):
        """Test the closed-form Hamilton map of a polarized word form."""
        sys = random_system(seed)
        form = polarized_word_form(sys, 1, 0, word, 1, 2)
        expected = hamilton_map(form).matrix.real
        closed = hamilton_map_of_polarized(sys, 1, 0, word, 1, 2)
        assert np.allclose(closed, expected, atol=1e-9 * max(1.0, np.abs(expected).max()))

    def test_iterated_commutator_map(self):
        """Test nested commutators of Hamilton maps match the iterated double bracket."""
        sys = random_system(21)
        symbol = iterated_commutator_symbol(sys, 0, [1, 0])
        F = iterated_commutator_map(sys, 0, [1, 0])
        expected = hamilton_map(symbol).matrix.real
        assert np.allclose(F, expected, atol=1e-9 * max(1.0, np.abs(expected).max()))

    def test_index_checks(self):
        """Test out-of-range operator and word indices are rejected."""
        sys = random_system(2)
        with pytest.raises(IndexOutOfRange):
            polarized_word_form(sys, 2, 0, [], 0, 0)
        with pytest.raises(IndexOutOfRange):
            word_matrix(sys, [0, 5])
        with pytest.raises(IndexOutOfRange):
            rtilde(sys, 0, 0)


class TestSystemOfForms:
    """Tests for SystemOfForms bookkeeping."""

    def test_needs_a_form(self):
        """Test an empty system is refused."""
        with pytest.raises(InputError):
            SystemOfForms(PhaseSpace(1), ())

    def test_forms_share_a_space(self):
        """Test mixing dimensions is refused."""
        with pytest.raises(DimensionMismatch):
            SystemOfForms.of(QuadraticForm.identity(PhaseSpace(1)), QuadraticForm.identity(PhaseSpace(2)))

    def test_default_names_and_with_form(self):
        """Test names default to q1..qN and grow with with_form."""
        sys = SystemOfForms.of(QuadraticForm.identity(PhaseSpace(1)))
        assert sys.names == ("q1",)
        bigger = sys.with_form(QuadraticForm.identity(PhaseSpace(1)), name="extra")
        assert bigger.names == ("q1", "extra")
        assert bigger.N == 2

    def test_sum_form(self, sec13):
        """Test the summed form adds coefficient matrices."""
        total = sec13.sum_form()
        assert np.allclose(total.matrix, sec13.forms[0].matrix + sec13.forms[1].matrix)


def test_sphere_directions_include_axes():
    """Test the axes come first and every direction is a unit vector."""
    U = sphere_directions(4, 10, seed=3)
    assert U.shape == (10, 4)
    assert np.allclose(U[:4], np.eye(4))
    assert np.allclose(np.linalg.norm(U, axis=1), 1.0)


def test_bracket_identity_check_residual(rng):
    """Test the scalar residual of the polarized bracket identity vanishes."""
    sys = random_system(11)
    X = rng.standard_normal(4)
    assert bracket_identity_check(sys, 1, 0, [1], 1, 0, X) < 1e-8 * (1.0 + float(X @ X)) * max(1.0, sys.scale) ** 3


def test_numerical_range_sample(elliptic_system):
    """Test (1+i)|X|^2 takes the single value 1+i on the unit sphere."""
    values = numerical_range_sample(elliptic_system.forms[0], 12, seed=5)
    assert values.shape == (12,)
    assert np.allclose(values, 1.0 + 1.0j)
    with pytest.raises(IndexOutOfRange):
        numerical_range_sample(elliptic_system.forms[0], 0)
