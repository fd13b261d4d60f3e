"""
Tests for subcert.weights: cutoffs, bracketed values and the weight assembly.
"""

import numpy as np
import pytest

from subcert.core.examples import chain, ladder
from subcert.errors import InputError
from subcert.weights.assembly import (
    Bracketed,
    WeightAssembly,
    bracket_decomposition,
    fd_relative_error,
    partition_check,
    weight_evaluate,
)
from subcert.weights.cutoffs import CHI, PSI, W1, W2, CutoffSpec, cutoff_eval, splice


class TestCutoffs:
    """Tests for the plateau cutoffs."""

    def test_splice_symmetry(self):
        """Test s(t) + s(1 - t) = 1 and the flat ends."""
        t = np.linspace(-0.5, 1.5, 41)
        s, _ = splice(t)
        s_flip, _ = splice(1.0 - t)
        assert np.allclose(s + s_flip, 1.0)
        assert np.all(s[t <= 0] == 0.0) and np.all(s[t >= 1] == 1.0)
        assert np.all(np.diff(s) >= 0)

    @pytest.mark.parametrize(
        "cutoff,x,expected",
        [
            (PSI, 0.0, 1.0), (PSI, 1.0, 1.0), (PSI, 1.5, 0.5), (PSI, 2.0, 0.0),
            (W1, 0.0, 0.0), (W1, 1.5, 0.5), (W1, 3.0, 1.0),
            (W2, 0.75, 0.5), (W2, 1.0, 1.0),
            (CHI, 0.75, 0.5), (CHI, 1.5, 1.0), (CHI, 2.5, 0.5), (CHI, 4.0, 0.0),
        ],
    )
    def test_values(self, cutoff, x, expected):
        """Test plateau and midpoint values."""
        assert cutoff.value(x) == pytest.approx(expected)

    def test_even_in_x(self):
        """Test cutoffs depend on |x| only."""
        x = np.linspace(0.0, 3.5, 15)
        assert np.allclose(CHI.value(-x), CHI.value(x))

    @pytest.mark.parametrize("kind", ["psi", "chi", "w1", "w2"])
    def test_derivative_matches_difference(self, kind):
        """Test the analytic derivative against a central difference."""
        x = np.concatenate([np.linspace(0.55, 2.95, 25), -np.linspace(0.55, 2.95, 25)])
        h = 1e-6
        _, deriv = cutoff_eval(kind, x)
        fd = (cutoff_eval(kind, x + h)[0] - cutoff_eval(kind, x - h)[0]) / (2.0 * h)
        assert np.allclose(deriv, fd, atol=1e-6)

    def test_infinite_argument(self):
        """Test |x| = inf takes the limit value with zero derivative."""
        value, deriv = cutoff_eval("psi", np.array([np.inf, -np.inf]))
        assert np.all(value == 0.0) and np.all(deriv == 0.0)
        value, deriv = cutoff_eval("w", np.array([np.inf]))
        assert value[0] == 1.0 and deriv[0] == 0.0

    def test_unknown_kind(self):
        """Test unknown cutoff names are refused."""
        with pytest.raises(InputError):
            cutoff_eval("nope", np.zeros(1))

    @pytest.mark.parametrize("rise,fall", [((2.0, 1.0), None), ((0.0, 3.0), (1.0, 2.0))])
    def test_invalid_spec(self, rise, fall):
        """Test reversed transitions and overlapping rise/fall are refused."""
        with pytest.raises(InputError):
            CutoffSpec("bad", rise=rise, fall=fall)


class TestBracketed:
    """Tests for exact bracket propagation."""

    def test_product_rule(self, rng):
        """Test H(fg) = (Hf) g + f (Hg)."""
        f = Bracketed(rng.standard_normal(6), rng.standard_normal((2, 6)))
        g = Bracketed(rng.standard_normal(6), rng.standard_normal((2, 6)))
        fg = f * g
        assert np.allclose(fg.value, f.value * g.value)
        assert np.allclose(fg.bracket, f.bracket * g.value + f.value * g.bracket)

    def test_scalars(self):
        """Test constants carry no bracket."""
        f = Bracketed(np.array([1.0, 2.0]), np.array([[1.0, -1.0]]))
        h = 3.0 - 2.0 * f + 1.0
        assert np.allclose(h.value, [2.0, 0.0])
        assert np.allclose(h.bracket, [[-2.0, 2.0]])

    def test_power(self):
        """Test the chain rule for powers and zero where the base is not positive."""
        f = Bracketed(np.array([4.0, 0.0, -1.0]), np.array([[1.0, 1.0, 1.0]]))
        root = f.power(0.5)
        assert np.allclose(root.value, [2.0, 0.0, 0.0])
        assert np.allclose(root.bracket, [[0.25, 0.0, 0.0]])

    def test_quotient(self):
        """Test num/den^b with the conventions at den = 0."""
        num = Bracketed(np.array([2.0, 1.0, 0.0]), np.array([[1.0, 1.0, 1.0]]))
        den = Bracketed(np.array([4.0, 0.0, 0.0]), np.array([[2.0, 1.0, 1.0]]))
        q = Bracketed.quotient(num, den, 0.5)
        assert q.value[0] == pytest.approx(1.0)
        assert q.value[1] == np.inf and q.value[2] == 0.0
        # d(n d^-1/2) = n' d^-1/2 - n d' d^-3/2 / 2
        assert q.bracket[0, 0] == pytest.approx(0.5 - 0.5 * 2.0 * 2.0 / 8.0)
        assert np.all(q.bracket[0, 1:] == 0.0)

    def test_compose(self):
        """Test composition with a cutoff uses its derivative."""
        f = Bracketed(np.array([1.5]), np.array([[2.0]]))
        value, deriv = PSI(np.array([1.5]))
        out = f.compose(PSI)
        assert out.value[0] == pytest.approx(value[0])
        assert out.bracket[0, 0] == pytest.approx(2.0 * deriv[0])


class TestWeightAssembly:
    """Tests for the constants container."""

    def test_defaults(self):
        """Test Λ and α default to ones of the right length."""
        a = WeightAssembly(3)
        assert a.lambdas == [1.0, 1.0]
        assert a.alphas == [1.0]
        assert a.alpha(0) == 1.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"m": 0},
            {"m": 2, "lambdas": [1.0, 1.0]},
            {"m": 3, "alphas": [1.0, 1.0]},
            {"m": 2, "lambdas": [0.5]},
            {"m": 3, "sub": WeightAssembly(1)},
            {"m": 1, "operator_constants": [0.0]},
        ],
    )
    def test_validation(self, kwargs):
        """Test wrong lengths, constants below one and misplaced sub-assemblies."""
        with pytest.raises(InputError):
            WeightAssembly(**kwargs)

    def test_replace_and_dict(self):
        """Test replace keeps other fields and to_dict nests the sub-assembly."""
        a = WeightAssembly(2, c4=0.25, sub=WeightAssembly(1))
        b = a.replace(lambdas=[4.0])
        assert b.lambdas == [4.0] and b.c4 == 0.25
        data = b.to_dict()
        assert data["sub"]["m"] == 1
        assert data["c4"] == 0.25

    def test_level_two_needs_sub(self, rng):
        """Test weights at m >= 2 need the sub-assembly and c4."""
        with pytest.raises(InputError):
            weight_evaluate(chain(2), WeightAssembly(2), rng.standard_normal((3, 4)))


class TestWeightEvaluate:
    """Tests for g_p and its exact bracket."""

    def test_ladder_matches_difference(self, rng):
        """Test the exact bracket against finite differences at m = 1."""
        X = 3.0 * rng.standard_normal((40, 2))
        result = weight_evaluate(ladder(1), WeightAssembly(1), X, check=True)
        assert result.values.shape == (1, 40)
        assert result.fd_error < 1e-3

    def test_chain_matches_difference(self, rng):
        """Test the exact bracket against finite differences at m = 2."""
        X = 3.0 * rng.standard_normal((40, 4))
        assembly = WeightAssembly(2, c4=0.1, sub=WeightAssembly(1))
        result = weight_evaluate(chain(2), assembly, X, check=True)
        assert result.brackets.shape == (1, 40)
        assert result.fd_error < 1e-2

    def test_region_flags(self, rng):
        """Test points outside a region are counted."""
        X = rng.standard_normal((10, 2))
        result = weight_evaluate(ladder(1), WeightAssembly(1), X, region=lambda Y: Y[:, 0] > 0)
        assert result.to_dict()["points_outside_region"] == int(np.sum(X[:, 0] <= 0))

    def test_operator_constants_scale_weights(self, rng):
        """Test c_p multiplies g_p and its bracket."""
        X = rng.standard_normal((12, 2))
        plain = weight_evaluate(ladder(1), WeightAssembly(1), X)
        scaled = weight_evaluate(ladder(1), WeightAssembly(1, operator_constants=[2.0]), X)
        assert np.allclose(scaled.values, 2.0 * plain.values)
        assert np.allclose(scaled.brackets, 2.0 * plain.brackets)

    def test_operator_constants_length(self, rng):
        """Test one constant per operator is required."""
        with pytest.raises(InputError):
            weight_evaluate(ladder(1), WeightAssembly(1, operator_constants=[1.0, 1.0]), rng.standard_normal((2, 2)))

    def test_relative_error(self):
        """Test the error is relative to the largest exact value."""
        assert fd_relative_error(np.array([2.0, -4.0]), np.array([2.0, -3.0])) == pytest.approx(0.25)
        assert fd_relative_error(np.zeros(2), np.zeros(2)) == 0.0


class TestBracketDecomposition:
    """Tests for the additive split of chain-term brackets."""

    def test_level_two(self, rng):
        """Test B1..B4 sum to the exact bracket."""
        X = 2.0 * rng.standard_normal((30, 4))
        terms = bracket_decomposition(chain(2), WeightAssembly(2), 0, 0, X)
        assert sorted(terms.terms) == ["B1", "B2", "B3", "B4"]
        scale = sum(np.abs(t) for t in terms.terms.values()) + np.abs(terms.total)
        assert terms.residual <= 1e-8 * max(1.0, float(scale.max()))

    def test_level_three_has_fifth_term(self, rng):
        """Test j >= 1 adds the bracket of the W product."""
        X = 2.0 * rng.standard_normal((30, 6))
        terms = bracket_decomposition(chain(3), WeightAssembly(3), 1, 0, X)
        assert "B5" in terms.terms

    def test_j_out_of_range(self, rng):
        """Test j must lie in 0..m-2."""
        with pytest.raises(InputError):
            bracket_decomposition(chain(2), WeightAssembly(2), 1, 0, rng.standard_normal((2, 4)))


class TestPartitionCheck:
    """Tests for the covering inequality of the cutoff products."""

    @pytest.mark.parametrize("n,m", [(2, 2), (3, 3)])
    def test_margins_nonnegative(self, rng, n, m):
        """Test the cutoff products cover the region they should."""
        X = 4.0 * rng.standard_normal((200, 2 * n))
        margins = partition_check(chain(n), WeightAssembly(m, lambdas=[2.0] * (m - 1)), X)
        assert margins.min_margin >= -1e-12
        assert margins.steps.shape == (m - 1, 200)

    def test_level_one_is_trivial(self, rng):
        """Test m = 1 has nothing to cover."""
        margins = partition_check(ladder(1), WeightAssembly(1), rng.standard_normal((5, 2)))
        assert margins.min_margin == 0.0
