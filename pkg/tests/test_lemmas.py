"""
Tests for subcert.weights.lemmas: sampled auxiliary inequalities.
"""

import numpy as np
import pytest

from subcert.core.examples import chain, ladder
from subcert.errors import InputError
from subcert.weights.assembly import WeightAssembly
from subcert.weights.lemmas import LEMMAS, adapted_points, lemma_catalogue, lemma_sampler
from subcert.weights.search import SampleRegion


@pytest.fixture
def region():
    return SampleRegion.default(2, radii=8, directions=32)


class TestPlainLemmas:
    """Tests for lemmas sampled on the plain region."""

    @pytest.mark.parametrize("lemma_id", ["cauchy_schwarz", "gradient_bound"])
    def test_exact_inequalities_hold(self, region, lemma_id):
        """Test inequalities with constant one hold on every sample."""
        report = lemma_sampler(lemma_id, chain(2), region, WeightAssembly(2))
        assert report.passed
        assert report.fitted_constant <= 1.0 + 1e-10
        assert report.claimed_constant == 1.0

    def test_edge_bracket_fits_a_constant(self, region):
        """Test the edge cutoff bracket has a finite fitted constant and a shell slope."""
        report = lemma_sampler("edge_bracket", chain(2), region, WeightAssembly(2))
        assert np.isfinite(report.fitted_constant)
        assert "shell_slope" in report.scaling

    def test_default_assembly(self):
        """Test the assembly level defaults to the system's k0."""
        report = lemma_sampler("cauchy_schwarz", ladder(1), SampleRegion.default(1, radii=4, directions=8))
        assert report.passed


class TestAdaptedLemmas:
    """Tests for Λ-dependent lemmas on adapted points."""

    def test_power_bracket(self, region):
        """Test |H_p r_k| <= 4 (r_k r_{k+1})^(1/2) with the constant attained."""
        report = lemma_sampler("power_bracket", chain(2), region, WeightAssembly(2))
        assert report.passed
        assert 3.5 < report.fitted_constant <= 4.0 * (1.0 + 1e-8)

    @pytest.mark.parametrize("lemma_id", ["bracket_quotient", "commutator_deviation"])
    def test_inverse_root_scaling(self, region, lemma_id):
        """Test the fitted constant drops like Λ^(-1/2)."""
        report = lemma_sampler(lemma_id, chain(2), region, WeightAssembly(2))
        assert set(report.scaling) == {"lambda=1", "lambda=4", "lambda=16"}
        ratio = report.scaling["lambda=4"] / report.scaling["lambda=1"]
        assert 0.25 <= ratio <= 1.0
        assert report.scaling_ok

    def test_needs_level_two(self, region):
        """Test adapted lemmas refuse m = 1."""
        with pytest.raises(InputError):
            lemma_sampler("bracket_quotient", chain(2), region, WeightAssembly(1))

    def test_adapted_points_lie_in_region(self, region):
        """Test adapted points satisfy Λ r_0 <~ r_1^(1/3)."""
        grouped = adapted_points(chain(2), 1, region, lambdas=(1.0, 4.0))
        assert set(grouped) == {1.0, 4.0}
        for Y in grouped.values():
            assert Y.shape[1] == 4 and len(Y) > 0

    def test_adapted_points_need_k(self, region):
        """Test k = 0 has no adapted region."""
        with pytest.raises(InputError):
            adapted_points(chain(2), 0, region)


def test_unknown_lemma(region):
    """Test unknown lemma ids are refused."""
    with pytest.raises(InputError):
        lemma_sampler("no_such_lemma", chain(2), region)


def test_catalogue_lists_every_lemma():
    """Test the catalogue mirrors the registry."""
    names = [entry["name"] for entry in lemma_catalogue()]
    assert names == list(LEMMAS)
