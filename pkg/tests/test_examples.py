"""
Tests for subcert.core.examples.
"""

import numpy as np
import pytest

from subcert.core.examples import EXAMPLES, build_example, combined_form, section_example
from subcert.errors import InputError


def test_section_example_order_and_names():
    """Test forms come as q_1..q_{n-1} then q~_1..q~_{n-1}."""
    sys = section_example(3)
    assert sys.names == ("q1", "q2", "q~1", "q~2")
    assert sys.metadata["example"] == "sec13"
    for q in sys.forms:
        assert q.claimed_nonneg_real_part


def test_section_example_coefficients():
    """Test q_1 = x1^2 + xi1^2 + i(xi1^2 + x2 xi1) for n = 2."""
    q = section_example(2).forms[0]
    terms = dict(q.to_monomials())
    assert terms["x1*x1"] == pytest.approx(1.0)
    assert terms["xi1*xi1"] == pytest.approx(1.0 + 1.0j)
    assert terms["x2*xi1"] == pytest.approx(1.0j)
    assert len(terms) == 3


def test_section_example_needs_two_dimensions():
    """Test n = 1 has no worked example."""
    with pytest.raises(InputError):
        section_example(1)


@pytest.mark.parametrize(
    "lambdas,lambdas_tilde",
    [([1.0], [1.0, 1.0]), ([-1.0, 1.0], [1.0, 1.0]), ([0.0, 0.0], [0.0, 0.0])],
)
def test_weight_validation(lambdas, lambdas_tilde):
    """Test wrong lengths, negative weights and all-zero weights are refused."""
    with pytest.raises(InputError):
        section_example(3, lambdas, lambdas_tilde)


def test_combined_form_is_sum():
    """Test the combined form is the weighted sum of the system's forms."""
    sys = section_example(3, [1.0, 2.0], [0.5, 1.0])
    q = combined_form(3, [1.0, 2.0], [0.5, 1.0])
    assert np.allclose(q.matrix, sys.sum_form().matrix)


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_build_example_defaults(name):
    """Test every named example builds with its default dimension."""
    sys = build_example(name)
    assert sys.N >= 1
    assert sys.metadata["example"] == name


def test_build_example_unknown():
    """Test unknown names are input errors."""
    with pytest.raises(InputError):
        build_example("nonexistent")
