"""
Monomial Grammar
Variable names x1..xn, xi1..xin and products "v*w*..." over them.
"""

import re
from typing import List, Tuple

from subcert.errors import DegreeError, DimensionMismatch, InputError

_VARIABLE = re.compile(r"^(xi|x)([1-9][0-9]*)$")


def variable_names(n: int) -> List[str]:
    """Coordinate names in phase-space order (x1..xn, xi1..xin)."""
    return [f"x{i}" for i in range(1, n + 1)] + [f"xi{i}" for i in range(1, n + 1)]


def variable_index(name: str, n: int) -> int:
    """Flat phase-space index of a variable name."""
    match = _VARIABLE.match(name.strip())
    if not match:
        raise InputError(f"Unknown variable '{name}'", kind="syntax")
    kind, number = match.group(1), int(match.group(2))
    if number > n:
        raise DimensionMismatch(f"Variable '{name}' exceeds dimension n={n}")
    return number - 1 if kind == "x" else n + number - 1


def parse_monomial(mono: str, n: int, max_degree: int = 4) -> Tuple[int, ...]:
    """
    Parse a product of variables into an exponent vector of length 2n.

    "1" is the constant monomial.
    """
    text = mono.strip()
    if not text:
        raise InputError("Empty monomial", kind="syntax")

    exponents = [0] * (2 * n)
    if text == "1":
        return tuple(exponents)

    for factor in text.split("*"):
        exponents[variable_index(factor, n)] += 1

    degree = sum(exponents)
    if degree > max_degree:
        raise DegreeError(f"Monomial '{mono}' has degree {degree} > {max_degree}")
    return tuple(exponents)


def format_monomial(exponents: Tuple[int, ...]) -> str:
    """Inverse of parse_monomial, factors in phase-space order."""
    n = len(exponents) // 2
    names = variable_names(n)
    factors = []
    for idx, power in enumerate(exponents):
        factors.extend([names[idx]] * power)
    return "*".join(factors) if factors else "1"
