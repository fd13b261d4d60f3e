"""
subcert - certification toolkit for systems of quadratic differential operators

Features:
- Hamilton maps, polarized forms and Poisson brackets of quadratic symbols
- Singular spaces, kernel towers and the loss of derivatives 2k0/(2k0+1)
- Constructive weight functions with sampled constant search
- Weyl and Wick quantization on truncated Hermite bases
- Rayleigh-quotient probes of the global subelliptic estimate
"""

__version__ = "0.1.0"
__author__ = "subcert developers"

from subcert.errors import (
    SubcertError,
    InputError,
    NumericalFailure,
    ConditionNotSatisfied,
)

__all__ = [
    "__version__",
    "SubcertError",
    "InputError",
    "NumericalFailure",
    "ConditionNotSatisfied",
]
