"""
subcert Quantization Module
Weyl and Wick quantization of polynomial symbols on truncated Hermite bases.
"""

from subcert.quantization.symbols import PolynomialSymbol, MAX_DEGREE
from subcert.quantization.hermite import (
    Convention,
    HermiteBasis,
    convention_transport,
    multi_indices,
    annihilation,
    position,
    momentum,
    coherent_coefficients,
)
from subcert.quantization.weyl import OperatorMatrix, weyl_quantize, quantize_form
from subcert.quantization.wick import (
    QuadratureGrid,
    gaussian_smoothing,
    wick_correction,
    wick_quantize,
    wick_by_quadrature,
    projector_symbol,
    wave_packet_transform,
    wave_packet_norm,
    composition_symbol,
    composition_residual,
    default_grid,
)

__all__ = [
    "PolynomialSymbol", "MAX_DEGREE",
    "Convention", "HermiteBasis", "convention_transport", "multi_indices",
    "annihilation", "position", "momentum", "coherent_coefficients",
    "OperatorMatrix", "weyl_quantize", "quantize_form",
    "QuadratureGrid", "gaussian_smoothing", "wick_correction", "wick_quantize",
    "wick_by_quadrature", "projector_symbol", "wave_packet_transform",
    "wave_packet_norm", "composition_symbol", "composition_residual", "default_grid",
]
