"""
subcert Core Module
Quadratic-form algebra on phase space and the singular-space decisions.
"""

from subcert.core.monomials import format_monomial, parse_monomial, variable_index, variable_names
from subcert.core.symplectic import (
    PhaseSpace,
    PhasePoint,
    QuadraticForm,
    HamiltonMap,
    SystemOfForms,
    symplectic_matrix,
    japanese_bracket,
    hamilton_map,
    polarize,
    poisson_bracket,
    poisson_bracket_at,
    hamilton_vector_field,
    gram_matrices,
    r_tower,
    rtilde,
    rtilde_matrix,
    word_matrix,
    polarized_word_form,
    hamilton_map_of_polarized,
    bracket_identity_sides,
    bracket_identity_check,
    kee_identities,
    iterated_commutator_symbol,
    iterated_commutator_map,
    commutator_definiteness,
    sphere_directions,
    numerical_range_sample,
)
from subcert.core.singular import (
    Subspace,
    KernelTower,
    Certificate,
    Certification,
    PartialEllipticity,
    kernel,
    intersect,
    preimage,
    subspace_distance,
    singular_space,
    scalar_k0,
    word_kernel,
    system_tower,
    system_fingerprint,
    loss_exponent,
    positive_definiteness_check,
    partial_ellipticity,
    certify,
    VERDICT_SATISFIED,
    VERDICT_NOT_SATISFIED,
)
from subcert.core.examples import (
    EXAMPLES,
    build_example,
    section_example,
    combined_form,
    worked_example_kernels,
    elliptic,
    ladder,
    degenerate,
    chain,
)

__all__ = [
    "format_monomial", "parse_monomial", "variable_index", "variable_names",
    "PhaseSpace", "PhasePoint", "QuadraticForm", "HamiltonMap", "SystemOfForms",
    "symplectic_matrix", "japanese_bracket", "hamilton_map", "polarize",
    "poisson_bracket", "poisson_bracket_at", "hamilton_vector_field",
    "gram_matrices", "r_tower", "rtilde", "rtilde_matrix", "word_matrix",
    "polarized_word_form", "hamilton_map_of_polarized", "bracket_identity_sides",
    "bracket_identity_check", "kee_identities", "iterated_commutator_symbol",
    "iterated_commutator_map", "commutator_definiteness", "sphere_directions",
    "numerical_range_sample",
    "Subspace", "KernelTower", "Certificate", "Certification", "PartialEllipticity",
    "kernel", "intersect", "preimage", "subspace_distance", "singular_space",
    "scalar_k0", "word_kernel", "system_tower", "system_fingerprint", "loss_exponent",
    "positive_definiteness_check", "partial_ellipticity", "certify",
    "VERDICT_SATISFIED", "VERDICT_NOT_SATISFIED",
    "EXAMPLES", "build_example", "section_example", "combined_form",
    "worked_example_kernels", "elliptic", "ladder", "degenerate", "chain",
]
