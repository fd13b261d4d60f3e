"""
subcert Weights Module
Weight functions g_p with exact brackets, their sampled constant search
and the lemma sampler.
"""

from subcert.weights.cutoffs import CutoffSpec, CUTOFFS, PSI, CHI, W1, W2, cutoff_eval, splice
from subcert.weights.assembly import (
    Bracketed,
    WeightAssembly,
    WeightField,
    FieldSample,
    WeightValues,
    BracketTerms,
    PartitionMargins,
    weight_evaluate,
    bracket_decomposition,
    partition_check,
    hamilton_field_fd,
    fd_relative_error,
)
from subcert.weights.search import (
    SampleRegion,
    SampleReport,
    SearchOutcome,
    SearchFailure,
    constant_search,
)
from subcert.weights.lemmas import LEMMAS, LemmaSpec, adapted_points, lemma_sampler, lemma_catalogue

__all__ = [
    "CutoffSpec", "CUTOFFS", "PSI", "CHI", "W1", "W2", "cutoff_eval", "splice",
    "Bracketed", "WeightAssembly", "WeightField", "FieldSample", "WeightValues",
    "BracketTerms", "PartitionMargins", "weight_evaluate", "bracket_decomposition",
    "partition_check", "hamilton_field_fd", "fd_relative_error",
    "SampleRegion", "SampleReport", "SearchOutcome", "SearchFailure", "constant_search",
    "LEMMAS", "LemmaSpec", "adapted_points", "lemma_sampler", "lemma_catalogue",
]
