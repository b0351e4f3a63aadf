"""Immune-inspired matching, selection and recommendation primitives."""

from ._core import (
    AistkError,
    censor,
    evolve_to_target,
    generate_detectors,
    hamming_similarity,
    longest_contiguous_match,
    monitor,
    mutate_bits,
    pearson,
    r_contiguous_match,
    run_recommender,
    synth_ratings,
)

__all__ = [
    "AistkError",
    "censor",
    "evolve_to_target",
    "generate_detectors",
    "hamming_similarity",
    "longest_contiguous_match",
    "monitor",
    "mutate_bits",
    "pearson",
    "r_contiguous_match",
    "run_recommender",
    "synth_ratings",
]
