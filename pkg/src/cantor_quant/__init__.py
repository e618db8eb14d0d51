"""Exact optimal quantization of the 1/4-3/4 nonhomogeneous Cantor distribution."""
from .word_measure import Word, centroid, cylinder, moments, weight
from .distortion import Codebook, distortion_of_words, evaluate_codebook
from .engine import (
    canonical_optimal_words,
    codebook_from_words,
    count_optimal_sets,
    enumerate_optimal_sets,
    genealogy,
    optimal_error,
)

__all__ = [
    "Word",
    "centroid",
    "cylinder",
    "moments",
    "weight",
    "Codebook",
    "distortion_of_words",
    "evaluate_codebook",
    "canonical_optimal_words",
    "codebook_from_words",
    "count_optimal_sets",
    "enumerate_optimal_sets",
    "genealogy",
    "optimal_error",
]

__version__ = "0.1.0"
