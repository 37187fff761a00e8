"""Cosine recommendation and its evaluation metrics."""

from captionlens.similarity.metrics import (
    OverlapEntry,
    OverlapReport,
    SymmetryEntry,
    SymmetryReport,
    overlap_metric,
    symmetry_metric,
)
from captionlens.similarity.neighbors import (
    CosineNeighbors,
    cosine,
    pairwise_topn,
    query_topn,
    unit_normalize,
)
from captionlens.similarity.recommend import RecommendationSet, top_n, top_n_all

__all__ = [
    "cosine",
    "unit_normalize",
    "pairwise_topn",
    "query_topn",
    "CosineNeighbors",
    "RecommendationSet",
    "top_n",
    "top_n_all",
    "SymmetryEntry",
    "SymmetryReport",
    "OverlapEntry",
    "OverlapReport",
    "symmetry_metric",
    "overlap_metric",
]
