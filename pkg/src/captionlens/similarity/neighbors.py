"""Exact cosine nearest neighbors.

All scoring runs in float64 over unit-normalized rows: adjacent scores in a
dense corpus can differ by less than float32 resolution, and results must
match a brute-force oracle exactly at the id level.  The full similarity
matrix is never materialized; queries run in row blocks.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator

from captionlens.errors import DataError
from captionlens.validation import as_float_matrix, as_float_vector, check_positive_int

__all__ = ["cosine", "unit_normalize", "pairwise_topn", "query_topn", "CosineNeighbors"]

_BLOCK_SIZE = 1024


def cosine(u, v) -> float:
    """u·v / (|u||v|), clamped to [-1, 1]; symmetric in its arguments."""
    u = as_float_vector(u)
    v = as_float_vector(v)
    if u.shape[0] != v.shape[0]:
        raise DataError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    nu = math.sqrt(float(u @ u))
    nv = math.sqrt(float(v @ v))
    if nu == 0.0 or nv == 0.0:
        raise DataError("cosine is undefined for a zero-norm vector")
    return max(-1.0, min(1.0, float(u @ v) / (nu * nv)))


def unit_normalize(X) -> np.ndarray:
    """Float64 copy of X with unit-norm rows; rejects zero rows."""
    X = as_float_matrix(X)
    norms = np.linalg.norm(X, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise DataError(f"row {zero[0]} has zero norm")
    return X / norms[:, None]


def _select_row(
    scores: np.ndarray,
    n: int,
    tie_keys: Sequence | None,
    exclude: int | None,
) -> list[tuple[int, float]]:
    """Exact top-n of one score row: score descending, ties by ascending key."""
    if exclude is not None:
        scores = scores.copy()
        scores[exclude] = -np.inf
    candidates = scores.shape[0] - (1 if exclude is not None else 0)
    k = min(n, candidates)
    if k <= 0:
        return []
    if k < scores.shape[0]:
        cutoff = scores.shape[0] - k
        top = np.argpartition(scores, cutoff)[cutoff:]
        boundary = scores[top].min()
        # argpartition resolves boundary ties arbitrarily; widen to all of them
        pool = np.flatnonzero(scores >= boundary)
    else:
        pool = np.flatnonzero(scores > -np.inf)
    if tie_keys is None:
        ranked = sorted(pool.tolist(), key=lambda i: (-scores[i], i))
    else:
        ranked = sorted(pool.tolist(), key=lambda i: (-scores[i], tie_keys[i]))
    return [(i, min(1.0, max(-1.0, float(scores[i])))) for i in ranked[:k]]


def query_topn(
    unit: np.ndarray,
    query: np.ndarray,
    n: int,
    tie_keys: Sequence | None = None,
    exclude: int | None = None,
) -> list[tuple[int, float]]:
    """Top-n rows of `unit` by dot product with one unit-norm query vector."""
    check_positive_int(n, "n")
    return _select_row(unit @ query, n, tie_keys, exclude)


def pairwise_topn(
    unit: np.ndarray,
    n: int,
    tie_keys: Sequence | None = None,
    block_size: int = _BLOCK_SIZE,
) -> list[list[tuple[int, float]]]:
    """Self-excluded top-n neighbor list for every row of a unit matrix."""
    check_positive_int(n, "n")
    rows = unit.shape[0]
    out: list[list[tuple[int, float]]] = []
    for start in range(0, rows, block_size):
        stop = min(start + block_size, rows)
        block_scores = unit[start:stop] @ unit.T
        for offset in range(stop - start):
            out.append(_select_row(block_scores[offset], n, tie_keys, start + offset))
    return out


class CosineNeighbors(BaseEstimator):
    """Exact cosine k-nearest-neighbor search in the sklearn estimator shape.

    fit() stores the reference rows; kneighbors() returns similarity scores
    (descending) rather than distances.  Passing ids makes ties break by
    ascending id instead of row index.
    """

    def __init__(self, n_neighbors: int = 5, block_size: int = _BLOCK_SIZE):
        self.n_neighbors = n_neighbors
        self.block_size = block_size

    def fit(self, X, y=None, ids: Sequence[str] | None = None):
        check_positive_int(self.n_neighbors, "n_neighbors")
        check_positive_int(self.block_size, "block_size")
        unit = unit_normalize(X)
        if ids is not None and len(ids) != unit.shape[0]:
            raise DataError(f"{len(ids)} ids for {unit.shape[0]} rows")
        self.unit_matrix_ = unit
        self.ids_ = list(ids) if ids is not None else None
        return self

    def kneighbors(self, X=None, n_neighbors: int | None = None):
        """(scores, indices) arrays, each of shape (queries, k).

        X=None queries the fitted rows against themselves, excluding self;
        k is then capped at fitted_rows - 1.
        """
        if not hasattr(self, "unit_matrix_"):
            raise DataError("estimator is not fitted")
        n = self.n_neighbors if n_neighbors is None else n_neighbors
        check_positive_int(n, "n_neighbors")
        if X is None:
            per_row = pairwise_topn(self.unit_matrix_, n, self.ids_, self.block_size)
        else:
            queries = unit_normalize(X)
            if queries.shape[1] != self.unit_matrix_.shape[1]:
                raise DataError(
                    f"query dimension {queries.shape[1]} does not match "
                    f"fitted dimension {self.unit_matrix_.shape[1]}"
                )
            per_row = []
            for start in range(0, queries.shape[0], self.block_size):
                block = queries[start : start + self.block_size] @ self.unit_matrix_.T
                for offset in range(block.shape[0]):
                    per_row.append(_select_row(block[offset], n, self.ids_, None))
        k = max((len(row) for row in per_row), default=0)
        scores = np.full((len(per_row), k), np.nan)
        indices = np.zeros((len(per_row), k), dtype=np.int64)
        for r, row in enumerate(per_row):
            for c, (idx, score) in enumerate(row):
                indices[r, c] = idx
                scores[r, c] = score
        return scores, indices
