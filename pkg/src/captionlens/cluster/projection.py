"""Deterministic planar projection of embedding vectors.

Principal-component projection onto the top two directions of the
mean-centered data.  Signs are pinned (each component's largest-magnitude
entry is positive) so repeated runs and platforms agree; degenerate inputs
(all rows identical) project to the origin rather than erroring.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import TYPE_CHECKING, Mapping

import numpy as np
from sklearn.base import BaseEstimator

from captionlens.errors import DataError
from captionlens.validation import as_float_matrix

if TYPE_CHECKING:
    from captionlens.corpus.embeddings import EmbeddingSpace

__all__ = ["PlanarProjection", "PlanarEmbedding", "project_2d"]


def _pin_signs(components: np.ndarray) -> np.ndarray:
    for row in components:
        anchor = int(np.argmax(np.abs(row)))
        if row[anchor] < 0:
            row *= -1.0
    return components


class PlanarProjection(BaseEstimator):
    """Two-component PCA with pinned component signs.

    fit() learns mean_, components_ (2, n_features) and explained_variance_;
    transform() maps rows to the plane.  Needs at least 3 samples and 2
    features.
    """

    def fit(self, X, y=None):
        X = as_float_matrix(X, min_rows=3)
        if X.shape[1] < 2:
            raise DataError(f"projection needs at least 2 features, got {X.shape[1]}")
        self.mean_ = X.mean(axis=0)
        centered = X - self.mean_
        if not np.any(centered):
            self.components_ = np.eye(2, X.shape[1])
            self.explained_variance_ = np.zeros(2)
            return self
        _, s, vt = np.linalg.svd(centered, full_matrices=False)
        self.components_ = _pin_signs(vt[:2].copy())
        self.explained_variance_ = (s[:2] ** 2) / (X.shape[0] - 1)
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "components_"):
            raise DataError("estimator is not fitted")
        X = as_float_matrix(X)
        if X.shape[1] != self.mean_.shape[0]:
            raise DataError(
                f"expected {self.mean_.shape[0]} features, got {X.shape[1]}"
            )
        return (X - self.mean_) @ self.components_.T

    def fit_transform(self, X, y=None) -> np.ndarray:
        return self.fit(X).transform(X)


@dataclass(frozen=True)
class PlanarEmbedding:
    coords: Mapping[str, tuple[float, float]]
    components: tuple[tuple[float, ...], tuple[float, ...]]
    explained_variance: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "coords", MappingProxyType(dict(self.coords)))
        a = np.array(self.components[0])
        b = np.array(self.components[1])
        if abs(float(a @ a) - 1.0) > 1e-6 or abs(float(b @ b) - 1.0) > 1e-6:
            raise DataError("projection components are not unit length")
        if abs(float(a @ b)) > 1e-6:
            raise DataError("projection components are not orthogonal")
        if self.explained_variance[0] < self.explained_variance[1] or min(self.explained_variance) < 0:
            raise DataError("explained variances must be non-negative and descending")

    def to_dict(self) -> dict:
        return {
            "coords": {i: [x, y] for i, (x, y) in self.coords.items()},
            "components": [list(c) for c in self.components],
            "explained_variance": list(self.explained_variance),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "PlanarEmbedding":
        try:
            return cls(
                coords={str(i): (float(x), float(y)) for i, (x, y) in payload["coords"].items()},
                components=(
                    tuple(float(v) for v in payload["components"][0]),
                    tuple(float(v) for v in payload["components"][1]),
                ),
                explained_variance=(
                    float(payload["explained_variance"][0]),
                    float(payload["explained_variance"][1]),
                ),
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise DataError(f"malformed projection payload: {exc}") from exc


def project_2d(space: "EmbeddingSpace") -> PlanarEmbedding:
    """Planar coordinates for every vector in a space."""
    if len(space) < 3:
        raise DataError(f"projection needs at least 3 vectors, space has {len(space)}")
    estimator = PlanarProjection()
    coords = estimator.fit_transform(space.matrix.astype(np.float64))
    ids = space.ids
    return PlanarEmbedding(
        coords={ids[i]: (float(x), float(y)) for i, (x, y) in enumerate(coords)},
        components=(
            tuple(float(v) for v in estimator.components_[0]),
            tuple(float(v) for v in estimator.components_[1]),
        ),
        explained_variance=(
            float(estimator.explained_variance_[0]),
            float(estimator.explained_variance_[1]),
        ),
    )
