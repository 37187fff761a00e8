"""Caption-surrogate search, recommendation, and clustering for visual collections.

Images are represented by generated captions, captions by dense text
embeddings.  On top of that representation the package provides exact
cosine-similarity recommendations with keyness-derived textual explanations,
Ward-clustered collection overviews, evaluation metrics, a full-text caption
index, and an HTTP service for interactive exploration.
"""

from captionlens.cluster.ward import WardClustering
from captionlens.similarity.neighbors import CosineNeighbors, cosine
from captionlens.cluster.projection import PlanarProjection

__version__ = "0.1.0"

__all__ = [
    "CosineNeighbors",
    "WardClustering",
    "PlanarProjection",
    "cosine",
    "__version__",
]
