"""Read-only view of one corpus state: records, vectors, search, artifacts.

The HTTP service and the CLI both work from a snapshot.  Swapping in a new
snapshot is how updated data becomes visible; snapshots themselves are never
mutated after construction, so requests in flight keep a consistent view.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Mapping

from captionlens.corpus.fulltext import FulltextIndex, build_fulltext_index
from captionlens.corpus.manifest import Manifest
from captionlens.corpus.records import (
    STATUS_CAPTIONED,
    STATUS_EMBEDDED,
    Caption,
    ImageRecord,
)
from captionlens.errors import ArtifactMissingError, DataError

if TYPE_CHECKING:
    from captionlens.cluster.partition import ClusterAssignment
    from captionlens.cluster.projection import PlanarEmbedding
    from captionlens.corpus.embeddings import EmbeddingSpace

__all__ = ["CAPTION_SPACE", "VISUAL_SPACE", "CorpusSnapshot"]

CAPTION_SPACE = "caption"
VISUAL_SPACE = "visual"


class CorpusSnapshot:
    def __init__(
        self,
        manifest: Manifest,
        spaces: Mapping[str, "EmbeddingSpace"] | None = None,
        version: int = 0,
        fulltext: FulltextIndex | None = None,
        clusters: "ClusterAssignment | None" = None,
        projection: "PlanarEmbedding | None" = None,
        reports: dict | None = None,
    ):
        self.manifest = manifest
        self.spaces = dict(spaces or {})
        self.version = int(version)
        self.clusters = clusters
        self.projection = projection
        self.reports = reports
        self._validate()
        if fulltext is None:
            fulltext = build_fulltext_index(self.captions)
        self.fulltext = fulltext

    def _validate(self) -> None:
        for name, space in self.spaces.items():
            if name != space.name:
                raise DataError(f"space registered as {name!r} but names itself {space.name!r}")
            for image_id in space.ids:
                if image_id not in self.manifest:
                    raise DataError(
                        f"space {name!r} has a vector for unknown image {image_id!r}"
                    )
        caption_space = self.spaces.get(CAPTION_SPACE)
        for record in self.manifest.with_status(STATUS_EMBEDDED):
            if caption_space is None or record.id not in caption_space:
                raise DataError(
                    f"image {record.id!r} is marked embedded but has no vector "
                    f"in the {CAPTION_SPACE!r} space"
                )
        if self.clusters is not None:
            for image_id in self.clusters.assignment:
                if image_id not in self.manifest:
                    raise DataError(
                        f"cluster artifact references unknown image {image_id!r}; "
                        "rerun the cluster step"
                    )
        if self.projection is not None:
            for image_id in self.projection.coords:
                if image_id not in self.manifest:
                    raise DataError(
                        f"projection artifact references unknown image {image_id!r}; "
                        "rerun the cluster step"
                    )

    # -- records ---------------------------------------------------------

    @property
    def records(self) -> list[ImageRecord]:
        return self.manifest.records

    @property
    def captions(self) -> dict[str, Caption]:
        return self.manifest.captions

    def __len__(self) -> int:
        return len(self.manifest)

    def get_record(self, image_id: str) -> ImageRecord | None:
        return self.manifest.get(image_id)

    def caption_for(self, image_id: str) -> Caption | None:
        return self.manifest.captions.get(image_id)

    def captioned_records(self) -> list[ImageRecord]:
        return self.manifest.with_status(STATUS_CAPTIONED, STATUS_EMBEDDED)

    # -- artifacts -------------------------------------------------------

    def require_space(self, name: str) -> "EmbeddingSpace":
        space = self.spaces.get(name)
        if space is None:
            raise ArtifactMissingError(
                f"no embedding space named {name!r} is loaded "
                f"(available: {sorted(self.spaces) or 'none'})"
            )
        return space

    def require_clusters(self) -> "ClusterAssignment":
        if self.clusters is None:
            raise ArtifactMissingError("no cluster artifact; run clustering first")
        return self.clusters

    def require_projection(self) -> "PlanarEmbedding":
        if self.projection is None:
            raise ArtifactMissingError("no projection artifact; run clustering first")
        return self.projection

    # -- summary ---------------------------------------------------------

    def overview(self) -> dict:
        """Corpus counts by status plus per-space and artifact summaries."""
        status_counts: dict[str, int] = {}
        for record in self.records:
            status_counts[record.status] = status_counts.get(record.status, 0) + 1
        return {
            "version": self.version,
            "image_count": len(self.manifest),
            "status_counts": status_counts,
            "caption_count": len(self.captions),
            "spaces": {
                name: {"dimension": space.dimension, "vector_count": len(space)}
                for name, space in sorted(self.spaces.items())
            },
            "cluster_count": self.clusters.k if self.clusters else 0,
            "has_projection": self.projection is not None,
        }
