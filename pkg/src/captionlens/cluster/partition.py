"""K-cluster partitions cut from a dendrogram, with per-cluster summaries."""

from __future__ import annotations

from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Mapping, Sequence

from captionlens.cluster.ward import Dendrogram, cut_labels
from captionlens.errors import DataError

__all__ = ["ClusterSummary", "ClusterAssignment", "cut"]


@dataclass(frozen=True)
class ClusterSummary:
    cluster_id: int
    size: int
    terms: tuple[str, ...] = ()
    order_position: int | None = None

    def to_dict(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "size": self.size,
            "terms": list(self.terms),
            "order_position": self.order_position,
        }


@dataclass(frozen=True)
class ClusterAssignment:
    """Image id -> cluster id partition with exactly k non-empty clusters.

    Summaries are indexed by cluster id.  Terms and order positions start
    empty and are filled by the labeling and ordering steps.
    """

    k: int
    assignment: Mapping[str, int]
    summaries: tuple[ClusterSummary, ...]

    def __post_init__(self):
        if self.k < 1:
            raise DataError(f"k must be >= 1, got {self.k}")
        object.__setattr__(self, "assignment", MappingProxyType(dict(self.assignment)))
        counts = [0] * self.k
        for image_id, cluster_id in self.assignment.items():
            if not 0 <= cluster_id < self.k:
                raise DataError(
                    f"image {image_id!r} assigned to cluster {cluster_id}, valid range is 0..{self.k - 1}"
                )
            counts[cluster_id] += 1
        if len(self.summaries) != self.k:
            raise DataError(f"expected {self.k} summaries, got {len(self.summaries)}")
        for cluster_id, summary in enumerate(self.summaries):
            if summary.cluster_id != cluster_id:
                raise DataError(f"summary at index {cluster_id} names cluster {summary.cluster_id}")
            if counts[cluster_id] == 0:
                raise DataError(f"cluster {cluster_id} is empty")
            if summary.size != counts[cluster_id]:
                raise DataError(
                    f"cluster {cluster_id} summary size {summary.size} "
                    f"does not match {counts[cluster_id]} assigned images"
                )
        positions = [s.order_position for s in self.summaries]
        if any(p is not None for p in positions):
            if sorted(positions) != list(range(self.k)):
                raise DataError("order positions must form a permutation of 0..k-1")

    def members(self, cluster_id: int) -> list[str]:
        if not 0 <= cluster_id < self.k:
            raise DataError(f"no cluster {cluster_id}, valid range is 0..{self.k - 1}")
        return [i for i, c in self.assignment.items() if c == cluster_id]

    def ordered_summaries(self) -> list[ClusterSummary]:
        """Summaries sorted by order position (cluster id before ordering ran)."""
        return sorted(
            self.summaries,
            key=lambda s: s.order_position if s.order_position is not None else s.cluster_id,
        )

    def with_order(self, positions: Mapping[int, int]) -> "ClusterAssignment":
        if sorted(positions) != list(range(self.k)):
            raise DataError("positions must cover every cluster id exactly once")
        summaries = tuple(
            replace(s, order_position=int(positions[s.cluster_id])) for s in self.summaries
        )
        return replace(self, summaries=summaries)

    def with_terms(self, terms_by_cluster: Mapping[int, Sequence[str]]) -> "ClusterAssignment":
        if sorted(terms_by_cluster) != list(range(self.k)):
            raise DataError("terms must cover every cluster id exactly once")
        summaries = tuple(
            replace(s, terms=tuple(terms_by_cluster[s.cluster_id])) for s in self.summaries
        )
        return replace(self, summaries=summaries)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "assignment": dict(self.assignment),
            "summaries": [s.to_dict() for s in self.summaries],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "ClusterAssignment":
        try:
            summaries = tuple(
                ClusterSummary(
                    cluster_id=int(s["cluster_id"]),
                    size=int(s["size"]),
                    terms=tuple(str(t) for t in s["terms"]),
                    order_position=None if s["order_position"] is None else int(s["order_position"]),
                )
                for s in payload["summaries"]
            )
            return cls(
                k=int(payload["k"]),
                assignment={str(i): int(c) for i, c in payload["assignment"].items()},
                summaries=summaries,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed cluster payload: {exc}") from exc


def cut(dendrogram: Dendrogram, k: int, ids: Sequence[str]) -> ClusterAssignment:
    """Partition into k clusters by undoing the dendrogram's last k-1 merges.

    ids gives the image id of each leaf, in leaf (row) order.  Cluster ids
    are assigned 0..k-1 in order of first appearance along the leaves.
    """
    if len(ids) != dendrogram.n_items:
        raise DataError(
            f"dendrogram has {dendrogram.n_items} leaves but {len(ids)} ids were given"
        )
    labels = cut_labels(dendrogram, k)
    assignment = {image_id: int(labels[row]) for row, image_id in enumerate(ids)}
    if len(assignment) != len(ids):
        raise DataError("leaf ids are not unique")
    sizes = [0] * k
    for cluster_id in labels:
        sizes[cluster_id] += 1
    summaries = tuple(ClusterSummary(cluster_id=c, size=sizes[c]) for c in range(k))
    return ClusterAssignment(k=k, assignment=assignment, summaries=summaries)
