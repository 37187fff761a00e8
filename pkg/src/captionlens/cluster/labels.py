"""Keyness labels for cut clusters.

Each cluster is labeled with the noun lemmas most overrepresented in its
captions relative to all other clusters' captions, using the G² ranking
from the text helpers with a candidate floor of 3 occurrences.
"""

from __future__ import annotations

from collections import Counter

from captionlens.cluster.partition import ClusterAssignment
from captionlens.errors import DataError
from captionlens.textlab.keyness import keyness_rank
from captionlens.textlab.tokens import NounTagger, noun_lemma_counts

__all__ = ["label_clusters", "DEFAULT_LABEL_TERMS", "DEFAULT_LABEL_FLOOR"]

DEFAULT_LABEL_TERMS = 6
DEFAULT_LABEL_FLOOR = 3


def label_clusters(
    snapshot,
    assignment: ClusterAssignment,
    k_terms: int = DEFAULT_LABEL_TERMS,
    min_target_count: int = DEFAULT_LABEL_FLOOR,
    tagger: NounTagger | None = None,
) -> ClusterAssignment:
    """Fill every cluster summary with up to k_terms distinguishing terms.

    Requires a caption for every clustered image.  A cluster can end up
    with fewer than k_terms terms when too few lemmas pass the floor.
    """
    per_cluster: dict[int, Counter[str]] = {c: Counter() for c in range(assignment.k)}
    for image_id, cluster_id in assignment.assignment.items():
        caption = snapshot.captions.get(image_id)
        if caption is None:
            raise DataError(f"clustered image {image_id!r} has no caption to label from")
        per_cluster[cluster_id] += noun_lemma_counts(caption.text, tagger)
    totals: Counter[str] = Counter()
    for counts in per_cluster.values():
        totals += counts
    terms_by_cluster: dict[int, list[str]] = {}
    for cluster_id, target in per_cluster.items():
        reference = totals - target
        if not target:
            terms_by_cluster[cluster_id] = []
            continue
        if not reference:
            raise DataError(
                f"cluster {cluster_id} holds every noun lemma in the corpus; "
                "nothing to differentiate against"
            )
        ranked = keyness_rank(
            target, reference, min_target_count=min_target_count, k=k_terms
        )
        terms_by_cluster[cluster_id] = [s.term for s in ranked]
    return assignment.with_terms(terms_by_cluster)
