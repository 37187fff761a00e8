"""Log-likelihood (G²) keyness over noun-lemma frequency tables.

Given a target corpus and a reference corpus, a term's keyness is the
log-likelihood ratio statistic of its observed frequencies against the
expected frequencies under a shared rate.  Ranking keeps only terms
overrepresented in the target, which is what makes the top terms usable as
human-readable labels for recommendation sets and clusters.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, replace
from typing import Mapping

from captionlens.errors import DataError
from captionlens.textlab.tokens import NounTagger, noun_lemma_counts

__all__ = [
    "ContingencyTable",
    "KeynessScore",
    "g2",
    "keyness_rank",
    "explanation_terms",
    "label_recommendation_set",
]


@dataclass(frozen=True)
class ContingencyTable:
    """Term frequency table: counts in target (a of c) vs reference (b of d)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.c < 1 or self.d < 1:
            raise ValueError(f"corpus sizes must be >= 1, got c={self.c}, d={self.d}")
        if not (0 <= self.a <= self.c):
            raise ValueError(f"target count a={self.a} outside [0, c={self.c}]")
        if not (0 <= self.b <= self.d):
            raise ValueError(f"reference count b={self.b} outside [0, d={self.d}]")

    @property
    def e1(self) -> float:
        return self.c * (self.a + self.b) / (self.c + self.d)

    @property
    def e2(self) -> float:
        return self.d * (self.a + self.b) / (self.c + self.d)

    @property
    def overrepresented_in_target(self) -> bool:
        # a/c > b/d, in exact integer arithmetic
        return self.a * self.d > self.b * self.c


@dataclass(frozen=True)
class KeynessScore:
    term: str
    g2: float
    overrepresented_in_target: bool


def g2(table: ContingencyTable) -> float:
    """Log-likelihood statistic 2*(a*ln(a/E1) + b*ln(b/E2)), with 0*ln0 = 0."""
    total = 0.0
    if table.a > 0:
        total += table.a * math.log(table.a / table.e1)
    if table.b > 0:
        total += table.b * math.log(table.b / table.e2)
    # Analytically >= 0; guard against rounding producing -1e-16.
    return max(0.0, 2.0 * total)


def keyness_rank(
    target_counts: Mapping[str, int],
    reference_counts: Mapping[str, int],
    min_target_count: int = 1,
    k: int = 5,
) -> list[KeynessScore]:
    """Rank target terms by G² against the reference corpus.

    Candidates are target terms with count >= min_target_count; only terms
    overrepresented in the target survive.  Sorted by G² descending, ties by
    ascending lemma, truncated to k.
    """
    c = sum(target_counts.values())
    d = sum(reference_counts.values())
    if c < 1:
        raise DataError("target corpus is empty; nothing to rank")
    if d < 1:
        raise DataError("reference corpus is empty; nothing to differentiate from")
    scored = []
    for term, a in target_counts.items():
        if a < min_target_count:
            continue
        table = ContingencyTable(a=a, b=reference_counts.get(term, 0), c=c, d=d)
        if not table.overrepresented_in_target:
            continue
        scored.append(KeynessScore(term=term, g2=g2(table), overrepresented_in_target=True))
    scored.sort(key=lambda s: (-s.g2, s.term))
    return scored[:k]


def _caption_text(snapshot, image_id: str) -> str:
    caption = snapshot.captions.get(image_id)
    if caption is None:
        raise DataError(f"image {image_id!r} has no caption; cannot build keyness corpus")
    return caption.text


def explanation_terms(
    snapshot,
    seed_id: str,
    neighbor_ids: list[str],
    k: int = 5,
    min_target_count: int = 2,
    tagger: NounTagger | None = None,
) -> list[str]:
    """Top-k keyness terms for a seed image and its recommended neighbors.

    Target corpus: noun lemmas of the seed caption plus the neighbor captions.
    Reference corpus: noun lemmas of every other caption in the snapshot.
    """
    member_ids = [seed_id, *neighbor_ids]
    target: Counter[str] = Counter()
    for image_id in member_ids:
        target += noun_lemma_counts(_caption_text(snapshot, image_id), tagger)
    member_set = set(member_ids)
    reference: Counter[str] = Counter()
    for image_id, caption in snapshot.captions.items():
        if image_id not in member_set:
            reference += noun_lemma_counts(caption.text, tagger)
    if not reference:
        raise DataError(
            "no captions outside the recommendation set; reference corpus is empty"
        )
    if not target:
        raise DataError("recommendation-set captions contain no noun lemmas")
    ranked = keyness_rank(target, reference, min_target_count=min_target_count, k=k)
    return [s.term for s in ranked]


def label_recommendation_set(snapshot, rec, k: int = 5, tagger: NounTagger | None = None):
    """Return a copy of a recommendation set with explanation terms filled in."""
    terms = explanation_terms(
        snapshot,
        rec.seed_id,
        [neighbor_id for neighbor_id, _ in rec.neighbors],
        k=k,
        tagger=tagger,
    )
    return replace(rec, explanation_terms=terms)
