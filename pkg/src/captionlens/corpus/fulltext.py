"""Caption search: an inverted index scored with BM25.

Terms are lowercase surface tokens (same tokenizer as the text analysis
helpers, no stemming).  Scoring uses k1=1.2, b=0.75 and the non-negative
idf variant ln(1 + (N - df + 0.5) / (df + 0.5)), so a document matching
every query term can never rank below one matching a strict subset when
lengths are equal.  Ties break by ascending image id.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from captionlens.errors import DataError
from captionlens.textlab.tokens import tokenize

__all__ = ["SearchHit", "FulltextIndex", "build_fulltext_index"]

K1 = 1.2
B = 0.75


@dataclass(frozen=True)
class SearchHit:
    image_id: str
    score: float
    matched_terms: tuple[str, ...]


class FulltextIndex:
    def __init__(self) -> None:
        self._postings: dict[str, dict[str, int]] = {}
        self._doc_lengths: dict[str, int] = {}
        self._total_length = 0

    def add_document(self, image_id: str, text: str) -> None:
        if image_id in self._doc_lengths:
            raise DataError(f"document {image_id!r} indexed twice")
        terms = [t.lower() for t in tokenize(text)]
        self._doc_lengths[image_id] = len(terms)
        self._total_length += len(terms)
        for term, count in Counter(terms).items():
            self._postings.setdefault(term, {})[image_id] = count

    def __len__(self) -> int:
        return len(self._doc_lengths)

    @property
    def average_length(self) -> float:
        if not self._doc_lengths:
            return 0.0
        return self._total_length / len(self._doc_lengths)

    def document_frequency(self, term: str) -> int:
        return len(self._postings.get(term.lower(), ()))

    def idf(self, term: str) -> float:
        n = len(self._doc_lengths)
        df = self.document_frequency(term)
        return math.log(1.0 + (n - df + 0.5) / (df + 0.5))

    def search(self, query: str, limit: int = 10) -> list[SearchHit]:
        """Top `limit` documents by summed BM25 term scores.

        Repeated query terms count once.  Only documents containing at
        least one query term are returned.
        """
        if limit < 1:
            raise DataError(f"limit must be >= 1, got {limit}")
        query_terms = sorted({t.lower() for t in tokenize(query)})
        if not query_terms:
            raise DataError("query has no searchable terms")
        if not self._doc_lengths:
            return []
        avg_len = self.average_length
        scores: dict[str, float] = {}
        matched: dict[str, list[str]] = {}
        for term in query_terms:
            postings = self._postings.get(term)
            if not postings:
                continue
            idf = self.idf(term)
            for image_id, tf in postings.items():
                norm = K1 * (1.0 - B + B * self._doc_lengths[image_id] / avg_len)
                contribution = idf * (tf * (K1 + 1.0)) / (tf + norm)
                scores[image_id] = scores.get(image_id, 0.0) + contribution
                matched.setdefault(image_id, []).append(term)
        hits = [
            SearchHit(image_id, score, tuple(matched[image_id]))
            for image_id, score in scores.items()
        ]
        hits.sort(key=lambda h: (-h.score, h.image_id))
        return hits[:limit]


def build_fulltext_index(captions: Mapping[str, object] | Iterable[tuple[str, str]]) -> FulltextIndex:
    """Index caption text keyed by image id.

    Accepts either an id -> Caption mapping or (id, text) pairs.
    """
    index = FulltextIndex()
    if isinstance(captions, Mapping):
        pairs = ((image_id, caption.text) for image_id, caption in captions.items())  # type: ignore[attr-defined]
    else:
        pairs = iter(captions)
    for image_id, text in pairs:
        index.add_document(image_id, text)
    return index
