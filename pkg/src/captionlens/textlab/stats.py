"""Corpus-level caption statistics: length moments, hedge rate, cap hits."""

from __future__ import annotations

import statistics
from dataclasses import asdict, dataclass
from typing import Iterable

from captionlens.errors import DataError
from captionlens.textlab.phrases import detect_hedges

__all__ = ["CaptionStats", "caption_stats"]


@dataclass(frozen=True)
class CaptionStats:
    caption_count: int
    token_mean: float
    token_sd: float
    word_mean: float
    word_sd: float
    hedge_rate: float
    capped_count: int

    def to_dict(self) -> dict:
        return asdict(self)


def caption_stats(
    captions: Iterable, token_cap: int = 500, hedge_lexicon=None
) -> CaptionStats:
    """Mean/sample-sd of token and word counts, hedge rate, and cap hits.

    Requires at least two captions (sample standard deviation uses the n-1
    denominator).  `capped_count` counts captions whose provider-reported
    token count equals the generation cap.
    """
    items = list(captions)
    if len(items) < 2:
        raise DataError(f"caption statistics need >= 2 captions, got {len(items)}")
    token_counts = [c.token_count for c in items]
    word_counts = [c.word_count for c in items]
    hedged = sum(1 for c in items if detect_hedges(c.text, hedge_lexicon)[0])
    return CaptionStats(
        caption_count=len(items),
        token_mean=statistics.fmean(token_counts),
        token_sd=statistics.stdev(token_counts),
        word_mean=statistics.fmean(word_counts),
        word_sd=statistics.stdev(word_counts),
        hedge_rate=hedged / len(items),
        capped_count=sum(1 for c in items if c.token_count == token_cap),
    )
