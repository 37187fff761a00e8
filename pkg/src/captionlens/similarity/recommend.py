"""Top-N image recommendations from one embedding space."""

from __future__ import annotations

from dataclasses import dataclass, field

from captionlens.corpus.snapshot import CAPTION_SPACE, CorpusSnapshot
from captionlens.errors import DataError
from captionlens.similarity.neighbors import pairwise_topn, query_topn
from captionlens.validation import check_positive_int

__all__ = ["RecommendationSet", "top_n", "top_n_all"]


@dataclass(frozen=True)
class RecommendationSet:
    seed_id: str
    space_name: str
    n: int
    neighbors: tuple[tuple[str, float], ...]
    explanation_terms: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "seed_id": self.seed_id,
            "space": self.space_name,
            "n": self.n,
            "neighbors": [
                {"image_id": image_id, "score": score} for image_id, score in self.neighbors
            ],
            "explanation_terms": list(self.explanation_terms),
        }


def top_n(
    snapshot: CorpusSnapshot,
    seed_id: str,
    n: int,
    space_name: str = CAPTION_SPACE,
) -> RecommendationSet:
    """Exact top-n neighbors of a seed image by cosine similarity.

    Neighbors are ordered score descending, ties by ascending image id; the
    seed is excluded; the list is min(n, corpus-1) long.
    """
    check_positive_int(n, "n")
    space = snapshot.require_space(space_name)
    if seed_id not in space:
        raise DataError(f"image {seed_id!r} has no vector in space {space_name!r}")
    unit = space.unit_rows()
    row = space.row_of(seed_id)
    ids = space.ids
    picked = query_topn(unit, unit[row], n, tie_keys=ids, exclude=row)
    return RecommendationSet(
        seed_id=seed_id,
        space_name=space_name,
        n=n,
        neighbors=tuple((ids[i], score) for i, score in picked),
    )


def top_n_all(
    snapshot: CorpusSnapshot,
    n: int,
    space_name: str = CAPTION_SPACE,
) -> dict[str, list[tuple[str, float]]]:
    """Self-excluded top-n neighbor lists for every image in a space.

    One batched pass over the space; equivalent to calling top_n per image.
    """
    check_positive_int(n, "n")
    space = snapshot.require_space(space_name)
    if len(space) == 0:
        raise DataError(f"space {space_name!r} is empty")
    ids = space.ids
    rows = pairwise_topn(space.unit_rows(), n, tie_keys=ids)
    return {
        ids[r]: [(ids[i], score) for i, score in picked] for r, picked in enumerate(rows)
    }
