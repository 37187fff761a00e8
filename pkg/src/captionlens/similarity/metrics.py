"""Corpus-level evaluation of recommendation behavior.

Two metrics over all-images top-n lists:

* symmetry: how often a directed recommendation i -> j is reciprocated,
  i.e. i appears in j's own top-n.
* overlap: how many of the same neighbors two embedding spaces return for
  the same seed image.

Both exploit that top-n lists under a total order are nested in n, so one
batched pass at max(n) serves every requested n.
"""

from __future__ import annotations

from dataclasses import dataclass

from captionlens.corpus.snapshot import CorpusSnapshot
from captionlens.errors import DataError
from captionlens.similarity.neighbors import pairwise_topn

__all__ = [
    "SymmetryEntry",
    "SymmetryReport",
    "OverlapEntry",
    "OverlapReport",
    "symmetry_metric",
    "overlap_metric",
]


def _checked_n_values(n_values) -> list[int]:
    values = list(n_values)
    if not values:
        raise DataError("need at least one n value")
    for n in values:
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise DataError(f"n values must be positive integers, got {n!r}")
    return values


def _neighbor_ids(snapshot: CorpusSnapshot, space_name: str, n_max: int) -> dict[str, list[str]]:
    space = snapshot.require_space(space_name)
    if len(space) < 2:
        raise DataError(f"space {space_name!r} needs at least 2 vectors, has {len(space)}")
    ids = space.ids
    rows = pairwise_topn(space.unit_rows(), n_max, tie_keys=ids)
    return {ids[r]: [ids[i] for i, _ in picked] for r, picked in enumerate(rows)}


@dataclass(frozen=True)
class SymmetryEntry:
    n: int
    reciprocated_count: int
    total_directed_count: int

    @property
    def proportion(self) -> float:
        return self.reciprocated_count / self.total_directed_count

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "reciprocated_count": self.reciprocated_count,
            "total_directed_count": self.total_directed_count,
            "proportion": self.proportion,
        }


@dataclass(frozen=True)
class SymmetryReport:
    space_name: str
    entries: tuple[SymmetryEntry, ...]

    def to_dict(self) -> dict:
        return {
            "space": self.space_name,
            "entries": [entry.to_dict() for entry in self.entries],
        }

    def to_table(self) -> str:
        rows = [["N", "Reciprocated", "Directed", "Share"]]
        for e in self.entries:
            rows.append(
                [
                    str(e.n),
                    str(e.reciprocated_count),
                    str(e.total_directed_count),
                    f"{100.0 * e.proportion:.1f}%",
                ]
            )
        return _align(rows)


@dataclass(frozen=True)
class OverlapEntry:
    n: int
    mean_overlap: float
    proportion_zero_overlap: float
    proportion_overlap_at_most_one: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mean_overlap": self.mean_overlap,
            "proportion_zero_overlap": self.proportion_zero_overlap,
            "proportion_overlap_at_most_one": self.proportion_overlap_at_most_one,
        }


@dataclass(frozen=True)
class OverlapReport:
    space_a: str
    space_b: str
    entries: tuple[OverlapEntry, ...]

    def to_dict(self) -> dict:
        return {
            "space_a": self.space_a,
            "space_b": self.space_b,
            "entries": [entry.to_dict() for entry in self.entries],
        }

    def to_table(self) -> str:
        rows = [["N", "Avg. Overlap", "No-Overlap", "Overlap <= 1"]]
        for e in self.entries:
            rows.append(
                [
                    str(e.n),
                    f"{e.mean_overlap:.2f}",
                    f"{100.0 * e.proportion_zero_overlap:.1f}%",
                    f"{100.0 * e.proportion_overlap_at_most_one:.1f}%",
                ]
            )
        return _align(rows)


def _align(rows: list[list[str]]) -> str:
    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    lines = ["  ".join(cell.rjust(widths[c]) for c, cell in enumerate(row)) for row in rows]
    return "\n".join(lines)


def symmetry_metric(
    snapshot: CorpusSnapshot, space_name: str, n_values: list[int]
) -> SymmetryReport:
    """Reciprocation counts of directed top-n edges, per requested n.

    An edge i -> j (j in i's top-n) is reciprocated when i is in j's top-n.
    The directed total is sum over images of min(n, corpus-1), so the
    proportion is the share of recommendations pointing back.
    """
    n_values = _checked_n_values(n_values)
    lists = _neighbor_ids(snapshot, space_name, max(n_values))
    corpus = len(lists)
    entries = []
    for n in sorted(set(n_values)):
        k = min(n, corpus - 1)
        prefix_sets = {seed: set(ranked[:k]) for seed, ranked in lists.items()}
        reciprocated = sum(
            1
            for seed, ranked in lists.items()
            for neighbor in ranked[:k]
            if seed in prefix_sets[neighbor]
        )
        entries.append(
            SymmetryEntry(
                n=n, reciprocated_count=reciprocated, total_directed_count=corpus * k
            )
        )
    return SymmetryReport(space_name=space_name, entries=tuple(entries))


def overlap_metric(
    snapshot: CorpusSnapshot, space_a: str, space_b: str, n_values: list[int]
) -> OverlapReport:
    """Per-seed intersection size of two spaces' top-n sets, per requested n.

    Reports the mean intersection size and the shares of seeds with empty
    (and at-most-one-element) intersections.  Symmetric in the space order.
    """
    n_values = _checked_n_values(n_values)
    ids_a = set(snapshot.require_space(space_a).ids)
    ids_b = set(snapshot.require_space(space_b).ids)
    if ids_a != ids_b:
        missing_in_b = sorted(ids_a - ids_b)
        missing_in_a = sorted(ids_b - ids_a)
        parts = []
        if missing_in_b:
            parts.append(f"missing in {space_b!r}: {_preview(missing_in_b)}")
        if missing_in_a:
            parts.append(f"missing in {space_a!r}: {_preview(missing_in_a)}")
        raise DataError(f"spaces cover different images; {'; '.join(parts)}")
    n_max = max(n_values)
    lists_a = _neighbor_ids(snapshot, space_a, n_max)
    lists_b = _neighbor_ids(snapshot, space_b, n_max)
    corpus = len(lists_a)
    entries = []
    for n in sorted(set(n_values)):
        k = min(n, corpus - 1)
        total = 0
        zero = 0
        at_most_one = 0
        for seed, ranked_a in lists_a.items():
            overlap = len(set(ranked_a[:k]) & set(lists_b[seed][:k]))
            total += overlap
            if overlap == 0:
                zero += 1
            if overlap <= 1:
                at_most_one += 1
        entries.append(
            OverlapEntry(
                n=n,
                mean_overlap=total / corpus,
                proportion_zero_overlap=zero / corpus,
                proportion_overlap_at_most_one=at_most_one / corpus,
            )
        )
    return OverlapReport(space_a=space_a, space_b=space_b, entries=tuple(entries))


def _preview(ids: list[str], cap: int = 10) -> str:
    shown = ", ".join(ids[:cap])
    if len(ids) > cap:
        shown += f", ... ({len(ids) - cap} more)"
    return shown
