"""Hedge-phrase detection and gendered-term neutralization."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping

from captionlens.errors import LexiconError
from captionlens.textlab.tokens import _load_lines, _load_pair_table

__all__ = [
    "NeutralizationLexicon",
    "default_hedge_lexicon",
    "detect_hedges",
    "neutralize",
]

_TOKEN_RE = re.compile(r"[^\W\d_]+", re.UNICODE)


@lru_cache(maxsize=1)
def default_hedge_lexicon() -> tuple[str, ...]:
    return tuple(_load_lines("hedges.txt"))


def load_hedge_lexicon(path: str | Path) -> tuple[str, ...]:
    phrases = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            phrases.append(line)
    return tuple(phrases)


def _phrase_pattern(phrase: str) -> re.Pattern[str]:
    words = phrase.split()
    joined = r"\W+".join(re.escape(w) for w in words)
    return re.compile(rf"(?<!\w){joined}(?!\w)", re.IGNORECASE)


def detect_hedges(
    text: str, lexicon: Iterable[str] | None = None
) -> tuple[bool, list[str]]:
    """Whole-phrase, case-insensitive hedge detection.

    Returns (hedged, matched phrases); matched phrases keep lexicon order.
    """
    phrases = tuple(lexicon) if lexicon is not None else default_hedge_lexicon()
    matched = [p for p in phrases if _phrase_pattern(p).search(text)]
    return bool(matched), matched


@dataclass(frozen=True)
class NeutralizationLexicon:
    """Whole-word replacement table applied to caption text before embedding.

    Valid lexicons map single lowercase tokens to single-token replacements,
    never map a word to itself, and never use a replacement that is itself a
    key — which makes neutralization idempotent by construction.
    """

    entries: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        keys = {k.lower() for k in self.entries}
        for source, replacement in self.entries.items():
            if source != source.lower() or not _is_single_token(source):
                raise LexiconError(f"lexicon key {source!r} must be a single lowercase word")
            if not _is_single_token(replacement):
                raise LexiconError(
                    f"replacement {replacement!r} for {source!r} must be a single word"
                )
            if source == replacement.lower():
                raise LexiconError(f"lexicon entry maps {source!r} to itself")
            if replacement.lower() in keys:
                raise LexiconError(
                    f"replacement {replacement!r} is itself a lexicon key; "
                    "neutralization would not be idempotent"
                )

    @classmethod
    def default(cls) -> "NeutralizationLexicon":
        return cls(entries=_load_pair_table("neutral_lexicon.txt"))

    @classmethod
    def load(cls, path: str | Path) -> "NeutralizationLexicon":
        entries = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            source, _, replacement = line.partition("\t")
            if not replacement:
                raise LexiconError(f"malformed lexicon line (need tab-separated pair): {line!r}")
            entries[source.strip()] = replacement.strip()
        return cls(entries=entries)


def _is_single_token(word: str) -> bool:
    return bool(word) and not any(ch.isspace() for ch in word)


def _match_case(source: str, replacement: str) -> str:
    if len(source) > 1 and source.isupper():
        return replacement.upper()
    if source[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


def neutralize(text: str, lexicon: NeutralizationLexicon | None = None) -> str:
    """Replace gendered terms with neutral ones, whole-word, case-preserving."""
    lex = lexicon if lexicon is not None else NeutralizationLexicon.default()
    entries = lex.entries

    def substitute(match: re.Match[str]) -> str:
        word = match.group(0)
        replacement = entries.get(word.lower())
        if replacement is None:
            return word
        return _match_case(word, replacement)

    return _TOKEN_RE.sub(substitute, text)
