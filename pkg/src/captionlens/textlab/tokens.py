"""Tokenization, rule-based lemmatization, and noun tagging for captions.

The pipeline is deliberately model-free: a regex tokenizer, a plural-stripping
lemma layer backed by an irregulars table, and a pluggable noun tagger whose
default combines a closed-class stoplist, an embedded noun lexicon, and
derivational suffix heuristics.  Everything is deterministic and total over
arbitrary UTF-8 input.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources as importlib_resources
from typing import Iterable, Protocol

__all__ = [
    "Token",
    "NounTagger",
    "RuleNounTagger",
    "tokenize",
    "lemmatize",
    "tokenize_and_tag",
    "noun_lemma_counts",
    "default_tagger",
]

# Word = a run of letters/digits; underscores and apostrophes split.
_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Singular surface forms ending in a bare "s" that the stripping rules must
# leave alone (beyond the -ss/-us/-is ending guards).
_S_STRIP_EXCEPTIONS = frozenset(
    {"gas", "lens", "news", "canvas", "atlas", "chaos", "iris", "bonus"}
)


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    is_noun: bool


def _load_lines(name: str) -> list[str]:
    text = (
        importlib_resources.files("captionlens.textlab")
        .joinpath("resources", name)
        .read_text(encoding="utf-8")
    )
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def _load_word_set(name: str) -> frozenset[str]:
    return frozenset(_load_lines(name))


def _load_pair_table(name: str) -> dict[str, str]:
    table = {}
    for line in _load_lines(name):
        left, _, right = line.partition("\t")
        table[left.strip()] = right.strip()
    return table


@lru_cache(maxsize=1)
def _irregular_lemmas() -> dict[str, str]:
    return _load_pair_table("irregular_lemmas.txt")


def tokenize(text: str) -> list[str]:
    """Split text into surface words on whitespace and punctuation."""
    return _WORD_RE.findall(text)


def lemmatize(surface: str) -> str:
    """Lowercase and singularize one surface word.

    Rule layer: irregulars table first, then -ies -> -y, then -es stripping
    after sibilant endings, then bare -s stripping with an exception list.
    The result is always lowercase and non-empty.
    """
    word = surface.lower()
    irregular = _irregular_lemmas().get(word)
    if irregular is not None:
        return irregular
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith(("sses", "ches", "shes", "xes", "zes")) and len(word) > 4:
        return word[:-2]
    if (
        word.endswith("s")
        and len(word) > 3
        and not word.endswith(("ss", "us", "is"))
        and word not in _S_STRIP_EXCEPTIONS
    ):
        return word[:-1]
    return word


class NounTagger(Protocol):
    """Pluggable part-of-speech component: decides noun-hood per token."""

    def is_noun(self, lemma: str, surface: str) -> bool: ...


class RuleNounTagger:
    """Default tagger: stoplist, noun lexicon, and suffix heuristics.

    A token is a noun when its lemma sits in the noun lexicon or carries a
    nominal suffix (-tion/-ment/-ness/-ity, or -er over a known verb stem),
    unless its form belongs to the closed-class stoplist.
    """

    _NOMINAL_SUFFIXES = ("tion", "ment", "ness", "ity")

    def __init__(
        self,
        stopwords: Iterable[str] | None = None,
        nouns: Iterable[str] | None = None,
        verb_stems: Iterable[str] | None = None,
    ):
        self.stopwords = (
            frozenset(stopwords) if stopwords is not None else _load_word_set("stopwords.txt")
        )
        self.nouns = frozenset(nouns) if nouns is not None else _load_word_set("nouns.txt")
        self.verb_stems = (
            frozenset(verb_stems) if verb_stems is not None else _load_word_set("verbs.txt")
        )

    def is_noun(self, lemma: str, surface: str) -> bool:
        if surface.lower() in self.stopwords or lemma in self.stopwords:
            return False
        if lemma in self.nouns:
            return True
        if len(lemma) >= 6 and lemma.endswith(self._NOMINAL_SUFFIXES):
            return True
        if len(lemma) >= 4 and lemma.endswith("er"):
            return self._agent_noun_stem(lemma)
        return False

    def _agent_noun_stem(self, lemma: str) -> bool:
        candidates = [lemma[:-2], lemma[:-1]]
        stem = lemma[:-2]
        if len(stem) >= 3 and stem[-1] == stem[-2]:
            candidates.append(stem[:-1])
        return any(c in self.verb_stems for c in candidates)


@lru_cache(maxsize=1)
def default_tagger() -> RuleNounTagger:
    return RuleNounTagger()


def tokenize_and_tag(text: str, tagger: NounTagger | None = None) -> list[Token]:
    """Tokenize, lemmatize, and noun-tag a text. Empty text yields []."""
    if tagger is None:
        tagger = default_tagger()
    out = []
    for surface in tokenize(text):
        lemma = lemmatize(surface)
        out.append(Token(surface=surface, lemma=lemma, is_noun=tagger.is_noun(lemma, surface)))
    return out


def noun_lemma_counts(text: str, tagger: NounTagger | None = None) -> Counter[str]:
    """Count noun lemmas in a text; the unit used by keyness corpora."""
    counts: Counter[str] = Counter()
    for token in tokenize_and_tag(text, tagger):
        if token.is_noun:
            counts[token.lemma] += 1
    return counts
