"""Text analytics over captions: tokens, keyness, hedges, neutralization."""

from captionlens.textlab.keyness import (
    ContingencyTable,
    KeynessScore,
    explanation_terms,
    g2,
    keyness_rank,
    label_recommendation_set,
)
from captionlens.textlab.phrases import (
    NeutralizationLexicon,
    default_hedge_lexicon,
    detect_hedges,
    neutralize,
)
from captionlens.textlab.stats import CaptionStats, caption_stats
from captionlens.textlab.tokens import (
    NounTagger,
    RuleNounTagger,
    Token,
    default_tagger,
    lemmatize,
    noun_lemma_counts,
    tokenize,
    tokenize_and_tag,
)

__all__ = [
    "ContingencyTable",
    "KeynessScore",
    "CaptionStats",
    "NeutralizationLexicon",
    "NounTagger",
    "RuleNounTagger",
    "Token",
    "caption_stats",
    "default_hedge_lexicon",
    "default_tagger",
    "detect_hedges",
    "explanation_terms",
    "g2",
    "keyness_rank",
    "label_recommendation_set",
    "lemmatize",
    "neutralize",
    "noun_lemma_counts",
    "tokenize",
    "tokenize_and_tag",
]
