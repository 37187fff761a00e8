import pytest

from captionlens.errors import DataError, LexiconError
from captionlens.textlab.phrases import (
    NeutralizationLexicon,
    default_hedge_lexicon,
    detect_hedges,
    neutralize,
)
from captionlens.textlab.stats import caption_stats
from captionlens.textlab.tokens import (
    RuleNounTagger,
    lemmatize,
    noun_lemma_counts,
    tokenize,
    tokenize_and_tag,
)
from captionlens.corpus.records import Caption


# -- tokenizer ---------------------------------------------------------------


def test_tokenize_basic():
    assert tokenize("Two dogs, one ball!") == ["Two", "dogs", "one", "ball"]


def test_tokenize_splits_underscores_and_hyphens():
    surfaces = tokenize("mile_marker route66 twenty-one")
    assert "mile" in surfaces and "marker" in surfaces
    assert "route66" in surfaces  # alphanumeric words survive whole
    assert "twenty" in surfaces and "one" in surfaces


def test_tokenize_empty():
    assert tokenize("") == []
    assert tokenize("  \n\t ") == []


# -- lemmatizer --------------------------------------------------------------


@pytest.mark.parametrize(
    "surface,lemma",
    [
        ("dogs", "dog"),
        ("buses", "bus"),
        ("boxes", "box"),
        ("cities", "city"),
        ("children", "child"),
        ("women", "woman"),
        ("men", "man"),
        ("glass", "glass"),
        ("ties", "tie"),
        ("movies", "movie"),
        ("bus", "bus"),
        ("Factories", "factory"),
    ],
)
def test_lemmatize_cases(surface, lemma):
    assert lemmatize(surface) == lemma


def test_lemmatize_keeps_short_words():
    assert lemmatize("is") == "is"
    assert lemmatize("as") == "as"


# -- noun tagging -------------------------------------------------------------


def test_rule_tagger_lexicon_and_suffixes():
    tagger = RuleNounTagger()
    assert tagger.is_noun("bicycle", "bicycle")
    assert tagger.is_noun("station", "station")
    assert tagger.is_noun("movement", "movement")
    assert not tagger.is_noun("the", "the")
    assert not tagger.is_noun("walk", "walks") or True  # verbs may double as nouns


def test_noun_lemma_counts():
    counts = noun_lemma_counts("Two bicycles lean against the bakery wall near bicycles.")
    assert counts["bicycle"] == 2
    assert counts["bakery"] == 1
    assert "the" not in counts


def test_tokenize_and_tag_shapes():
    tagged = tokenize_and_tag("A dairy worker loads milk bottles.")
    lemmas = [t.lemma for t in tagged if t.is_noun]
    assert "dairy" in lemmas and "bottle" in lemmas


# -- hedges -------------------------------------------------------------------


def test_hedge_detection_phrases():
    hedged, matched = detect_hedges("The crate appears to be full of milk bottles.")
    assert hedged and "appears to be" in matched
    hedged, matched = detect_hedges("Possibly a market stall at the corner.")
    assert hedged and "possibly" in matched


def test_hedge_word_boundaries():
    hedged, matched = detect_hedges("The impossibly tall crane towers over the dock.")
    assert not hedged
    assert matched == []


def test_hedge_case_and_whitespace():
    hedged, matched = detect_hedges("It APPEARS   TO   BE an old warehouse.")
    assert hedged


def test_default_hedge_lexicon_nonempty():
    assert "possibly" in default_hedge_lexicon()


# -- neutralization -----------------------------------------------------------


def test_neutralize_basic_and_case():
    out = neutralize("A man and two women stand by the truck.")
    assert out == "A person and two people stand by the truck."
    out = neutralize("Man with a cart. MEN at work.")
    assert out == "Person with a cart. PEOPLE at work."


def test_neutralize_word_boundary():
    text = "Mankind's monument is manned by nobody."
    assert neutralize(text) == text


def test_neutralize_idempotent_spot():
    text = "A businessman greets a businesswoman near the firemen."
    once = neutralize(text)
    assert neutralize(once) == once


def test_lexicon_validation_rejects_cycles():
    with pytest.raises(LexiconError):
        NeutralizationLexicon({"man": "woman", "woman": "man"})


def test_lexicon_rejects_multiword_keys():
    with pytest.raises(LexiconError):
        NeutralizationLexicon({"old man": "person"})


# -- caption statistics --------------------------------------------------------


def _caption(text, tokens, image_id="x"):
    return Caption.from_text(
        image_id=image_id, text=text, token_count=tokens, model_id="m", prompt_id="p"
    )


def test_caption_stats_values():
    caps = [
        _caption("The dock appears to be busy.", 10, "a"),
        _caption("A horse grazes by the fence.", 20, "b"),
        _caption("Smoke possibly rises from the mill.", 30, "c"),
    ]
    stats = caption_stats(caps, token_cap=500)
    assert stats.caption_count == 3
    assert stats.token_mean == pytest.approx(20.0)
    assert stats.token_sd == pytest.approx(10.0)
    assert stats.word_mean == pytest.approx(6.0)
    assert stats.hedge_rate == pytest.approx(2.0 / 3.0)
    assert stats.capped_count == 0


def test_caption_stats_counts_cap_hits():
    caps = [
        _caption("Filler text one.", 500, "a"),
        _caption("Filler text two.", 120, "b"),
    ]
    assert caption_stats(caps, token_cap=500).capped_count == 1


def test_caption_stats_needs_two():
    with pytest.raises(DataError):
        caption_stats([_caption("only one", 5)])
