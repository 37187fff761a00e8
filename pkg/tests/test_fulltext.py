import math

import pytest

from captionlens.corpus.fulltext import FulltextIndex, build_fulltext_index
from captionlens.errors import DataError

K1 = 1.2
B = 0.75


def _index(docs: dict[str, str]) -> FulltextIndex:
    return build_fulltext_index(docs.items())


def test_idf_is_never_negative():
    # a term in every document would go negative under plain BM25 idf
    docs = {f"d{i}": "harbor crane" for i in range(10)}
    index = _index(docs)
    assert index.idf("harbor") > 0.0


def oracle_bm25(tf, doc_len, avg_len, n_docs, df):
    idf = math.log(1 + (n_docs - df + 0.5) / (df + 0.5))
    return idf * (tf * (K1 + 1)) / (tf + K1 * (1 - B + B * doc_len / avg_len))


def test_scores_match_hand_arithmetic():
    docs = {
        "a": "crane lifts cargo crane",          # 4 terms, crane tf=2
        "b": "cargo ship waits at the dock",      # 6 terms
        "c": "a quiet dock at dawn",              # 5 terms
    }
    index = _index(docs)
    avg_len = (4 + 6 + 5) / 3
    hits = index.search("crane", limit=10)
    assert [h.image_id for h in hits] == ["a"]
    expected = oracle_bm25(tf=2, doc_len=4, avg_len=avg_len, n_docs=3, df=1)
    assert hits[0].score == pytest.approx(expected, rel=1e-12)

    hits = index.search("dock", limit=10)
    assert {h.image_id for h in hits} == {"b", "c"}
    for hit in hits:
        doc_len = 6 if hit.image_id == "b" else 5
        expected = oracle_bm25(tf=1, doc_len=doc_len, avg_len=avg_len, n_docs=3, df=2)
        assert hit.score == pytest.approx(expected, rel=1e-12)


def test_multi_term_query_sums_and_dedupes():
    docs = {
        "a": "crane crane dock",
        "b": "dock dock dock",
    }
    index = _index(docs)
    single = {h.image_id: h.score for h in index.search("crane dock", limit=10)}
    repeated = {h.image_id: h.score for h in index.search("crane dock crane", limit=10)}
    assert single == repeated  # duplicate query terms collapse


def test_ties_break_by_ascending_id():
    docs = {
        "z": "harbor crane",
        "a": "harbor crane",
        "m": "harbor crane",
    }
    hits = _index(docs).search("harbor", limit=10)
    assert [h.image_id for h in hits] == ["a", "m", "z"]


def test_limit_truncates():
    docs = {f"d{i:02d}": "harbor view" for i in range(20)}
    assert len(_index(docs).search("harbor", limit=5)) == 5


def test_unknown_terms_yield_no_hits():
    assert _index({"a": "harbor"}).search("zeppelin", limit=5) == []


def test_matched_terms_reported():
    docs = {"a": "crane near the dock", "b": "crane only"}
    hits = _index(docs).search("crane dock zeppelin", limit=5)
    by_id = {h.image_id: h.matched_terms for h in hits}
    assert set(by_id["a"]) == {"crane", "dock"}
    assert set(by_id["b"]) == {"crane"}


def test_query_validation():
    index = _index({"a": "harbor"})
    with pytest.raises(DataError):
        index.search("harbor", limit=0)
    with pytest.raises(DataError):
        index.search("!!! ...", limit=5)


def test_double_indexing_rejected():
    index = FulltextIndex()
    index.add_document("a", "harbor crane")
    with pytest.raises(DataError, match="twice"):
        index.add_document("a", "harbor crane")


def test_case_folding():
    hits = _index({"a": "Harbor CRANE"}).search("harbor crane", limit=5)
    assert hits and hits[0].image_id == "a"
