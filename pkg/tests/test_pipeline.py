import numpy as np
import pytest
from PIL import Image

from captionlens.corpus.embeddings import EmbeddingSpace, write_embedding_file
from captionlens.corpus.manifest import Manifest
from captionlens.corpus.records import (
    STATUS_CAPTIONED,
    STATUS_EMBEDDED,
    STATUS_PENDING,
    STATUS_REJECTED,
)
from captionlens.errors import DataError, TransientProviderError
from captionlens.ingest.pipeline import (
    caption_corpus,
    embed_corpus,
    import_vectors,
    scan_images,
)
from captionlens.ingest.providers import (
    CaptionProviderConfig,
    MockCaptionProvider,
    MockEmbeddingProvider,
    RetryPolicy,
    deterministic_mock_embedding,
)
from captionlens.textlab.phrases import NeutralizationLexicon, neutralize


def _make_images(root, names, size=(32, 24)):
    for name in names:
        path = root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.new("RGB", size, (120, 130, 140)).save(path)


def _config(**kwargs):
    kwargs.setdefault("retry", RetryPolicy(max_attempts=3, base_backoff_seconds=0.0))
    kwargs.setdefault("max_concurrency", 1)
    return CaptionProviderConfig(**kwargs)


def _no_sleep(_seconds):
    return None


# -- scan ----------------------------------------------------------------------


def test_scan_builds_sorted_pending_manifest(tmp_path):
    _make_images(tmp_path, ["b.jpg", "sub/a.png", "a.jpeg"], size=(40, 30))
    (tmp_path / "notes.txt").write_text("not an image")
    manifest = scan_images(tmp_path)
    assert [r.id for r in manifest.records] == ["a", "b", "sub/a"]
    record = manifest.get("sub/a")
    assert record.source_path == "sub/a.png"
    assert record.status == STATUS_PENDING
    assert (record.width_px, record.height_px) == (40, 30)


def test_scan_rejects_id_collisions(tmp_path):
    _make_images(tmp_path, ["x.jpg", "x.png"])
    with pytest.raises(DataError, match="collision"):
        scan_images(tmp_path)


def test_scan_requires_directory(tmp_path):
    with pytest.raises(DataError, match="not a directory"):
        scan_images(tmp_path / "missing")


# -- captioning ----------------------------------------------------------------


def test_caption_happy_path_records_provenance(tmp_path):
    _make_images(tmp_path, ["a.jpg", "b.jpg"])
    manifest = scan_images(tmp_path)
    provider = MockCaptionProvider({"a": "a red barn", "b": "a blue lake"})
    config = _config(model_id="scripted-model")
    report = caption_corpus(manifest, provider, config, tmp_path, sleep=_no_sleep)
    assert (report.processed, report.succeeded, report.rejected) == (2, 2, 0)
    assert report.failed == ()
    caption = manifest.captions["a"]
    assert caption.text == "a red barn"
    assert caption.word_count == 3
    assert caption.model_id == "scripted-model"
    assert caption.prompt_id == config.prompt_id
    assert manifest.get("a").status == STATUS_CAPTIONED


def test_caption_rejection_is_terminal_and_reason_kept(tmp_path):
    _make_images(tmp_path, ["a.jpg", "b.jpg"])
    manifest = scan_images(tmp_path)
    provider = MockCaptionProvider(
        {"b": "fine"}, rejections={"a": "flagged: people"}
    )
    report = caption_corpus(manifest, provider, _config(), tmp_path, sleep=_no_sleep)
    assert report.rejected == 1 and report.succeeded == 1
    record = manifest.get("a")
    assert record.status == STATUS_REJECTED
    assert record.rejection_reason == "flagged: people"
    assert "a" not in manifest.captions


def test_caption_retries_transient_then_succeeds(tmp_path):
    _make_images(tmp_path, ["a.jpg"])
    manifest = scan_images(tmp_path)
    provider = MockCaptionProvider({"a": "ok"}, transient_failures={"a": 2})
    sleeps = []
    report = caption_corpus(
        manifest,
        provider,
        _config(retry=RetryPolicy(max_attempts=3, base_backoff_seconds=0.5)),
        tmp_path,
        sleep=sleeps.append,
    )
    assert report.succeeded == 1
    assert provider.call_count == 3
    assert sleeps == [0.5, 1.0]  # exponential backoff between attempts


def test_caption_exhausted_retries_leave_record_pending(tmp_path):
    _make_images(tmp_path, ["a.jpg", "b.jpg"])
    manifest = scan_images(tmp_path)
    provider = MockCaptionProvider({"b": "fine"}, transient_failures={"a": 99})
    report = caption_corpus(manifest, provider, _config(), tmp_path, sleep=_no_sleep)
    assert report.failed == ("a",)
    assert report.succeeded == 1
    assert manifest.get("a").status == STATUS_PENDING  # retryable on the next run


def test_caption_rerun_makes_zero_calls(tmp_path):
    _make_images(tmp_path, ["a.jpg", "b.jpg"])
    manifest = scan_images(tmp_path)
    provider = MockCaptionProvider({"a": "one", "b": "two"})
    caption_corpus(manifest, provider, _config(), tmp_path, sleep=_no_sleep)
    assert provider.call_count == 2
    report = caption_corpus(manifest, provider, _config(), tmp_path, sleep=_no_sleep)
    assert provider.call_count == 2
    assert report.processed == 0 and report.skipped == 2


def test_caption_token_usage_clamped_to_cap(tmp_path):
    _make_images(tmp_path, ["a.jpg"])
    manifest = scan_images(tmp_path)
    provider = MockCaptionProvider({"a": "long text"}, token_counts={"a": 900})
    config = _config(max_tokens=500)
    caption_corpus(manifest, provider, config, tmp_path, sleep=_no_sleep)
    assert manifest.captions["a"].token_count == 500


def test_caption_persist_hook_called_per_completion(tmp_path):
    _make_images(tmp_path, ["a.jpg", "b.jpg", "c.jpg"])
    manifest = scan_images(tmp_path)
    provider = MockCaptionProvider(default_text=lambda i: f"photo {i}")
    count = 0

    def persist():
        nonlocal count
        count += 1

    caption_corpus(manifest, provider, _config(), tmp_path, persist=persist, sleep=_no_sleep)
    assert count == 3


# -- embedding -----------------------------------------------------------------


def _captioned_manifest(tmp_path, texts):
    _make_images(tmp_path, [f"{name}.jpg" for name in texts])
    manifest = scan_images(tmp_path)
    provider = MockCaptionProvider(dict(texts))
    caption_corpus(manifest, provider, _config(), tmp_path, sleep=_no_sleep)
    return manifest


def test_embed_happy_path(tmp_path):
    manifest = _captioned_manifest(tmp_path, {"a": "red barn roof", "b": "blue lake shore"})
    provider = MockEmbeddingProvider(dimension=16)
    space, report = embed_corpus(manifest, provider, sleep=_no_sleep)
    assert report.succeeded == 2 and report.failed == ()
    assert space.name == "caption" and space.dimension == 16
    assert set(space.ids) == {"a", "b"}
    assert manifest.get("a").status == STATUS_EMBEDDED
    expected = deterministic_mock_embedding("red barn roof", 16)
    assert np.array_equal(space.vector("a"), expected)


def test_embed_resume_skips_existing_vectors(tmp_path):
    manifest = _captioned_manifest(tmp_path, {"a": "one two", "b": "three four"})
    provider = MockEmbeddingProvider(dimension=8)
    existing = EmbeddingSpace("caption", 8)
    existing.add("a", deterministic_mock_embedding("one two", 8))
    space, report = embed_corpus(manifest, provider, existing=existing, sleep=_no_sleep)
    assert provider.call_count == 1  # only b
    assert report.succeeded == 1 and report.skipped == 1
    assert set(space.ids) == {"a", "b"}


def test_embed_resume_dimension_mismatch(tmp_path):
    manifest = _captioned_manifest(tmp_path, {"a": "one"})
    with pytest.raises(DataError, match="dimension"):
        embed_corpus(
            manifest,
            MockEmbeddingProvider(dimension=8),
            existing=EmbeddingSpace("caption", 9),
            sleep=_no_sleep,
        )


def test_embed_neutralizes_before_embedding(tmp_path):
    manifest = _captioned_manifest(tmp_path, {"a": "a man walks his dog"})
    lexicon = NeutralizationLexicon.default()
    provider = MockEmbeddingProvider(dimension=12)
    space, _ = embed_corpus(manifest, provider, neutralization=lexicon, sleep=_no_sleep)
    neutral_text = neutralize("a man walks his dog", lexicon)
    assert neutral_text != "a man walks his dog"
    assert np.array_equal(space.vector("a"), deterministic_mock_embedding(neutral_text, 12))


def test_embed_transient_exhaustion_marks_failed(tmp_path):
    manifest = _captioned_manifest(tmp_path, {"a": "flaky text", "b": "steady text"})
    provider = MockEmbeddingProvider(dimension=8, transient_failures={"flaky text": 99})
    space, report = embed_corpus(
        manifest,
        provider,
        retry=RetryPolicy(max_attempts=2, base_backoff_seconds=0.0),
        sleep=_no_sleep,
    )
    assert report.failed == ("a",)
    assert manifest.get("a").status == STATUS_CAPTIONED  # retryable later
    assert set(space.ids) == {"b"}


def test_embed_transient_retry_then_success(tmp_path):
    manifest = _captioned_manifest(tmp_path, {"a": "flaky text"})
    provider = MockEmbeddingProvider(dimension=8, transient_failures={"flaky text": 1})
    sleeps = []
    space, report = embed_corpus(
        manifest,
        provider,
        retry=RetryPolicy(max_attempts=3, base_backoff_seconds=0.25),
        sleep=sleeps.append,
    )
    assert report.succeeded == 1
    assert sleeps == [0.25]
    assert "a" in space


def test_embed_wrong_dimension_aborts_naming_image(tmp_path):
    manifest = _captioned_manifest(tmp_path, {"a": "odd vector text"})
    provider = MockEmbeddingProvider(dimension=8, wrong_dimension_texts={"odd vector text": 5})
    with pytest.raises(DataError, match="'a'"):
        embed_corpus(manifest, provider, sleep=_no_sleep)


def test_embed_persist_receives_growing_space(tmp_path):
    manifest = _captioned_manifest(tmp_path, {"a": "one", "b": "two", "c": "three"})
    sizes = []
    embed_corpus(
        manifest,
        MockEmbeddingProvider(dimension=8),
        persist=lambda space: sizes.append(len(space)),
        sleep=_no_sleep,
    )
    assert sizes == [1, 2, 3]


# -- vector import -------------------------------------------------------------


def test_import_vectors_checks_ids(tmp_path):
    manifest = _captioned_manifest(tmp_path, {"a": "one", "b": "two"})
    rng = np.random.default_rng(0)
    good = EmbeddingSpace.from_vectors(
        "visual", 4, [("a", rng.normal(size=4)), ("b", rng.normal(size=4))]
    )
    path = tmp_path / "visual.embd"
    write_embedding_file(good, path)
    loaded = import_vectors(manifest, path, "visual")
    assert loaded.ids == good.ids

    stranger = EmbeddingSpace.from_vectors(
        "visual", 4, [("a", rng.normal(size=4)), ("zz", rng.normal(size=4))]
    )
    bad_path = tmp_path / "bad.embd"
    write_embedding_file(stranger, bad_path)
    with pytest.raises(DataError, match="zz"):
        import_vectors(manifest, bad_path, "visual")
