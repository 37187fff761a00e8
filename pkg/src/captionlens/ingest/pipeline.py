"""Batch caption/embed pipeline over a manifest.

Both stages are resumable: work is selected by record status, progress is
persisted through a caller-supplied hook after every completion, and a
rerun over finished records makes zero provider calls.  Transient provider
failures retry with exponential backoff; an item still failing after the
last attempt is left in its previous status and the batch continues.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from captionlens.corpus.embeddings import EmbeddingSpace, read_embedding_file
from captionlens.corpus.manifest import Manifest
from captionlens.corpus.records import (
    STATUS_CAPTIONED,
    STATUS_EMBEDDED,
    STATUS_PENDING,
    STATUS_REJECTED,
    Caption,
    ImageRecord,
)
from captionlens.errors import DataError, TransientProviderError
from captionlens.ingest.providers import (
    OK,
    REJECTED,
    TRANSIENT,
    CaptionProvider,
    CaptionProviderConfig,
    EmbeddingProvider,
    ProviderResult,
    RetryPolicy,
)
from captionlens.ingest.resize import ResizeRule, prepare_jpeg_bytes, read_image_size
from captionlens.textlab.phrases import NeutralizationLexicon, neutralize

__all__ = [
    "PipelineReport",
    "scan_images",
    "caption_corpus",
    "embed_corpus",
    "import_vectors",
]

logger = logging.getLogger(__name__)

_IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png")

PersistHook = Callable[[], None]


@dataclass(frozen=True)
class PipelineReport:
    processed: int
    succeeded: int
    rejected: int
    failed: tuple[str, ...]
    skipped: int

    def to_dict(self) -> dict:
        return {
            "processed": self.processed,
            "succeeded": self.succeeded,
            "rejected": self.rejected,
            "failed": list(self.failed),
            "skipped": self.skipped,
        }


def scan_images(image_root: str | Path) -> Manifest:
    """Build a pending-status manifest from the image files under a directory.

    Ids are extension-less POSIX-style relative paths; records are ordered
    by id so repeated scans of the same tree agree.
    """
    image_root = Path(image_root)
    if not image_root.is_dir():
        raise DataError(f"image root {image_root} is not a directory")
    records = []
    seen: dict[str, str] = {}
    for path in sorted(image_root.rglob("*")):
        if not path.is_file() or path.suffix.lower() not in _IMAGE_SUFFIXES:
            continue
        relative = path.relative_to(image_root).as_posix()
        image_id = relative.rsplit(".", 1)[0]
        if image_id in seen:
            raise DataError(
                f"id collision: {relative!r} and {seen[image_id]!r} both map to {image_id!r}"
            )
        seen[image_id] = relative
        width, height = read_image_size(path)
        records.append(
            ImageRecord(
                id=image_id,
                source_path=relative,
                title=path.stem,
                width_px=width,
                height_px=height,
                status=STATUS_PENDING,
            )
        )
    records.sort(key=lambda r: r.id)
    return Manifest(records=records)


def _retrying_caption(
    provider: CaptionProvider,
    image_bytes: bytes,
    image_id: str,
    retry: RetryPolicy,
    sleep: Callable[[float], None],
) -> ProviderResult:
    result = ProviderResult.transient_error("not attempted")
    for attempt in range(retry.max_attempts):
        result = provider.caption(image_bytes, image_id)
        if result.kind != TRANSIENT:
            return result
        if attempt + 1 < retry.max_attempts:
            sleep(retry.backoff(attempt))
    return result


def caption_corpus(
    manifest: Manifest,
    provider: CaptionProvider,
    config: CaptionProviderConfig,
    image_root: str | Path,
    rule: ResizeRule = ResizeRule(),
    persist: PersistHook | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> PipelineReport:
    """Caption every pending record, updating the manifest in place.

    Images are resized per the rule and sent as JPEG bytes.  Safety
    rejections are terminal (status rejected, reason kept); token usage at
    or above the configured cap is clamped to it, which is what marks a
    caption as capped.
    """
    image_root = Path(image_root)
    pending = manifest.with_status(STATUS_PENDING)
    skipped = len(manifest) - len(pending)
    succeeded = rejected = 0
    failed: list[str] = []

    def work(record: ImageRecord) -> tuple[ImageRecord, ProviderResult]:
        data = prepare_jpeg_bytes(image_root / record.source_path, rule)
        return record, _retrying_caption(provider, data, record.id, config.retry, sleep)

    with ThreadPoolExecutor(max_workers=config.max_concurrency) as executor:
        futures = {executor.submit(work, record) for record in pending}
        while futures:
            done, futures = wait(futures, return_when=FIRST_COMPLETED)
            for future in done:
                record, result = future.result()
                if result.kind == OK:
                    token_count = min(result.token_usage, config.max_tokens)
                    caption = Caption.from_text(
                        image_id=record.id,
                        text=result.text,
                        token_count=token_count,
                        model_id=config.model_id,
                        prompt_id=config.prompt_id,
                    )
                    manifest.update(record.with_status(STATUS_CAPTIONED), caption)
                    succeeded += 1
                elif result.kind == REJECTED:
                    manifest.update(record.with_status(STATUS_REJECTED, result.reason))
                    rejected += 1
                else:
                    logger.warning(
                        "image %s: captioning failed after %d attempts: %s",
                        record.id,
                        config.retry.max_attempts,
                        result.detail,
                    )
                    failed.append(record.id)
                if persist is not None:
                    persist()
    return PipelineReport(
        processed=len(pending),
        succeeded=succeeded,
        rejected=rejected,
        failed=tuple(sorted(failed)),
        skipped=skipped,
    )


def _retrying_embed(
    provider: EmbeddingProvider,
    text: str,
    retry: RetryPolicy,
    sleep: Callable[[float], None],
):
    for attempt in range(retry.max_attempts):
        try:
            return provider.embed(text)
        except TransientProviderError as exc:
            if attempt + 1 >= retry.max_attempts:
                raise
            logger.info("retrying embedding after transient failure: %s", exc)
            sleep(retry.backoff(attempt))
    raise AssertionError("unreachable")  # pragma: no cover


def embed_corpus(
    manifest: Manifest,
    provider: EmbeddingProvider,
    space_name: str = "caption",
    neutralization: NeutralizationLexicon | None = None,
    existing: EmbeddingSpace | None = None,
    retry: RetryPolicy = RetryPolicy(),
    persist: Callable[[EmbeddingSpace], None] | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> tuple[EmbeddingSpace, PipelineReport]:
    """Embed every captioned record's text into one uniform-dimension space.

    With a neutralization lexicon, text is neutralized before embedding.
    Passing the space from an interrupted run as `existing` resumes it:
    records with vectors are skipped.  A vector of the wrong size aborts
    the run naming the offending image.
    """
    if existing is not None and existing.dimension != provider.dimension:
        raise DataError(
            f"existing space {existing.name!r} has dimension {existing.dimension}, "
            f"provider produces {provider.dimension}"
        )
    space = existing if existing is not None else EmbeddingSpace(space_name, provider.dimension)
    todo = [
        record
        for record in manifest.with_status(STATUS_CAPTIONED, STATUS_EMBEDDED)
        if record.id not in space
    ]
    skipped = len(manifest) - len(todo)
    succeeded = 0
    failed: list[str] = []
    for record in todo:
        caption = manifest.captions.get(record.id)
        if caption is None:
            raise DataError(f"image {record.id!r} is {record.status} but has no caption")
        text = caption.text
        if neutralization is not None:
            text = neutralize(text, neutralization)
        try:
            vector = _retrying_embed(provider, text, retry, sleep)
        except TransientProviderError as exc:
            logger.warning("image %s: embedding failed: %s", record.id, exc)
            failed.append(record.id)
            continue
        if vector.ndim != 1 or vector.shape[0] != provider.dimension:
            raise DataError(
                f"image {record.id!r}: provider returned {vector.size} dimensions, "
                f"expected {provider.dimension}"
            )
        space.add(record.id, vector)
        manifest.update(record.with_status(STATUS_EMBEDDED))
        succeeded += 1
        if persist is not None:
            persist(space)
    return space, PipelineReport(
        processed=len(todo),
        succeeded=succeeded,
        rejected=0,
        failed=tuple(sorted(failed)),
        skipped=skipped,
    )


def import_vectors(
    manifest: Manifest, path: str | Path, space_name: str
) -> EmbeddingSpace:
    """Load an embedding file as a named space, checking ids against the manifest."""
    space = read_embedding_file(path, name=space_name)
    unknown = [image_id for image_id in space.ids if image_id not in manifest]
    if unknown:
        preview = ", ".join(sorted(unknown)[:10])
        raise DataError(
            f"embedding file {path} names {len(unknown)} unknown image(s): {preview}"
        )
    return space
