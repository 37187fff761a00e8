"""Line-delimited JSON manifest: one image record per line.

The manifest is the pipeline's durable state.  Parsing is strict: missing or
unknown fields, bad types, and duplicate ids are errors that name the
offending line.  Saving is atomic (temp file + rename) so an interrupted
captioning run never leaves a half-written manifest behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from captionlens.errors import ManifestError
from captionlens.corpus.records import (
    Caption,
    DEFAULT_TOKEN_CAP,
    ImageRecord,
    STATUS_CAPTIONED,
    STATUS_EMBEDDED,
    STATUS_REJECTED,
    STATUSES,
)

_RECORD_FIELDS = {
    "id",
    "source_path",
    "title",
    "metadata",
    "width_px",
    "height_px",
    "status",
    "rejection_reason",
    "caption",
}
_REQUIRED_FIELDS = ("id", "source_path", "title", "metadata", "width_px", "height_px", "status")
_CAPTION_FIELDS = ("text", "token_count", "word_count", "model_id", "prompt_id")


@dataclass
class Manifest:
    """Ordered image records plus their captions, keyed by image id."""

    records: list[ImageRecord] = field(default_factory=list)
    captions: dict[str, Caption] = field(default_factory=dict)

    def __post_init__(self):
        self._by_id = {r.id: i for i, r in enumerate(self.records)}
        if len(self._by_id) != len(self.records):
            raise ManifestError("duplicate image ids in manifest")

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, image_id: str) -> bool:
        return image_id in self._by_id

    def get(self, image_id: str) -> ImageRecord | None:
        i = self._by_id.get(image_id)
        return None if i is None else self.records[i]

    def update(self, record: ImageRecord, caption: Caption | None = None) -> None:
        """Replace one record (and its caption) in place, preserving order."""
        i = self._by_id.get(record.id)
        if i is None:
            self._by_id[record.id] = len(self.records)
            self.records.append(record)
        else:
            self.records[i] = record
        if caption is not None:
            self.captions[record.id] = caption
        elif record.status == STATUS_REJECTED:
            self.captions.pop(record.id, None)

    def with_status(self, *statuses: str) -> list[ImageRecord]:
        return [r for r in self.records if r.status in statuses]


def _parse_caption(obj, image_id: str, line_no: int, token_cap: int) -> Caption:
    if not isinstance(obj, dict):
        raise ManifestError("caption must be an object", line_no)
    missing = [f for f in _CAPTION_FIELDS if f not in obj]
    if missing:
        raise ManifestError(f"caption missing fields: {', '.join(missing)}", line_no)
    unknown = set(obj) - set(_CAPTION_FIELDS)
    if unknown:
        raise ManifestError(f"caption has unknown fields: {', '.join(sorted(unknown))}", line_no)
    try:
        caption = Caption(
            image_id=image_id,
            text=str(obj["text"]),
            token_count=int(obj["token_count"]),
            word_count=int(obj["word_count"]),
            model_id=str(obj["model_id"]),
            prompt_id=str(obj["prompt_id"]),
        )
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"invalid caption: {exc}", line_no) from exc
    if caption.token_count > token_cap:
        raise ManifestError(
            f"caption token_count {caption.token_count} exceeds the cap {token_cap}", line_no
        )
    return caption


def _parse_line(line: str, line_no: int, token_cap: int) -> tuple[ImageRecord, Caption | None]:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"invalid JSON: {exc.msg}", line_no) from exc
    if not isinstance(obj, dict):
        raise ManifestError("manifest line must be a JSON object", line_no)
    missing = [f for f in _REQUIRED_FIELDS if f not in obj]
    if missing:
        raise ManifestError(f"missing required fields: {', '.join(missing)}", line_no)
    unknown = set(obj) - _RECORD_FIELDS
    if unknown:
        raise ManifestError(f"unknown fields: {', '.join(sorted(unknown))}", line_no)
    metadata = obj["metadata"]
    if not isinstance(metadata, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in metadata.items()
    ):
        raise ManifestError("metadata must be an object of text -> text", line_no)
    status = obj["status"]
    if status not in STATUSES:
        raise ManifestError(f"unknown status {status!r}", line_no)
    caption_obj = obj.get("caption")
    if status in (STATUS_CAPTIONED, STATUS_EMBEDDED) and caption_obj is None:
        raise ManifestError(f"status {status} requires a caption", line_no)
    if status not in (STATUS_CAPTIONED, STATUS_EMBEDDED) and caption_obj is not None:
        raise ManifestError(f"status {status} must not carry a caption", line_no)
    try:
        record = ImageRecord(
            id=str(obj["id"]),
            source_path=str(obj["source_path"]),
            title=str(obj["title"]),
            metadata=metadata,
            width_px=int(obj["width_px"]),
            height_px=int(obj["height_px"]),
            status=status,
            rejection_reason=obj.get("rejection_reason"),
        )
    except (TypeError, ValueError) as exc:
        raise ManifestError(str(exc), line_no) from exc
    caption = None
    if caption_obj is not None:
        caption = _parse_caption(caption_obj, record.id, line_no, token_cap)
    return record, caption


def load_manifest(path: str | Path, token_cap: int = DEFAULT_TOKEN_CAP) -> Manifest:
    """Parse a manifest file strictly, preserving record order."""
    path = Path(path)
    if not path.exists():
        raise ManifestError(f"manifest file not found: {path}")
    records: list[ImageRecord] = []
    captions: dict[str, Caption] = {}
    seen: dict[str, int] = {}
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record, caption = _parse_line(line, line_no, token_cap)
            if record.id in seen:
                raise ManifestError(
                    f"duplicate id {record.id!r} (first seen on line {seen[record.id]})",
                    line_no,
                )
            seen[record.id] = line_no
            records.append(record)
            if caption is not None:
                captions[record.id] = caption
    return Manifest(records=records, captions=captions)


def record_to_json(record: ImageRecord, caption: Caption | None) -> dict:
    obj = {
        "id": record.id,
        "source_path": record.source_path,
        "title": record.title,
        "metadata": dict(record.metadata),
        "width_px": record.width_px,
        "height_px": record.height_px,
        "status": record.status,
    }
    if record.rejection_reason is not None:
        obj["rejection_reason"] = record.rejection_reason
    if caption is not None:
        obj["caption"] = {
            "text": caption.text,
            "token_count": caption.token_count,
            "word_count": caption.word_count,
            "model_id": caption.model_id,
            "prompt_id": caption.prompt_id,
        }
    return obj


def save_manifest(manifest: Manifest, path: str | Path) -> None:
    """Write the manifest atomically (temp file in place, then rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            for record in manifest.records:
                obj = record_to_json(record, manifest.captions.get(record.id))
                fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
