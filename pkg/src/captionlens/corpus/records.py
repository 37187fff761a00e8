"""Image records and caption surrogates.

An image moves through the statuses pending -> captioned -> embedded, or to
rejected when the caption provider refuses it.  Invariants that span entities
(embedded images must own a caption and a vector) are enforced when a
snapshot is assembled.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping

STATUS_PENDING = "pending"
STATUS_CAPTIONED = "captioned"
STATUS_REJECTED = "rejected"
STATUS_EMBEDDED = "embedded"

STATUSES = frozenset(
    {STATUS_PENDING, STATUS_CAPTIONED, STATUS_REJECTED, STATUS_EMBEDDED}
)

DEFAULT_TOKEN_CAP = 500


def word_count_of(text: str) -> int:
    """Whitespace-delimited word count; the recomputable caption invariant."""
    return len(text.split())


@dataclass(frozen=True)
class Caption:
    image_id: str
    text: str
    token_count: int
    word_count: int
    model_id: str
    prompt_id: str

    def __post_init__(self):
        if self.token_count < 0:
            raise ValueError(f"token_count must be >= 0, got {self.token_count}")
        expected = word_count_of(self.text)
        if self.word_count != expected:
            raise ValueError(
                f"word_count {self.word_count} does not match the whitespace "
                f"token count {expected} of the caption text"
            )

    @classmethod
    def from_text(cls, image_id: str, text: str, token_count: int, model_id: str, prompt_id: str):
        return cls(
            image_id=image_id,
            text=text,
            token_count=token_count,
            word_count=word_count_of(text),
            model_id=model_id,
            prompt_id=prompt_id,
        )


@dataclass(frozen=True)
class ImageRecord:
    id: str
    source_path: str
    title: str
    metadata: Mapping[str, str] = field(default_factory=dict)
    width_px: int = 0
    height_px: int = 0
    status: str = STATUS_PENDING
    rejection_reason: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("image id must be non-empty")
        if self.width_px < 1 or self.height_px < 1:
            raise ValueError(
                f"image {self.id!r}: dimensions must be positive, "
                f"got {self.width_px}x{self.height_px}"
            )
        if self.status not in STATUSES:
            raise ValueError(f"image {self.id!r}: unknown status {self.status!r}")
        if self.status == STATUS_REJECTED and not self.rejection_reason:
            raise ValueError(f"image {self.id!r}: rejected without a rejection reason")
        if self.status != STATUS_REJECTED and self.rejection_reason:
            raise ValueError(
                f"image {self.id!r}: rejection_reason present but status is {self.status}"
            )
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))

    def with_status(self, status: str, rejection_reason: str | None = None) -> "ImageRecord":
        return replace(
            self, status=status, rejection_reason=rejection_reason, metadata=dict(self.metadata)
        )
