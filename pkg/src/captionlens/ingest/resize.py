"""Image downscaling rule and helpers.

The rule caps the long side and the short side independently, preserves
aspect ratio, and never upscales:

    scale = min(1, max_long/long, max_short/short)

Rounding is half-up with a 1 px floor.  Because scale * long <= max_long
and scale * short <= max_short hold exactly, half-up rounding cannot push
either side past its cap, and reapplying the rule to its own output is the
identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from io import BytesIO
from pathlib import Path

from PIL import Image

from captionlens.errors import DataError

__all__ = [
    "ResizeRule",
    "compute_target_dimensions",
    "resize_image",
    "prepare_jpeg_bytes",
    "read_image_size",
]

JPEG_QUALITY = 90


@dataclass(frozen=True)
class ResizeRule:
    max_long_side: int = 1024
    max_short_side: int = 768

    def __post_init__(self):
        if self.max_long_side < 1 or self.max_short_side < 1:
            raise DataError("resize bounds must be positive")
        if self.max_long_side < self.max_short_side:
            raise DataError(
                f"max_long_side {self.max_long_side} is smaller than "
                f"max_short_side {self.max_short_side}"
            )


def _round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def compute_target_dimensions(
    width: int, height: int, rule: ResizeRule = ResizeRule()
) -> tuple[int, int]:
    """Output dimensions under the rule; identity when already within bounds."""
    if width < 1 or height < 1:
        raise DataError(f"dimensions must be positive, got {width}x{height}")
    long_side = max(width, height)
    short_side = min(width, height)
    scale = min(1.0, rule.max_long_side / long_side, rule.max_short_side / short_side)
    if scale >= 1.0:
        return width, height
    return (
        max(1, _round_half_up(width * scale)),
        max(1, _round_half_up(height * scale)),
    )


def resize_image(image: Image.Image, rule: ResizeRule = ResizeRule()) -> Image.Image:
    target = compute_target_dimensions(image.width, image.height, rule)
    if target == (image.width, image.height):
        return image
    return image.resize(target, Image.LANCZOS)


def prepare_jpeg_bytes(
    path: str | Path, rule: ResizeRule = ResizeRule(), quality: int = JPEG_QUALITY
) -> bytes:
    """Resized baseline JPEG bytes of an image file, ready for a provider."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"image file not found: {path}")
    with Image.open(path) as image:
        resized = resize_image(image, rule)
        if resized.mode not in ("RGB", "L"):
            resized = resized.convert("RGB")
        buffer = BytesIO()
        resized.save(buffer, format="JPEG", quality=quality)
    return buffer.getvalue()


def read_image_size(path: str | Path) -> tuple[int, int]:
    path = Path(path)
    try:
        with Image.open(path) as image:
            return image.width, image.height
    except (OSError, Image.UnidentifiedImageError) as exc:
        raise DataError(f"cannot read image {path}: {exc}") from exc
