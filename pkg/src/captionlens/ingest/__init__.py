"""Image intake: resize rule, caption/embedding providers, batch pipeline."""

from captionlens.ingest.pipeline import (
    PipelineReport,
    caption_corpus,
    embed_corpus,
    import_vectors,
    scan_images,
)
from captionlens.ingest.providers import (
    DEFAULT_PROMPT,
    CaptionProvider,
    CaptionProviderConfig,
    EmbeddingProvider,
    HttpCaptionProvider,
    HttpEmbeddingProvider,
    MockCaptionProvider,
    MockEmbeddingProvider,
    ProviderResult,
    RetryPolicy,
    deterministic_mock_embedding,
)
from captionlens.ingest.resize import (
    ResizeRule,
    compute_target_dimensions,
    prepare_jpeg_bytes,
    read_image_size,
    resize_image,
)

__all__ = [
    "ResizeRule",
    "compute_target_dimensions",
    "resize_image",
    "prepare_jpeg_bytes",
    "read_image_size",
    "DEFAULT_PROMPT",
    "RetryPolicy",
    "CaptionProviderConfig",
    "ProviderResult",
    "CaptionProvider",
    "EmbeddingProvider",
    "MockCaptionProvider",
    "MockEmbeddingProvider",
    "HttpCaptionProvider",
    "HttpEmbeddingProvider",
    "deterministic_mock_embedding",
    "PipelineReport",
    "scan_images",
    "caption_corpus",
    "embed_corpus",
    "import_vectors",
]
