"""Corpus model: image records, captions, embedding spaces, search index."""

from captionlens.corpus.embeddings import (
    EmbeddingSpace,
    read_embedding_file,
    write_embedding_file,
)
from captionlens.corpus.fulltext import FulltextIndex, SearchHit, build_fulltext_index
from captionlens.corpus.manifest import (
    Manifest,
    load_manifest,
    record_to_json,
    save_manifest,
)
from captionlens.corpus.records import (
    DEFAULT_TOKEN_CAP,
    STATUS_CAPTIONED,
    STATUS_EMBEDDED,
    STATUS_PENDING,
    STATUS_REJECTED,
    STATUSES,
    Caption,
    ImageRecord,
    word_count_of,
)
from captionlens.corpus.snapshot import CAPTION_SPACE, VISUAL_SPACE, CorpusSnapshot

__all__ = [
    "Caption",
    "ImageRecord",
    "Manifest",
    "EmbeddingSpace",
    "FulltextIndex",
    "SearchHit",
    "CorpusSnapshot",
    "CAPTION_SPACE",
    "VISUAL_SPACE",
    "DEFAULT_TOKEN_CAP",
    "STATUS_PENDING",
    "STATUS_CAPTIONED",
    "STATUS_REJECTED",
    "STATUS_EMBEDDED",
    "STATUSES",
    "word_count_of",
    "load_manifest",
    "save_manifest",
    "record_to_json",
    "build_fulltext_index",
    "read_embedding_file",
    "write_embedding_file",
]
