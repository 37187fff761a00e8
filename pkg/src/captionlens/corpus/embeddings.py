"""Named dense vector spaces over image ids, with a binary file format.

File layout (little-endian): magic "EMBD", version u16 = 1, dimension u32,
count u64; then per record: id_length u16, id bytes (UTF-8), dimension
IEEE-754 float32 components.  Round-trips are bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from captionlens.errors import DataError, VectorFileError

__all__ = ["EmbeddingSpace", "write_embedding_file", "read_embedding_file"]

MAGIC = b"EMBD"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHIQ")
_ID_LEN = struct.Struct("<H")


class EmbeddingSpace:
    """A fixed-dimension float32 vector per image id.

    Vectors live in one (n, dimension) matrix; insertion order is preserved
    and each id appears at most once.  Zero-norm and non-finite vectors are
    rejected on insertion because cosine similarity is undefined for them.
    """

    def __init__(self, name: str, dimension: int):
        if dimension < 1:
            raise DataError(f"dimension must be >= 1, got {dimension}")
        self.name = name
        self.dimension = int(dimension)
        self._ids: list[str] = []
        self._index: dict[str, int] = {}
        self._rows: list[np.ndarray] = []
        self._matrix: np.ndarray | None = None
        self._unit_rows: np.ndarray | None = None

    @classmethod
    def from_vectors(
        cls, name: str, dimension: int, vectors: Iterable[tuple[str, np.ndarray]]
    ) -> "EmbeddingSpace":
        space = cls(name, dimension)
        for image_id, values in vectors:
            space.add(image_id, values)
        return space

    def add(self, image_id: str, values) -> None:
        if not image_id:
            raise DataError("embedding vector has an empty image id")
        if image_id in self._index:
            raise DataError(f"duplicate vector for image {image_id!r} in space {self.name!r}")
        row = np.asarray(values, dtype=np.float32)
        if row.ndim != 1 or row.shape[0] != self.dimension:
            raise DataError(
                f"vector for image {image_id!r} has {row.size} components, "
                f"space {self.name!r} expects {self.dimension}"
            )
        if not np.isfinite(row).all():
            raise DataError(f"vector for image {image_id!r} has non-finite components")
        if not np.any(row):
            raise DataError(f"vector for image {image_id!r} has zero norm")
        self._index[image_id] = len(self._ids)
        self._ids.append(image_id)
        self._rows.append(row)
        self._matrix = None
        self._unit_rows = None

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, image_id: str) -> bool:
        return image_id in self._index

    def __iter__(self) -> Iterator[tuple[str, np.ndarray]]:
        for image_id in self._ids:
            yield image_id, self.vector(image_id)

    @property
    def ids(self) -> list[str]:
        return list(self._ids)

    def id_at(self, row: int) -> str:
        return self._ids[row]

    def row_of(self, image_id: str) -> int:
        try:
            return self._index[image_id]
        except KeyError:
            raise DataError(f"image {image_id!r} has no vector in space {self.name!r}") from None

    def vector(self, image_id: str) -> np.ndarray:
        return self.matrix[self.row_of(image_id)]

    @property
    def matrix(self) -> np.ndarray:
        """(n, dimension) float32 matrix in insertion order."""
        if self._matrix is None:
            if self._rows:
                self._matrix = np.vstack(self._rows)
            else:
                self._matrix = np.empty((0, self.dimension), dtype=np.float32)
            self._rows = list(self._matrix)
        return self._matrix

    def unit_rows(self) -> np.ndarray:
        """Float64 copy of the matrix with every row scaled to unit norm.

        Cached: spaces are immutable once a snapshot holds them, and this is
        the representation every cosine query works from.
        """
        if self._unit_rows is None:
            m = self.matrix.astype(np.float64)
            norms = np.linalg.norm(m, axis=1, keepdims=True)
            self._unit_rows = m / norms
        return self._unit_rows


def write_embedding_file(space: EmbeddingSpace, path: str | Path) -> int:
    """Serialize a space; returns the byte count written."""
    if len(space) == 0:
        raise DataError(f"refusing to write empty embedding space {space.name!r}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    written = 0
    with path.open("wb") as fh:
        written += fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, space.dimension, len(space)))
        for image_id, values in space:
            id_bytes = image_id.encode("utf-8")
            if len(id_bytes) > 0xFFFF:
                raise DataError(f"image id too long to serialize: {image_id[:32]!r}...")
            written += fh.write(_ID_LEN.pack(len(id_bytes)))
            written += fh.write(id_bytes)
            written += fh.write(values.astype("<f4", copy=False).tobytes())
    return written


def read_embedding_file(path: str | Path, name: str | None = None) -> EmbeddingSpace:
    """Parse a binary embedding file; the space name defaults to the file stem."""
    path = Path(path)
    if not path.exists():
        raise VectorFileError(f"embedding file not found: {path}")
    with path.open("rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise VectorFileError(f"{path}: truncated header")
        magic, version, dimension, count = _HEADER.unpack(header)
        if magic != MAGIC:
            raise VectorFileError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise VectorFileError(
                f"{path}: unsupported format version {version}, expected {FORMAT_VERSION}"
            )
        if dimension == 0:
            raise VectorFileError(f"{path}: dimension field is 0")
        space = EmbeddingSpace(name or path.stem, dimension)
        vector_bytes = dimension * 4
        for i in range(count):
            len_raw = fh.read(_ID_LEN.size)
            if len(len_raw) < _ID_LEN.size:
                raise VectorFileError(f"{path}: truncated record {i + 1} of {count}")
            (id_len,) = _ID_LEN.unpack(len_raw)
            id_raw = fh.read(id_len)
            data = fh.read(vector_bytes)
            if len(id_raw) < id_len or len(data) < vector_bytes:
                raise VectorFileError(f"{path}: truncated record {i + 1} of {count}")
            try:
                image_id = id_raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise VectorFileError(f"{path}: record {i + 1} id is not UTF-8") from exc
            space.add(image_id, np.frombuffer(data, dtype="<f4"))
        if fh.read(1):
            raise VectorFileError(f"{path}: trailing bytes after {count} records")
    return space
