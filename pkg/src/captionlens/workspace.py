"""On-disk layout of one corpus: manifest, vector files, derived artifacts.

Layout under the workspace root:

    manifest.jsonl           image records and captions
    meta.json                {"version": N}, bumped on every mutating write
    embeddings/<name>.embd   one binary file per embedding space
    artifacts/*.json         dendrogram, clusters, projection, reports
    cache/thumbnails/        service-generated thumbnails

All writes go through a temp file and an atomic rename, so a crashed run
never leaves a half-written manifest or artifact behind.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from captionlens.cluster.partition import ClusterAssignment
from captionlens.cluster.projection import PlanarEmbedding
from captionlens.cluster.ward import Dendrogram
from captionlens.corpus.embeddings import EmbeddingSpace, read_embedding_file, write_embedding_file
from captionlens.corpus.manifest import Manifest, load_manifest, save_manifest
from captionlens.corpus.snapshot import CorpusSnapshot
from captionlens.errors import ArtifactMissingError, DataError

__all__ = ["Workspace"]


def _write_json_atomic(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_json(path: Path):
    try:
        with path.open("r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from exc


class Workspace:
    def __init__(self, root: str | Path):
        self.root = Path(root)

    # -- paths -------------------------------------------------------------

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.jsonl"

    @property
    def meta_path(self) -> Path:
        return self.root / "meta.json"

    @property
    def embeddings_dir(self) -> Path:
        return self.root / "embeddings"

    @property
    def artifacts_dir(self) -> Path:
        return self.root / "artifacts"

    @property
    def thumbnail_dir(self) -> Path:
        return self.root / "cache" / "thumbnails"

    def space_path(self, name: str) -> Path:
        if not name or "/" in name or name.startswith("."):
            raise DataError(f"invalid space name {name!r}")
        return self.embeddings_dir / f"{name}.embd"

    def thumbnail_path(self, image_id: str, size: int) -> Path:
        digest = hashlib.sha1(image_id.encode("utf-8")).hexdigest()[:20]
        return self.thumbnail_dir / f"{digest}_{size}.jpg"

    # -- version -----------------------------------------------------------

    @property
    def version(self) -> int:
        if not self.meta_path.exists():
            return 0
        payload = _read_json(self.meta_path)
        try:
            return int(payload["version"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{self.meta_path} is malformed: {exc}") from exc

    def bump_version(self) -> int:
        version = self.version + 1
        _write_json_atomic(self.meta_path, {"version": version})
        return version

    # -- manifest ----------------------------------------------------------

    def has_manifest(self) -> bool:
        return self.manifest_path.exists()

    def read_manifest(self) -> Manifest:
        if not self.has_manifest():
            raise ArtifactMissingError(
                f"no manifest at {self.manifest_path}; run the ingest step first"
            )
        return load_manifest(self.manifest_path)

    def write_manifest(self, manifest: Manifest, bump: bool = True) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        save_manifest(manifest, self.manifest_path)
        if bump:
            self.bump_version()

    # -- embedding spaces ----------------------------------------------------

    def space_names(self) -> list[str]:
        if not self.embeddings_dir.is_dir():
            return []
        return sorted(p.stem for p in self.embeddings_dir.glob("*.embd"))

    def read_space(self, name: str) -> EmbeddingSpace:
        path = self.space_path(name)
        if not path.exists():
            raise ArtifactMissingError(f"no embedding space {name!r} at {path}")
        return read_embedding_file(path, name=name)

    def write_space(self, space: EmbeddingSpace, bump: bool = True) -> None:
        write_embedding_file(space, self.space_path(space.name))
        if bump:
            self.bump_version()

    # -- artifacts -----------------------------------------------------------

    def _artifact(self, name: str) -> Path:
        return self.artifacts_dir / f"{name}.json"

    def read_dendrogram(self) -> Dendrogram:
        path = self._artifact("dendrogram")
        if not path.exists():
            raise ArtifactMissingError("no dendrogram artifact; run the cluster step first")
        return Dendrogram.from_dict(_read_json(path))

    def write_dendrogram(self, dendrogram: Dendrogram) -> None:
        _write_json_atomic(self._artifact("dendrogram"), dendrogram.to_dict())
        self.bump_version()

    def read_clusters(self) -> ClusterAssignment:
        path = self._artifact("clusters")
        if not path.exists():
            raise ArtifactMissingError("no cluster artifact; run the cluster step first")
        return ClusterAssignment.from_dict(_read_json(path))

    def write_clusters(self, assignment: ClusterAssignment) -> None:
        _write_json_atomic(self._artifact("clusters"), assignment.to_dict())
        self.bump_version()

    def read_projection(self) -> PlanarEmbedding:
        path = self._artifact("projection")
        if not path.exists():
            raise ArtifactMissingError("no projection artifact; run the cluster step first")
        return PlanarEmbedding.from_dict(_read_json(path))

    def write_projection(self, embedding: PlanarEmbedding) -> None:
        _write_json_atomic(self._artifact("projection"), embedding.to_dict())
        self.bump_version()

    def read_reports(self) -> dict:
        path = self._artifact("reports")
        if not path.exists():
            return {}
        payload = _read_json(path)
        if not isinstance(payload, dict):
            raise DataError(f"{path} must hold a JSON object")
        return payload

    def write_reports(self, reports: dict) -> None:
        _write_json_atomic(self._artifact("reports"), reports)
        self.bump_version()

    # -- snapshot ------------------------------------------------------------

    def load_snapshot(self) -> CorpusSnapshot:
        """Assemble the current on-disk state into one immutable snapshot."""
        manifest = self.read_manifest()
        spaces = {name: self.read_space(name) for name in self.space_names()}
        clusters = None
        if self._artifact("clusters").exists():
            clusters = self.read_clusters()
        projection = None
        if self._artifact("projection").exists():
            projection = self.read_projection()
        return CorpusSnapshot(
            manifest,
            spaces=spaces,
            version=self.version,
            clusters=clusters,
            projection=projection,
            reports=self.read_reports() or None,
        )
