"""Shared state behind the HTTP API: one snapshot, swapped atomically."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

from captionlens.corpus.snapshot import CorpusSnapshot

__all__ = ["ServiceState", "SnapshotView", "swap_snapshot"]


@dataclass(frozen=True)
class SnapshotView:
    """One request's fixed view: the snapshot and the version it answers as."""

    snapshot: CorpusSnapshot
    version: int


class ServiceState:
    """Holds the live snapshot plus everything handlers need besides it.

    Readers grab an immutable (snapshot, version) pair once per request;
    swap() replaces the pair under a lock, so in-flight requests keep
    answering from the old snapshot. The served version never decreases,
    even when the same snapshot object is swapped in again.
    """

    def __init__(
        self,
        snapshot: CorpusSnapshot,
        image_root: str | Path,
        thumbnail_dir: str | Path,
        cors_origins: tuple[str, ...] = (),
    ):
        self.image_root = Path(image_root)
        self.thumbnail_dir = Path(thumbnail_dir)
        self.cors_origins = tuple(cors_origins)
        self._lock = threading.Lock()
        self._view = SnapshotView(snapshot, snapshot.version)

    def view(self) -> SnapshotView:
        return self._view

    def swap(self, snapshot: CorpusSnapshot) -> int:
        with self._lock:
            previous = self._view
            version = max(snapshot.version, previous.version + 1)
            self._view = SnapshotView(snapshot, version)
            return previous.version


def swap_snapshot(state: ServiceState, snapshot: CorpusSnapshot) -> int:
    """Publish a new snapshot; returns the version it replaced."""
    return state.swap(snapshot)
