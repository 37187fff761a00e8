"""Shared fixture builders: synthetic corpora, snapshots, CLI workspaces.

All caption text here is invented; vocabulary groups are planted so that
clustering and keyness tests have known right answers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from captionlens.corpus.embeddings import EmbeddingSpace
from captionlens.corpus.manifest import Manifest
from captionlens.corpus.records import STATUS_EMBEDDED, Caption, ImageRecord
from captionlens.corpus.snapshot import CorpusSnapshot
from captionlens.ingest.providers import deterministic_mock_embedding

# Four planted vocabularies. Several templates per group so captions vary
# while the distinguishing nouns stay fixed. Terse catalog style on purpose:
# the mock embedding hashes exact tokens, so repeated articles would give
# unrelated groups more shared weight than the planted nouns.
VOCAB_TEMPLATES = {
    "dairy": (
        "Dairy worker stacks milk crates beside bottling conveyors, bottle racks shining. Frame {i}.",
        "Milk churns roll across dairy floors toward bottle washers and bottling vats. Frame {i}.",
        "Bottling crew caps each milk bottle while dairy trucks idle outside. Frame {i}.",
    ),
    "railway": (
        "Steam locomotive crosses iron bridge, engine smoke trailing over coal wagons. Frame {i}.",
        "Locomotive crew shovels coal as engine smoke drifts beneath bridge spans. Frame {i}.",
        "Coal dust settles on bridge girders while locomotive vents engine smoke. Frame {i}.",
    ),
    "cycling": (
        "Child pedals bicycle past bakery windows, bread loaves riding in basket. Frame {i}.",
        "Bicycle leans at bakery doors while child fills basket with bread. Frame {i}.",
        "Child walks bicycle home from bakery, basket heavy with bread. Frame {i}.",
    ),
    "skiing": (
        "Skier rides resort lift toward mountain slope through falling snow. Frame {i}.",
        "Snow settles over resort roofs while skier waxes skis below mountain slope. Frame {i}.",
        "Skier carves down mountain slope as resort lift hums above fresh snow. Frame {i}.",
    ),
}
VOCAB_NAMES = tuple(VOCAB_TEMPLATES)
PLANTED_TERMS = {
    "dairy": {"dairy", "milk", "bottle", "bottling"},
    "railway": {"locomotive", "bridge", "engine", "smoke"},
    "cycling": {"bicycle", "basket", "child", "bakery"},
    "skiing": {"skier", "resort", "slope", "mountain"},
}


def planted_caption(index: int, group: str | None = None) -> str:
    """Deterministic caption for image #index from its vocabulary group."""
    name = group or VOCAB_NAMES[index % len(VOCAB_NAMES)]
    templates = VOCAB_TEMPLATES[name]
    return templates[index % len(templates)].format(i=index)


def make_snapshot(
    texts: dict[str, str],
    dim: int = 32,
    seed: int = 0,
    extra_spaces: dict[str, EmbeddingSpace] | None = None,
    version: int = 0,
) -> CorpusSnapshot:
    """In-memory snapshot: every id captioned + embedded with the mock embedding."""
    records = []
    captions = {}
    space = EmbeddingSpace("caption", dim)
    for image_id, text in texts.items():
        records.append(
            ImageRecord(
                id=image_id,
                source_path=f"{image_id}.jpg",
                title=image_id,
                width_px=64,
                height_px=48,
                status=STATUS_EMBEDDED,
            )
        )
        captions[image_id] = Caption.from_text(
            image_id=image_id,
            text=text,
            token_count=len(text.split()),
            model_id="fixture-model",
            prompt_id="fixture-prompt",
        )
        space.add(image_id, deterministic_mock_embedding(text, dim, seed))
    spaces = {"caption": space}
    if extra_spaces:
        spaces.update(extra_spaces)
    return CorpusSnapshot(Manifest(records, captions), spaces=spaces, version=version)


def snapshot_from_vectors(
    vectors: dict[str, np.ndarray],
    space_name: str = "caption",
    extra_spaces: dict[str, dict[str, np.ndarray]] | None = None,
) -> CorpusSnapshot:
    """Snapshot whose records exist only to host explicit vectors."""
    records = [
        ImageRecord(
            id=i,
            source_path=f"{i}.jpg",
            title=i,
            width_px=64,
            height_px=48,
            status="pending",
        )
        for i in vectors
    ]
    spaces = {
        space_name: EmbeddingSpace.from_vectors(
            space_name,
            len(next(iter(vectors.values()))),
            vectors.items(),
        )
    }
    for name, vecs in (extra_spaces or {}).items():
        spaces[name] = EmbeddingSpace.from_vectors(
            name, len(next(iter(vecs.values()))), vecs.items()
        )
    return CorpusSnapshot(Manifest(records, {}), spaces=spaces)


@dataclass
class CliCorpus:
    root: Path
    config_path: Path
    image_root: Path
    workspace_root: Path
    captions: dict[str, str]

    def run(self, *argv: str) -> int:
        from captionlens.cli import main

        return main(["--config", str(self.config_path), *argv])


def build_cli_corpus(
    root: Path,
    count: int = 12,
    dim: int = 48,
    config_extra: str = "",
    image_size=(64, 48),
) -> CliCorpus:
    """Image tree + scripted mock captions + config file, ready for cli.main."""
    image_root = root / "images"
    image_root.mkdir(parents=True, exist_ok=True)
    captions = {}
    for i in range(count):
        name = f"img{i:03d}"
        w, h = image_size
        Image.new("RGB", (w + i % 7, h + i % 5), ((i * 37) % 255, 80, 120)).save(
            image_root / f"{name}.jpg"
        )
        captions[name] = planted_caption(i)
    captions_path = root / "captions.json"
    captions_path.write_text(json.dumps(captions), encoding="utf-8")
    config_path = root / "app.conf"
    config_path.write_text(
        f"workspace_root = {root / 'ws'}\n"
        f"image_root = {image_root}\n"
        "provider = mock\n"
        f"mock_captions_file = {captions_path}\n"
        f"embedding_dimension = {dim}\n"
        "retry_base_seconds = 0\n" + config_extra,
        encoding="utf-8",
    )
    return CliCorpus(
        root=root,
        config_path=config_path,
        image_root=image_root,
        workspace_root=root / "ws",
        captions=captions,
    )


@pytest.fixture
def cli_corpus(tmp_path) -> CliCorpus:
    return build_cli_corpus(tmp_path)
