"""Flat key=value configuration for the pipeline and service.

The file format is deliberately small: one `key = value` pair per line,
`#` comments, blank lines ignored.  Values may be wrapped in single or
double quotes.  Unknown keys are an error so a typo never silently falls
back to a default.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from captionlens.errors import DataError
from captionlens.ingest.providers import DEFAULT_PROMPT

__all__ = ["AppConfig", "load_config", "parse_config_text", "CONFIG_ENV_VAR"]

CONFIG_ENV_VAR = "CAPTIONLENS_CONFIG"


@dataclass
class AppConfig:
    workspace_root: str = "workspace"
    image_root: str = "images"

    # provider selection: "mock" is hermetic, "http" talks to real endpoints
    provider: str = "mock"
    mock_captions_file: str = ""
    mock_seed: int = 0

    caption_endpoint: str = ""
    caption_model: str = "mock-captioner"
    caption_prompt: str = DEFAULT_PROMPT
    caption_max_tokens: int = 500
    caption_api_key_env: str = "CAPTION_API_KEY"

    embedding_endpoint: str = ""
    embedding_model: str = "mock-embedder"
    embedding_dimension: int = 256
    embedding_api_key_env: str = "EMBEDDING_API_KEY"

    max_concurrency: int = 4
    retry_max_attempts: int = 5
    retry_base_seconds: float = 1.0

    resize_max_long: int = 1024
    resize_max_short: int = 768

    default_n: int = 5
    default_k: int = 32

    serve_host: str = "127.0.0.1"
    serve_port: int = 8765
    cors_origins: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.provider not in ("mock", "http"):
            raise DataError(f"provider must be 'mock' or 'http', got {self.provider!r}")
        for name in (
            "caption_max_tokens",
            "embedding_dimension",
            "max_concurrency",
            "retry_max_attempts",
            "resize_max_long",
            "resize_max_short",
            "default_n",
            "default_k",
            "serve_port",
        ):
            value = getattr(self, name)
            if value < 1:
                raise DataError(f"{name} must be a positive integer, got {value}")
        if self.retry_base_seconds < 0:
            raise DataError("retry_base_seconds must be non-negative")
        if self.provider == "http":
            if not self.caption_endpoint:
                raise DataError("provider http requires caption_endpoint")
            if not self.embedding_endpoint:
                raise DataError("provider http requires embedding_endpoint")


_INT_KEYS = {
    "mock_seed",
    "caption_max_tokens",
    "embedding_dimension",
    "max_concurrency",
    "retry_max_attempts",
    "resize_max_long",
    "resize_max_short",
    "default_n",
    "default_k",
    "serve_port",
}
_FLOAT_KEYS = {"retry_base_seconds"}
_LIST_KEYS = {"cors_origins"}
_KNOWN_KEYS = {f.name for f in fields(AppConfig)}


def _unquote(value: str) -> str:
    if len(value) >= 2 and value[0] == value[-1] and value[0] in ("'", '"'):
        return value[1:-1]
    return value


def parse_config_text(text: str, source: str = "<config>") -> AppConfig:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{source} line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = _unquote(value.strip())
        if key not in _KNOWN_KEYS:
            raise DataError(f"{source} line {lineno}: unknown key {key!r}")
        if key in values:
            raise DataError(f"{source} line {lineno}: duplicate key {key!r}")
        if key in _INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError:
                raise DataError(
                    f"{source} line {lineno}: {key} needs an integer, got {value!r}"
                ) from None
        elif key in _FLOAT_KEYS:
            try:
                values[key] = float(value)
            except ValueError:
                raise DataError(
                    f"{source} line {lineno}: {key} needs a number, got {value!r}"
                ) from None
        elif key in _LIST_KEYS:
            values[key] = tuple(part.strip() for part in value.split(",") if part.strip())
        else:
            values[key] = value
    return AppConfig(**values)


def load_config(path: str | Path | None = None) -> AppConfig:
    """Load configuration from a file, the environment, or defaults.

    Resolution order: explicit path, then $CAPTIONLENS_CONFIG, then
    built-in defaults.  A named file that does not exist is an error; the
    no-file case is not.
    """
    if path is None:
        env = os.environ.get(CONFIG_ENV_VAR, "")
        if env:
            path = env
    if path is None:
        return AppConfig()
    path = Path(path)
    if not path.exists():
        raise DataError(f"config file not found: {path}")
    return parse_config_text(path.read_text(encoding="utf-8"), source=str(path))
