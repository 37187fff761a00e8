"""Caption and embedding providers: protocols, deterministic mocks, HTTP adapters.

All tests run against the mocks.  The HTTP adapters are thin translations
of the provider protocol onto vendor-style JSON endpoints and are the only
code here that talks to a network.
"""

from __future__ import annotations

import base64
import hashlib
import os
from dataclasses import dataclass, field
from typing import Callable, Mapping, Protocol, runtime_checkable

import numpy as np

from captionlens.errors import DataError, ProviderError, TransientProviderError
from captionlens.textlab.tokens import tokenize

__all__ = [
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
]

DEFAULT_PROMPT = (
    "Provide a detailed plain-text description of the objects, activities, "
    "people, background and/or composition of this photograph"
)

OK = "ok"
REJECTED = "rejected"
TRANSIENT = "transient_error"


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 5
    base_backoff_seconds: float = 1.0
    multiplier: float = 2.0

    def __post_init__(self):
        if self.max_attempts < 1:
            raise DataError("max_attempts must be >= 1")
        if self.base_backoff_seconds < 0 or self.multiplier < 1:
            raise DataError("invalid backoff parameters")

    def backoff(self, attempt: int) -> float:
        """Delay before retrying after the given 0-based failed attempt."""
        return self.base_backoff_seconds * self.multiplier**attempt


@dataclass(frozen=True)
class CaptionProviderConfig:
    endpoint: str = ""
    model_id: str = "mock-captioner"
    prompt: str = DEFAULT_PROMPT
    max_tokens: int = 500
    max_concurrency: int = 4
    retry: RetryPolicy = field(default_factory=RetryPolicy)

    def __post_init__(self):
        if self.max_tokens < 1:
            raise DataError("max_tokens must be >= 1")
        if self.max_concurrency < 1:
            raise DataError("max_concurrency must be >= 1")
        if not self.prompt.strip():
            raise DataError("prompt must not be empty")

    @property
    def prompt_id(self) -> str:
        """Stable short identifier of the prompt text, recorded per caption."""
        return "p-" + hashlib.blake2b(self.prompt.encode("utf-8"), digest_size=4).hexdigest()


@dataclass(frozen=True)
class ProviderResult:
    kind: str
    text: str = ""
    token_usage: int = 0
    reason: str = ""
    detail: str = ""

    @classmethod
    def ok(cls, text: str, token_usage: int) -> "ProviderResult":
        return cls(kind=OK, text=text, token_usage=token_usage)

    @classmethod
    def rejected(cls, reason: str) -> "ProviderResult":
        return cls(kind=REJECTED, reason=reason)

    @classmethod
    def transient_error(cls, detail: str) -> "ProviderResult":
        return cls(kind=TRANSIENT, detail=detail)


@runtime_checkable
class CaptionProvider(Protocol):
    def caption(self, image_bytes: bytes, image_id: str) -> ProviderResult: ...


@runtime_checkable
class EmbeddingProvider(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


_PROBES_PER_TOKEN = 4


def deterministic_mock_embedding(text: str, dimension: int, seed: int = 0) -> np.ndarray:
    """Pure hash-based text embedding with unit Euclidean norm.

    Each token scatters fixed +/-1 contributions into hashed dimensions, so
    texts sharing tokens share mass and tend to score higher cosines.  A
    salt retries the (astronomically unlikely) all-cancelled case rather
    than ever returning a zero vector.
    """
    if dimension < 1:
        raise DataError(f"dimension must be >= 1, got {dimension}")
    tokens = [t.lower() for t in tokenize(text)]
    if not tokens:
        raise DataError("cannot embed empty text")
    for salt in range(64):
        vec = np.zeros(dimension)
        for token in tokens:
            for probe in range(_PROBES_PER_TOKEN):
                key = f"{seed}|{salt}|{token}|{probe}".encode("utf-8")
                value = int.from_bytes(
                    hashlib.blake2b(key, digest_size=8).digest(), "little"
                )
                index = (value >> 1) % dimension
                vec[index] += 1.0 if value & 1 else -1.0
        norm = np.linalg.norm(vec)
        if norm > 0:
            return (vec / norm).astype(np.float32)
    raise DataError("could not derive a nonzero embedding")  # pragma: no cover


class MockCaptionProvider:
    """Scripted caption provider for tests and offline pipelines.

    Caption text per image comes from `captions` (or `default_text` applied
    to the id).  Ids in `rejections` are refused with the given reason; ids
    in `transient_failures` fail that many times before succeeding.  Every
    invocation is counted.
    """

    def __init__(
        self,
        captions: Mapping[str, str] | None = None,
        default_text: Callable[[str], str] | None = None,
        rejections: Mapping[str, str] | None = None,
        transient_failures: Mapping[str, int] | None = None,
        token_counts: Mapping[str, int] | None = None,
        model_id: str = "mock-captioner",
    ):
        self._captions = dict(captions or {})
        self._default_text = default_text
        self._rejections = dict(rejections or {})
        self._remaining_failures = dict(transient_failures or {})
        self._token_counts = dict(token_counts or {})
        self.model_id = model_id
        self.call_count = 0
        self.calls: list[str] = []

    def caption(self, image_bytes: bytes, image_id: str) -> ProviderResult:
        self.call_count += 1
        self.calls.append(image_id)
        if self._remaining_failures.get(image_id, 0) > 0:
            self._remaining_failures[image_id] -= 1
            return ProviderResult.transient_error(f"scripted failure for {image_id}")
        if image_id in self._rejections:
            return ProviderResult.rejected(self._rejections[image_id])
        text = self._captions.get(image_id)
        if text is None:
            if self._default_text is None:
                return ProviderResult.transient_error(f"no scripted caption for {image_id}")
            text = self._default_text(image_id)
        tokens = self._token_counts.get(image_id, len(text.split()))
        return ProviderResult.ok(text, tokens)


class MockEmbeddingProvider:
    """Deterministic embedding provider for tests and offline pipelines."""

    def __init__(
        self,
        dimension: int,
        seed: int = 0,
        transient_failures: Mapping[str, int] | None = None,
        wrong_dimension_texts: Mapping[str, int] | None = None,
    ):
        if dimension < 1:
            raise DataError(f"dimension must be >= 1, got {dimension}")
        self.dimension = dimension
        self.seed = seed
        self._remaining_failures = dict(transient_failures or {})
        self._wrong_dimension = dict(wrong_dimension_texts or {})
        self.call_count = 0

    def embed(self, text: str) -> np.ndarray:
        self.call_count += 1
        if self._remaining_failures.get(text, 0) > 0:
            self._remaining_failures[text] -= 1
            raise TransientProviderError(f"scripted embedding failure for {text[:40]!r}")
        dimension = self._wrong_dimension.get(text, self.dimension)
        return deterministic_mock_embedding(text, dimension, self.seed)


def _load_api_key(env_var: str) -> str:
    key = os.environ.get(env_var, "")
    if not key:
        raise ProviderError(f"environment variable {env_var} is not set")
    return key


class HttpCaptionProvider:
    """JSON-over-HTTP adapter for a vision captioning endpoint.

    Request: {model, prompt, image_b64, max_tokens}.  A 2xx response must
    carry {text, token_usage}; a 400 mentioning safety maps to a rejection;
    throttles, timeouts, and 5xx map to transient errors.
    """

    def __init__(self, config: CaptionProviderConfig, api_key_env: str = "CAPTION_API_KEY"):
        if not config.endpoint:
            raise ProviderError("caption endpoint is not configured")
        self._config = config
        self._api_key_env = api_key_env

    def caption(self, image_bytes: bytes, image_id: str) -> ProviderResult:
        import httpx

        payload = {
            "model": self._config.model_id,
            "prompt": self._config.prompt,
            "image_b64": base64.b64encode(image_bytes).decode("ascii"),
            "max_tokens": self._config.max_tokens,
        }
        headers = {"Authorization": f"Bearer {_load_api_key(self._api_key_env)}"}
        try:
            response = httpx.post(
                self._config.endpoint, json=payload, headers=headers, timeout=120.0
            )
        except httpx.HTTPError as exc:
            return ProviderResult.transient_error(f"network failure: {exc}")
        if response.status_code in (408, 429) or response.status_code >= 500:
            return ProviderResult.transient_error(f"HTTP {response.status_code}")
        if response.status_code == 400 and any(
            marker in response.text.lower() for marker in ("safety", "content policy")
        ):
            return ProviderResult.rejected(response.text.strip())
        if response.status_code != 200:
            raise ProviderError(f"caption endpoint returned HTTP {response.status_code}")
        body = response.json()
        try:
            return ProviderResult.ok(str(body["text"]), int(body["token_usage"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed caption response: {exc}") from exc


class HttpEmbeddingProvider:
    """JSON-over-HTTP adapter for a text embedding endpoint."""

    def __init__(
        self,
        endpoint: str,
        model_id: str,
        dimension: int,
        api_key_env: str = "EMBEDDING_API_KEY",
    ):
        if not endpoint:
            raise ProviderError("embedding endpoint is not configured")
        if dimension < 1:
            raise ProviderError("embedding dimension must be >= 1")
        self._endpoint = endpoint
        self._model_id = model_id
        self.dimension = dimension
        self._api_key_env = api_key_env

    def embed(self, text: str) -> np.ndarray:
        import httpx

        headers = {"Authorization": f"Bearer {_load_api_key(self._api_key_env)}"}
        try:
            response = httpx.post(
                self._endpoint,
                json={"model": self._model_id, "input": text},
                headers=headers,
                timeout=60.0,
            )
        except httpx.HTTPError as exc:
            raise TransientProviderError(f"network failure: {exc}") from exc
        if response.status_code in (408, 429) or response.status_code >= 500:
            raise TransientProviderError(f"HTTP {response.status_code}")
        if response.status_code != 200:
            raise ProviderError(f"embedding endpoint returned HTTP {response.status_code}")
        try:
            vector = np.asarray(response.json()["embedding"], dtype=np.float32)
        except (KeyError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed embedding response: {exc}") from exc
        return vector
