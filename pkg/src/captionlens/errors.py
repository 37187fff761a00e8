"""Exception hierarchy shared across the package.

Two broad families matter to callers: problems with the data or artifacts on
disk (``DataError``) and problems talking to a caption/embedding provider
(``ProviderError``).  The CLI maps them to distinct exit codes.
"""


class DataError(Exception):
    """A manifest, vector file, lexicon, or snapshot is missing or invalid."""


class ManifestError(DataError):
    """Manifest file violates the line-delimited record format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class VectorFileError(DataError):
    """Binary vector file is corrupt, truncated, or of the wrong version."""


class LexiconError(DataError):
    """A plain-text lexicon resource violates its format rules."""


class ArtifactMissingError(DataError):
    """A pipeline artifact (embeddings, clusters, index) has not been built."""


class ProviderError(Exception):
    """A caption or embedding provider failed after exhausting retries."""


class TransientProviderError(ProviderError):
    """A retryable provider failure (timeout, throttle, 5xx)."""
