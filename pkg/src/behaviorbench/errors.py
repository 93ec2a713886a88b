"""Exception types shared across the package."""

from __future__ import annotations


class BenchError(Exception):
    """Base class for all behaviorbench errors."""


class MalformedLabelError(BenchError):
    """A raw label string cannot be normalized into a verb-noun pair."""


class ManifestError(BenchError):
    """The dataset manifest cannot be parsed or violates the schema."""


class MonotonicityError(ManifestError):
    """Frame indices in a recording are not strictly increasing."""


class DuplicateRecordingError(ManifestError):
    """Two recordings in one manifest share a recording_id."""


class InsufficientPoolError(BenchError):
    """Not enough candidate sequences to draw the requested ICL examples."""


class MissingImageError(BenchError):
    """A representation needs image refs the sequence or example does not have."""


class IclBudgetError(BenchError):
    """A prompt would exceed the endpoint's per-request image budget."""


class TemplateError(BenchError):
    """A prompt template is missing required placeholders."""


class BudgetExceededError(BenchError):
    """Pre-flight check: the request carries more images than the endpoint allows."""


class AuthenticationError(BenchError):
    """Non-retryable auth failure (missing key or HTTP 401/403)."""


class RequestFailedError(BenchError):
    """Non-retryable HTTP failure or unparseable endpoint response."""


class RetriesExhaustedError(BenchError):
    """All retry attempts failed; `last_cause` carries the final failure."""

    def __init__(self, message: str, last_cause: object = None):
        super().__init__(message)
        self.last_cause = last_cause


class EmbeddingError(BenchError):
    """A remote embedding endpoint returned an unusable response."""


class ConfigError(BenchError):
    """A run configuration is invalid (fatal, aborts the run)."""


class ResultsError(BenchError):
    """A results file is empty, malformed, or violates record uniqueness."""
