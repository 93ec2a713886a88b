"""Chat-completions client with retries, rate limiting, inline image encoding,
and deterministic mock providers for offline runs."""

from __future__ import annotations

import base64
import logging
import os
import random
import threading
import time
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import httpx
import numpy as np

from .dataset import EvalSequence
from .errors import (
    AuthenticationError,
    BudgetExceededError,
    EmbeddingError,
    RequestFailedError,
    RetriesExhaustedError,
)
from .labels import render_behavior
from .prompts import PromptSpec

logger = logging.getLogger(__name__)

_BACKOFF_BASE_S = 1.0
_BACKOFF_CAP_S = 60.0


def _retryable_status(code: int) -> bool:
    return code == 429 or 500 <= code <= 599

MOCK_URL_PREFIX = "mock:"
MOCK_CAPTION_TEXT = (
    "A person is in an indoor room near everyday furniture; they could sit down, "
    "stand up, or reach for nearby objects."
)
MOCK_FAILURE_TEXT = "The future is unclear to me; nothing in particular stands out."


@dataclass(frozen=True)
class ModelEndpoint:
    """One remote (or mock) chat-completions endpoint and its request policy."""

    name: str
    base_url: str
    model_id: str
    api_key_ref: str = ""  # environment variable holding the key; never the key itself
    max_images_per_request: int = 50
    max_retries: int = 4
    requests_per_minute: float = 60.0
    timeout_s: float = 120.0
    temperature: float = 0.0
    max_tokens: int | None = None
    supports_interleaving: bool = True
    mock_text: str = ""  # fixed-mode mock response

    def __post_init__(self):
        if self.max_images_per_request < 1:
            raise ValueError("max_images_per_request must be >= 1")
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be positive")

    @property
    def is_mock(self) -> bool:
        return self.base_url.startswith(MOCK_URL_PREFIX)


@dataclass(frozen=True)
class CompletionResult:
    raw_text: str
    latency_ms: float
    prompt_tokens: int | None = None
    completion_tokens: int | None = None
    finish_reason: str = ""


class RateLimiter:
    """Sliding-window limiter: at most `rate_per_minute` dispatches per 60 s."""

    def __init__(
        self,
        rate_per_minute: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self._rate = rate_per_minute
        self._clock = clock
        self._sleep = sleep
        self._sent: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        if self._rate <= 0:  # unlimited
            return
        while True:
            with self._lock:
                now = self._clock()
                while self._sent and now - self._sent[0] >= 60.0:
                    self._sent.popleft()
                if len(self._sent) < self._rate:
                    self._sent.append(now)
                    return
                wait = 60.0 - (now - self._sent[0])
            self._sleep(max(wait, 0.0))


def encode_image_data_url(ref: str, media_type: str = "") -> str:
    """Inline a local image file as a base64 data URL (bit-stable per file).

    http(s) and data: refs pass through untouched.
    """
    if ref.startswith(("http://", "https://", "data:")):
        return ref
    data = Path(ref).read_bytes()
    media = media_type or "image/jpeg"
    return f"data:{media};base64,{base64.b64encode(data).decode('ascii')}"


def build_chat_payload(
    endpoint: ModelEndpoint,
    prompt: PromptSpec,
    image_url: Callable[[str, str], str] = encode_image_data_url,
) -> dict[str, Any]:
    """The chat-completions JSON body for one prompt (mixed text/image parts)."""
    content: list[dict[str, Any]] = []
    for part in prompt.parts:
        if part.kind == "text":
            content.append({"type": "text", "text": part.text})
        else:
            content.append(
                {"type": "image_url", "image_url": {"url": image_url(part.image_ref, part.media_type)}}
            )
    payload: dict[str, Any] = {
        "model": endpoint.model_id,
        "messages": [
            {"role": "system", "content": prompt.system_text},
            {"role": "user", "content": content},
        ],
        "temperature": endpoint.temperature,
    }
    if endpoint.max_tokens is not None:
        payload["max_tokens"] = endpoint.max_tokens
    return payload


def _extract_text(message_content: Any) -> str:
    if isinstance(message_content, str):
        return message_content
    if isinstance(message_content, list):  # some servers return content parts
        return "".join(
            fragment.get("text", "")
            for fragment in message_content
            if isinstance(fragment, dict) and fragment.get("type") == "text"
        )
    return ""


class MllmClient:
    """Thread-safe client for one endpoint; retries transient failures with
    exponential backoff and never ships an over-budget request."""

    deterministic = False

    def __init__(
        self,
        endpoint: ModelEndpoint,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
        rng: random.Random | None = None,
    ):
        self.endpoint = endpoint
        self._http = httpx.Client(transport=transport, timeout=endpoint.timeout_s)
        self._sleep = sleep
        self._clock = clock
        self._rng = rng or random.Random()
        self._limiter = RateLimiter(endpoint.requests_per_minute, clock, sleep)
        self._image_cache: dict[str, str] = {}
        self._cache_lock = threading.Lock()

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "MllmClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _cached_image_url(self, ref: str, media_type: str) -> str:
        with self._cache_lock:
            url = self._image_cache.get(ref)
        if url is None:
            url = encode_image_data_url(ref, media_type)
            with self._cache_lock:
                self._image_cache[ref] = url
        return url

    def _headers(self) -> dict[str, str]:
        headers = {}
        if self.endpoint.api_key_ref:
            key = os.environ.get(self.endpoint.api_key_ref, "")
            if not key:
                raise AuthenticationError(
                    f"environment variable {self.endpoint.api_key_ref} is not set"
                )
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _backoff_delay(self, retry_number: int) -> float:
        nominal = min(_BACKOFF_CAP_S, _BACKOFF_BASE_S * (2 ** (retry_number - 1)))
        return nominal * self._rng.uniform(0.5, 1.5)

    def _url(self, suffix: str) -> str:
        base = self.endpoint.base_url.rstrip("/")
        return base if base.endswith(suffix) else base + suffix

    def _post_with_retries(self, url: str, payload: dict[str, Any]) -> tuple[httpx.Response, float]:
        headers = self._headers()
        last_cause: object = None
        for attempt in range(1, self.endpoint.max_retries + 2):
            if attempt > 1:
                self._sleep(self._backoff_delay(attempt - 1))
            self._limiter.acquire()
            started = self._clock()
            try:
                response = self._http.post(url, json=payload, headers=headers)
            except httpx.HTTPError as exc:
                last_cause = exc
                logger.warning(
                    "%s attempt %d/%d failed: %s",
                    self.endpoint.name, attempt, self.endpoint.max_retries + 1, exc,
                )
                continue
            latency_ms = (self._clock() - started) * 1000.0
            if response.status_code == 200:
                logger.debug("%s attempt %d succeeded in %.0f ms",
                             self.endpoint.name, attempt, latency_ms)
                return response, latency_ms
            if response.status_code in (401, 403):
                raise AuthenticationError(
                    f"{self.endpoint.name}: HTTP {response.status_code} (auth)"
                )
            if _retryable_status(response.status_code):
                last_cause = response.status_code
                logger.warning(
                    "%s attempt %d/%d got HTTP %d",
                    self.endpoint.name, attempt, self.endpoint.max_retries + 1,
                    response.status_code,
                )
                continue
            raise RequestFailedError(
                f"{self.endpoint.name}: HTTP {response.status_code}: {response.text[:200]}"
            )
        raise RetriesExhaustedError(
            f"{self.endpoint.name}: no success after {self.endpoint.max_retries + 1} attempts "
            f"(last cause: {last_cause})",
            last_cause=last_cause,
        )

    def complete(self, prompt: PromptSpec, sequence: EvalSequence | None = None) -> CompletionResult:
        """Send one prompt; `sequence` is accepted for provider interchangeability."""
        del sequence
        if prompt.total_images > self.endpoint.max_images_per_request:
            raise BudgetExceededError(
                f"prompt carries {prompt.total_images} images, endpoint "
                f"{self.endpoint.name} allows {self.endpoint.max_images_per_request}"
            )
        payload = build_chat_payload(self.endpoint, prompt, self._cached_image_url)
        response, latency_ms = self._post_with_retries(self._url("/chat/completions"), payload)
        try:
            data = response.json()
            choice = data["choices"][0]
            text = _extract_text(choice.get("message", {}).get("content", ""))
            usage = data.get("usage") or {}
            return CompletionResult(
                raw_text=text,
                latency_ms=latency_ms,
                prompt_tokens=usage.get("prompt_tokens"),
                completion_tokens=usage.get("completion_tokens"),
                finish_reason=str(choice.get("finish_reason", "")),
            )
        except (KeyError, IndexError, ValueError) as exc:
            raise RequestFailedError(
                f"{self.endpoint.name}: unparseable completion response: {exc}"
            ) from exc


def complete(endpoint: ModelEndpoint, prompt: PromptSpec, **client_kwargs) -> CompletionResult:
    """One-shot convenience wrapper around MllmClient.complete."""
    with MllmClient(endpoint, **client_kwargs) as client:
        return client.complete(prompt)


class RemoteEmbedder:
    """Embeddings-endpoint client sharing the completion client's retry policy."""

    def __init__(self, endpoint: ModelEndpoint, **client_kwargs):
        self._client = MllmClient(endpoint, **client_kwargs)
        self._cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def close(self) -> None:
        self._client.close()

    def embed(self, text: str) -> np.ndarray:
        with self._lock:
            cached = self._cache.get(text)
        if cached is not None:
            return cached
        payload = {"model": self._client.endpoint.model_id, "input": [text]}
        response, _ = self._client._post_with_retries(
            self._client._url("/embeddings"), payload
        )
        try:
            vector = np.asarray(response.json()["data"][0]["embedding"], dtype=float)
        except (KeyError, IndexError, ValueError, TypeError) as exc:
            raise EmbeddingError(f"unparseable embeddings response: {exc}") from exc
        if vector.ndim != 1 or vector.size == 0 or not np.all(np.isfinite(vector)):
            raise EmbeddingError("embedding vector is empty or non-finite")
        with self._lock:
            self._cache[text] = vector
        return vector


MOCK_MODES = ("oracle", "echo_last", "fixed", "failure")


@dataclass(frozen=True)
class MockScript:
    """Deterministic offline response policy.

    oracle: answer with the queried sequence's ground truth.
    echo_last: answer with the t = 0 history labels (persistence baseline).
    fixed: answer with a configured string.
    failure: answer with non-bracketed text (exercises the parser's failed path).
    """

    mode: str
    fixed_text: str = ""

    def __post_init__(self):
        if self.mode not in MOCK_MODES:
            raise ValueError(f"unknown mock mode {self.mode!r}; expected one of {MOCK_MODES}")


def _timestepped(lines_behaviors: list[tuple[int, Any]]) -> str:
    return "\n".join(f"{step}s: {render_behavior(beh)}" for step, beh in lines_behaviors)


def mock_complete(
    script: MockScript,
    prompt: PromptSpec,
    sequence: EvalSequence | None = None,
) -> CompletionResult:
    """Deterministic completion for one prompt; latency is always 0."""
    if prompt.is_caption_request:
        return CompletionResult(MOCK_CAPTION_TEXT, 0.0, finish_reason="stop")
    if script.mode == "fixed":
        return CompletionResult(script.fixed_text, 0.0, finish_reason="stop")
    if script.mode == "failure":
        return CompletionResult(MOCK_FAILURE_TEXT, 0.0, finish_reason="stop")

    if sequence is None:
        raise ValueError(f"mock mode {script.mode!r} requires the queried sequence's ground truth")
    if script.mode == "oracle":
        if prompt.autoregressive:
            horizon = int(round(sequence.target_offset_s))
            by_step = {int(round(f.offset_s)): f.behavior for f in sequence.intermediates}
            lines = [(step, by_step.get(step, sequence.target)) for step in range(1, horizon)]
            lines.append((horizon, sequence.target))
            return CompletionResult(_timestepped(lines), 0.0, finish_reason="stop")
        return CompletionResult(render_behavior(sequence.target), 0.0, finish_reason="stop")

    latest = sequence.history[-1].behavior  # echo_last
    if prompt.autoregressive:
        horizon = int(round(sequence.target_offset_s))
        lines = [(step, latest) for step in range(1, horizon + 1)]
        return CompletionResult(_timestepped(lines), 0.0, finish_reason="stop")
    return CompletionResult(render_behavior(latest), 0.0, finish_reason="stop")


class MockProvider:
    """Provider-shaped wrapper over mock_complete (deterministic, offline)."""

    deterministic = True

    def __init__(self, script: MockScript):
        self.script = script

    def complete(self, prompt: PromptSpec, sequence: EvalSequence | None = None) -> CompletionResult:
        return mock_complete(self.script, prompt, sequence)


def provider_for(endpoint: ModelEndpoint, **client_kwargs):
    """MockProvider for `mock:<mode>` base URLs, otherwise a real MllmClient."""
    if endpoint.is_mock:
        mode = endpoint.base_url[len(MOCK_URL_PREFIX):].strip() or "oracle"
        return MockProvider(MockScript(mode=mode, fixed_text=endpoint.mock_text))
    return MllmClient(endpoint, **client_kwargs)
