"""Prediction quality metrics: set-overlap accuracy, normalized edit distance,
and cosine similarity between canonical behavior renderings."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping, Protocol

import numpy as np

from .labels import Behavior, render_behavior

if TYPE_CHECKING:
    from .dataset import EvalSequence
    from .parsing import ParsedPrediction


@dataclass(frozen=True)
class MetricReport:
    """Per-item scores; accuracy in [0,1], cosine in [-1,1], edit in [0,1]."""

    accuracy: float
    cosine: float
    edit: float


def accuracy_score(predicted: Behavior, truth: Behavior) -> float:
    """Dice-style overlap 2*|P&G| / (|P|+|G|).

    Both empty counts as perfect agreement (1.0): predicting no interaction
    when none occurs is correct.
    """
    p, g = predicted.labels, truth.labels
    if not p and not g:
        return 1.0
    return 2.0 * len(p & g) / (len(p) + len(g))


def levenshtein(a: str, b: str) -> int:
    """Unnormalized Levenshtein distance, unit costs for del/ins/sub."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,          # deletion
                    current[j - 1] + 1,       # insertion
                    previous[j - 1] + (ca != cb),  # substitution
                )
            )
        previous = current
    return previous[-1]


def edit_distance(predicted: str, truth: str) -> float:
    """Levenshtein distance normalized by the longer string; both empty -> 0.0."""
    longest = max(len(predicted), len(truth))
    if longest == 0:
        return 0.0
    return levenshtein(predicted, truth) / longest


class Embedder(Protocol):
    """Maps a string to a vector: a sparse Mapping or a dense array-like."""

    def embed(self, text: str) -> Mapping[str, float] | np.ndarray: ...


class TrigramEmbedder:
    """Deterministic character-trigram count embedding (offline scoring path).

    Strings shorter than 3 characters embed as a single whole-string feature
    so identical short renderings (e.g. "[]") still score cosine 1.0; only
    the empty string maps to the zero vector.
    """

    def embed(self, text: str) -> Counter:
        if not text:
            return Counter()
        if len(text) < 3:
            return Counter({text: 1})
        return Counter(text[i : i + 3] for i in range(len(text) - 2))


def _sparse_cosine(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    dot = sum(value * b.get(key, 0) for key, value in a.items())
    norm2_a = sum(value * value for value in a.values())
    norm2_b = sum(value * value for value in b.values())
    if norm2_a == 0 or norm2_b == 0:
        return 0.0
    # sqrt of the product keeps integer-count inputs exact for identical strings.
    return dot / math.sqrt(norm2_a * norm2_b)


def _dense_cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    norm2_a = float(np.dot(a, a))
    norm2_b = float(np.dot(b, b))
    if norm2_a == 0.0 or norm2_b == 0.0:
        return 0.0
    return float(np.dot(a, b)) / math.sqrt(norm2_a * norm2_b)


def cosine_similarity(predicted: str, truth: str, embedder: Embedder) -> float:
    """Cosine of the angle between the embeddings of two strings.

    A zero-norm embedding on either side yields 0.0 by convention.
    """
    va = embedder.embed(predicted)
    vb = embedder.embed(truth)
    if isinstance(va, Mapping):
        return _sparse_cosine(va, vb)
    return _dense_cosine(va, vb)


def score_sequence(
    parsed: "ParsedPrediction", sequence: "EvalSequence", embedder: Embedder
) -> MetricReport:
    """Score one parsed prediction against a sequence's ground truth.

    Accuracy compares label sets; edit and cosine compare the canonical
    sorted renderings, so label order can never perturb the string metrics.
    Failed parses carry an empty final prediction and score accordingly.
    """
    predicted_text = render_behavior(parsed.final)
    truth_text = render_behavior(sequence.target)
    return MetricReport(
        accuracy=accuracy_score(parsed.final, sequence.target),
        cosine=cosine_similarity(predicted_text, truth_text, embedder),
        edit=edit_distance(predicted_text, truth_text),
    )
