"""Interaction labels and per-frame behaviors, with their canonical string forms.

The canonical forms are load-bearing: prompts render behaviors with
``render_behavior`` and the output parser feeds every extracted item through
``normalize_label``, so round-tripping must be exact.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import MalformedLabelError

_WHITESPACE = re.compile(r"\s+")
# Quote/bracket junk that models like to wrap around individual labels.
_EDGE_JUNK = "\"'`[]{}()"


@dataclass(frozen=True)
class InteractionLabel:
    """One "verb-noun" pair, e.g. verb "sit on", noun "sofa"."""

    verb: str
    noun: str

    def __post_init__(self):
        if not self.verb or not self.noun:
            raise MalformedLabelError(
                f"verb and noun must be nonempty, got verb={self.verb!r} noun={self.noun!r}"
            )

    def canonical(self) -> str:
        return f"{self.verb}-{self.noun}"

    def __str__(self) -> str:
        return self.canonical()


def normalize_label(raw: str) -> InteractionLabel:
    """Normalize a raw label string into an InteractionLabel.

    Lowercases, collapses whitespace, strips surrounding quotes/brackets, and
    splits at the LAST hyphen so multi-word verbs like "sit on" survive.
    Raises MalformedLabelError when no hyphen separates a verb from a noun.
    """
    if raw is None:
        raise MalformedLabelError("label is None")
    cleaned = _WHITESPACE.sub(" ", str(raw)).strip().strip(_EDGE_JUNK).strip().lower()
    if not cleaned:
        raise MalformedLabelError(f"label is empty after normalization: {raw!r}")
    verb, sep, noun = cleaned.rpartition("-")
    verb, noun = verb.strip(), noun.strip()
    if not sep or not verb or not noun:
        raise MalformedLabelError(f"label has no verb-noun hyphen split: {raw!r}")
    return InteractionLabel(verb, noun)


@dataclass(frozen=True)
class Behavior:
    """The set of interaction labels active in one frame; may be empty."""

    labels: frozenset[InteractionLabel] = field(default_factory=frozenset)

    @classmethod
    def of(cls, labels: Iterable[InteractionLabel]) -> "Behavior":
        return cls(frozenset(labels))

    @classmethod
    def from_strings(cls, raw_labels: Iterable[str]) -> "Behavior":
        """Build a Behavior by normalizing raw "verb-noun" strings."""
        return cls(frozenset(normalize_label(r) for r in raw_labels))

    def sorted_canonical(self) -> list[str]:
        """Label strings sorted lexicographically (the canonical ordering)."""
        return sorted(label.canonical() for label in self.labels)

    def render(self) -> str:
        return render_behavior(self)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[InteractionLabel]:
        return iter(sorted(self.labels, key=lambda l: l.canonical()))

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def __bool__(self) -> bool:
        return bool(self.labels)


EMPTY_BEHAVIOR = Behavior()


def render_behavior(behavior: Behavior) -> str:
    """Canonical rendering: a JSON list of quoted labels, sorted; empty -> "[]"."""
    return json.dumps(behavior.sorted_canonical(), ensure_ascii=False)
