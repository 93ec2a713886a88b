"""Assemble multimodal prediction prompts for the four visual-context
representations, with in-place image interleaving and a per-request image
budget."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Sequence

from .dataset import EvalSequence, IclExample
from .errors import IclBudgetError, MissingImageError, TemplateError
from .hashing import sha256_hex
from .labels import Behavior, render_behavior

__all__ = [
    "Representation",
    "MessagePart",
    "PromptSpec",
    "PromptTemplate",
    "DEFAULT_TEMPLATE_TEXT",
    "PROMPT_TEMPLATE_VERSION",
    "UNBOUNDED",
    "max_icl_examples",
    "build_caption_request",
    "build_prediction_prompt",
    "render_behavior",
]


class Representation(str, Enum):
    """How the scene is conveyed to the model."""

    BLIND = "blind"
    IMAGE = "image"
    SEQUENCE = "sequence"
    CAPTION = "caption"

    @property
    def images_per_item(self) -> int:
        return _IMAGES_PER_ITEM[self]


_IMAGES_PER_ITEM = {
    Representation.BLIND: 0,
    Representation.IMAGE: 1,
    Representation.SEQUENCE: 3,
    Representation.CAPTION: 3,
}

#: Sentinel for "no image-derived bound" (blind prompts carry no images).
UNBOUNDED = math.inf

_MEDIA_TYPES = {
    ".png": "image/png",
    ".jpg": "image/jpeg",
    ".jpeg": "image/jpeg",
    ".webp": "image/webp",
    ".gif": "image/gif",
    ".bmp": "image/bmp",
}


def _media_type(ref: str) -> str:
    return _MEDIA_TYPES.get(Path(ref).suffix.lower(), "image/jpeg")


@dataclass(frozen=True)
class MessagePart:
    """One ordered slice of the prompt: either text or an image reference."""

    kind: str  # "text" | "image"
    text: str = ""
    image_ref: str = ""
    media_type: str = ""

    def __post_init__(self):
        if self.kind == "text":
            if self.image_ref or not self.text:
                raise ValueError("text part must carry text and no image_ref")
        elif self.kind == "image":
            if not self.image_ref or self.text:
                raise ValueError("image part must carry image_ref and no text")
        else:
            raise ValueError(f"unknown part kind {self.kind!r}")

    @staticmethod
    def of_text(text: str) -> "MessagePart":
        return MessagePart(kind="text", text=text)

    @staticmethod
    def of_image(ref: str) -> "MessagePart":
        return MessagePart(kind="image", image_ref=ref, media_type=_media_type(ref))

    def to_dict(self) -> dict[str, str]:
        if self.kind == "text":
            return {"kind": "text", "text": self.text}
        return {"kind": "image", "image_ref": self.image_ref, "media_type": self.media_type}


@dataclass(frozen=True)
class PromptSpec:
    """An ordered multimodal message, ready for the wire."""

    system_text: str
    parts: tuple[MessagePart, ...]
    n_icl: int
    representation: Representation
    autoregressive: bool
    total_images: int
    caption_text: str | None = None
    is_caption_request: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "system_text": self.system_text,
            "parts": [part.to_dict() for part in self.parts],
            "n_icl": self.n_icl,
            "representation": self.representation.value,
            "autoregressive": self.autoregressive,
            "total_images": self.total_images,
            "caption_text": self.caption_text,
            "is_caption_request": self.is_caption_request,
        }

    @property
    def prompt_hash(self) -> str:
        return sha256_hex(self.to_dict())


PROMPT_TEMPLATE_VERSION = "v1"

# Scaffold layout: the segment above {examples} becomes the system/task text;
# query images are emitted right after the examples, then the caption
# paragraph, then the rendered history. {horizon_s} and {horizon_instruction}
# are substituted before splitting.
DEFAULT_TEMPLATE_TEXT = """\
You anticipate human activity in indoor scenes. A behavior is written as a JSON list of
interaction labels, and every label is one "verb-noun" pair, for example "sit on-sofa";
a timestep with no interaction is written as []. You are given the interactions a person
performed at the observed timesteps and, when available, images of the scene and a scene
description. Predict the person's behavior {horizon_s} seconds after the last observation
(the 0s timestep). Keep every label in "verb-noun" form. {horizon_instruction}

{examples}

{caption}

{history}
"""

_DIRECT_INSTRUCTION = (
    'Answer with a single JSON list such as ["sit on-sofa", "touch-table"] for the '
    "+{horizon}s timestep and nothing else."
)
_AUTOREGRESSIVE_INSTRUCTION = (
    "Work forward in time: answer with one line per future timestep, {steps} each "
    "holding one JSON list of labels. The last line is your +{horizon}s prediction."
)

CAPTION_SYSTEM_TEXT = (
    "You describe indoor scenes to support forecasting of human activity."
)
CAPTION_INSTRUCTION = (
    "These frames show the last observed seconds of a person in a scene. Describe the "
    "person, the relevant objects and actions, and the possible affordable actions."
)


@dataclass(frozen=True)
class PromptTemplate:
    """Versioned prompt scaffold; the fingerprint is recorded with every run."""

    text: str
    version: str = "custom"

    def __post_init__(self):
        for placeholder in ("{examples}", "{history}"):
            if placeholder not in self.text:
                raise TemplateError(f"template is missing the {placeholder} placeholder")

    @classmethod
    def default(cls) -> "PromptTemplate":
        return cls(text=DEFAULT_TEMPLATE_TEXT, version=PROMPT_TEMPLATE_VERSION)

    @classmethod
    def from_file(cls, path: str | Path) -> "PromptTemplate":
        return cls(text=Path(path).read_text(encoding="utf-8"))

    @property
    def fingerprint(self) -> str:
        return sha256_hex(f"{self.version}\n{self.text}")


def max_icl_examples(representation: Representation, image_limit: int) -> int | float:
    """Largest n with images_per_item * (n + 1) <= image_limit.

    Blind carries no images and returns UNBOUNDED; the runner applies any
    configured cap itself.
    """
    per_item = representation.images_per_item
    if per_item == 0:
        return UNBOUNDED
    if image_limit < per_item:
        raise ValueError(
            f"image_limit {image_limit} cannot fit one {representation.value} query "
            f"({per_item} images)"
        )
    return image_limit // per_item - 1


def _offset_tag(offset_s: float) -> str:
    whole = int(round(offset_s))
    return f"{whole}s" if whole <= 0 else f"+{whole}s"


def _item_images(refs: Sequence[str], representation: Representation, who: str) -> list[str]:
    """Select the image refs one example/query contributes, per representation."""
    needed = representation.images_per_item
    if needed == 0:
        return []
    if len(refs) < 3:
        raise MissingImageError(
            f"{who} has {len(refs)} image refs but representation "
            f"{representation.value!r} draws on the 3 history frames"
        )
    if representation is Representation.IMAGE:
        return [refs[-1]]  # the t = 0 frame
    return list(refs[-3:])  # the most recent 3 frames


def _history_lines(offsets: Sequence[float], behaviors: Sequence[Behavior]) -> str:
    return "\n".join(
        f"Observed {_offset_tag(off)}: {render_behavior(beh)}"
        for off, beh in zip(offsets, behaviors)
    )


def _example_text(index: int, example: IclExample) -> str:
    lines = _history_lines(example.history_offsets_s, example.history_labels)
    future = f"Future {_offset_tag(example.target_offset_s)}: {render_behavior(example.target_labels)}"
    return f"Example {index}:\n{lines}\n{future}"


def _query_text(sequence: EvalSequence, autoregressive: bool) -> str:
    lines = _history_lines(
        [frame.offset_s for frame in sequence.history],
        [frame.behavior for frame in sequence.history],
    )
    horizon = int(round(sequence.target_offset_s))
    if autoregressive:
        tags = ", ".join(_offset_tag(float(step)) for step in range(1, horizon + 1))
        future = f"Future {tags}:"
    else:
        future = f"Future {_offset_tag(sequence.target_offset_s)}:"
    return f"Query:\n{lines}\n{future}"


def _horizon_instruction(horizon: int, autoregressive: bool) -> str:
    if not autoregressive:
        return _DIRECT_INSTRUCTION.format(horizon=horizon)
    steps = " then ".join(f"'{step}s: [...]'" for step in range(1, horizon + 1))
    return _AUTOREGRESSIVE_INSTRUCTION.format(steps=steps + ",", horizon=horizon)


def build_caption_request(sequence: EvalSequence) -> PromptSpec:
    """A scene-caption request over the query's 3 history frames (no ICL, no labels)."""
    refs = sequence.history_image_refs()
    if len(refs) < 3:
        raise MissingImageError(
            f"sequence {sequence.sequence_id} lacks the 3 history images a caption needs"
        )
    parts = tuple(
        [MessagePart.of_image(ref) for ref in refs[-3:]]
        + [MessagePart.of_text(CAPTION_INSTRUCTION)]
    )
    return PromptSpec(
        system_text=CAPTION_SYSTEM_TEXT,
        parts=parts,
        n_icl=0,
        representation=Representation.CAPTION,
        autoregressive=False,
        total_images=3,
        is_caption_request=True,
    )


def build_prediction_prompt(
    sequence: EvalSequence,
    representation: Representation,
    icl: Sequence[IclExample] = (),
    autoregressive: bool = False,
    caption_text: str | None = None,
    template: PromptTemplate | None = None,
    image_limit: int | None = None,
) -> PromptSpec:
    """Build the full prediction prompt: task text, ICL examples, then the query.

    Each example's images directly precede its text (tokenize-in-place); the
    query contributes its own images, the caption paragraph (Caption only),
    and the rendered label history. Deterministic: identical inputs yield
    identical PromptSpecs.
    """
    template = template or PromptTemplate.default()
    if (caption_text is not None) != (representation is Representation.CAPTION):
        raise ValueError(
            "caption_text must be provided exactly when representation is caption"
        )
    per_item = representation.images_per_item
    total_images = per_item * (len(icl) + 1)
    if image_limit is not None:
        budget = max_icl_examples(representation, image_limit)
        if len(icl) > budget:
            raise IclBudgetError(
                f"{len(icl)} ICL examples exceed the budget of {budget} for "
                f"{representation.value} under a {image_limit}-image limit"
            )

    horizon = int(round(sequence.target_offset_s))
    scaffold = template.text.replace(
        "{horizon_instruction}", _horizon_instruction(horizon, autoregressive)
    ).replace("{horizon_s}", str(horizon))

    head, _, rest = scaffold.partition("{examples}")
    if "{caption}" in rest:
        glue_a, _, rest = rest.partition("{caption}")
    else:
        glue_a, rest = "", rest
    glue_b, _, tail = rest.partition("{history}")

    parts: list[MessagePart] = []
    for index, example in enumerate(icl, start=1):
        for ref in _item_images(example.image_refs, representation, f"ICL example {index}"):
            parts.append(MessagePart.of_image(ref))
        parts.append(MessagePart.of_text(_example_text(index, example)))
    if glue_a.strip():
        parts.append(MessagePart.of_text(glue_a.strip()))
    for ref in _item_images(
        sequence.history_image_refs(), representation, f"sequence {sequence.sequence_id}"
    ):
        parts.append(MessagePart.of_image(ref))
    if caption_text is not None:
        parts.append(MessagePart.of_text(f"Scene description: {caption_text.strip()}"))
    if glue_b.strip():
        parts.append(MessagePart.of_text(glue_b.strip()))
    query_block = _query_text(sequence, autoregressive)
    if tail.strip():
        query_block = f"{query_block}\n{tail.strip()}"
    parts.append(MessagePart.of_text(query_block))

    return PromptSpec(
        system_text=head.strip(),
        parts=tuple(parts),
        n_icl=len(icl),
        representation=representation,
        autoregressive=autoregressive,
        total_images=total_images,
        caption_text=caption_text,
    )
