"""Shared fixtures: a synthetic 17-verb / 42-interaction vocabulary and
builders for manifests, recordings, and evaluation sequences."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from behaviorbench import Behavior, EvalSequence, InteractionLabel, SequenceFrame

VERBS = [
    "sit on", "stand on", "lie on", "lean on", "step on", "rest on",
    "touch", "hold", "grab", "open", "close", "move", "carry",
    "push", "pull", "look at", "point at",
]
NOUNS = [
    "sofa", "table", "chair", "bed", "floor", "wall", "cabinet", "door",
    "window", "shelf", "cushion", "desk", "lamp", "book", "cup", "laptop",
    "monitor", "keyboard",
]
# 42 distinct verb-noun pairs; lcm(17, 18) > 42 keeps the cycle collision-free.
INTERACTIONS = [InteractionLabel(VERBS[i % 17], NOUNS[i % 18]) for i in range(42)]

assert len(set(VERBS)) == 17
assert len(set(INTERACTIONS)) == 42


def behavior(*raw_labels: str) -> Behavior:
    return Behavior.from_strings(raw_labels)


def make_recording_dict(
    recording_id: str,
    n_frames: int,
    fps: int = 30,
    label_fn=None,
    with_images: bool = True,
    start_index: int = 0,
    index_step: int = 1,
) -> dict:
    """A manifest recording entry with deterministic per-second labels."""
    if label_fn is None:
        def label_fn(frame_index: int) -> list[str]:
            second = frame_index // fps
            return [INTERACTIONS[second % len(INTERACTIONS)].canonical()]

    frames = []
    index = start_index
    for _ in range(n_frames):
        frames.append(
            {
                "frame_index": index,
                "image": f"images/{recording_id}_{index:06d}.jpg" if with_images else None,
                "labels": label_fn(index),
            }
        )
        index += index_step
    return {
        "recording_id": recording_id,
        "scene_id": f"scene-{recording_id}",
        "fps": fps,
        "frames": frames,
    }


def write_manifest(tmp_path: Path, recordings: list[dict], name: str = "manifest.json") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(recordings), encoding="utf-8")
    return path


def make_sequence(
    sequence_id: str,
    history_behaviors: list[Behavior],
    target: Behavior,
    intermediates: list[Behavior] | None = None,
    with_images: bool = True,
    fps: int = 30,
    anchor: int = 60,
    horizon_s: float = 3.0,
) -> EvalSequence:
    """Directly build an EvalSequence (default history offsets -2/-1/0)."""
    n_hist = len(history_behaviors)
    history = tuple(
        SequenceFrame(
            offset_s=float(offset),
            timestamp_s=(anchor + offset * fps) / fps,
            behavior=beh,
            image_ref=f"images/{sequence_id}_{i}.jpg" if with_images else None,
        )
        for i, (offset, beh) in enumerate(
            zip(range(-(n_hist - 1), 1), history_behaviors)
        )
    )
    inter = tuple(
        SequenceFrame(
            offset_s=float(step),
            timestamp_s=(anchor + step * fps) / fps,
            behavior=beh,
            image_ref=f"images/{sequence_id}_i{step}.jpg" if with_images else None,
        )
        for step, beh in enumerate(intermediates or [], start=1)
    )
    return EvalSequence(
        sequence_id=sequence_id,
        recording_id=sequence_id.split(":")[0],
        anchor_frame_index=anchor,
        fps=fps,
        history=history,
        intermediates=inter,
        target=target,
        target_offset_s=horizon_s,
    )


@pytest.fixture
def manifest_600(tmp_path: Path) -> Path:
    """One 600-frame recording at 30 fps (10 sequences at default sampling)."""
    return write_manifest(tmp_path, [make_recording_dict("rec600", 600)])
