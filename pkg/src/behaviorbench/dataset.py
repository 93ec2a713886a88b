"""Frame-level recordings, evaluation-sequence sampling, and ICL example pools.

A manifest (JSON or JSON-lines) lists recordings of per-frame interaction
labels with optional image locators. Sequences window each recording into
3 history timesteps (-2/-1/0 s), optional intermediates (+1/+2 s) and a
target (+3 s), with the window start advancing by a fixed stride.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import (
    DuplicateRecordingError,
    InsufficientPoolError,
    ManifestError,
    MonotonicityError,
)
from .labels import Behavior

_REMOTE_PREFIXES = ("http://", "https://", "data:")


@dataclass(frozen=True)
class FrameRecord:
    frame_index: int
    timestamp_s: float
    image_ref: str | None
    behavior: Behavior


@dataclass(frozen=True)
class Recording:
    recording_id: str
    scene_id: str
    fps: int
    frames: tuple[FrameRecord, ...]


@dataclass(frozen=True)
class SequenceFrame:
    """One sampled timestep, at a whole-second offset relative to the anchor."""

    offset_s: float
    timestamp_s: float
    behavior: Behavior
    image_ref: str | None


@dataclass(frozen=True)
class EvalSequence:
    """One benchmark item: history at -2/-1/0 s, optional +1/+2 s, target at +3 s."""

    sequence_id: str
    recording_id: str
    anchor_frame_index: int
    fps: int
    history: tuple[SequenceFrame, ...]
    intermediates: tuple[SequenceFrame, ...]
    target: Behavior
    target_offset_s: float = 3.0

    @property
    def latest(self) -> Behavior:
        """The t = 0 behavior (last observed timestep)."""
        return self.history[-1].behavior

    @property
    def target_changed(self) -> bool:
        return self.target != self.latest

    @property
    def target_multilabel(self) -> bool:
        return len(self.target) >= 2

    def history_image_refs(self) -> tuple[str, ...]:
        """All history image refs, or () when any is missing."""
        refs = tuple(frame.image_ref for frame in self.history)
        if any(ref is None or ref == "" for ref in refs):
            return ()
        return tuple(str(ref) for ref in refs)

    def to_dict(self) -> dict[str, Any]:
        def frame_dict(frame: SequenceFrame) -> dict[str, Any]:
            return {
                "offset_s": frame.offset_s,
                "timestamp_s": frame.timestamp_s,
                "image": frame.image_ref,
                "labels": frame.behavior.sorted_canonical(),
            }

        return {
            "sequence_id": self.sequence_id,
            "recording_id": self.recording_id,
            "anchor_frame_index": self.anchor_frame_index,
            "fps": self.fps,
            "history": [frame_dict(f) for f in self.history],
            "intermediates": [frame_dict(f) for f in self.intermediates],
            "target": {
                "offset_s": self.target_offset_s,
                "labels": self.target.sorted_canonical(),
            },
        }


@dataclass(frozen=True)
class IclExample:
    """One in-context example: label history plus the ground-truth future labels."""

    history_labels: tuple[Behavior, ...]
    history_offsets_s: tuple[float, ...]
    target_labels: Behavior
    target_offset_s: float
    image_refs: tuple[str, ...]  # () or the full history refs
    source_sequence_id: str


@dataclass(frozen=True)
class DatasetStats:
    n_sequences: int
    fraction_changed: float
    fraction_multilabel: float


def _resolve_image(image: Any, base_dir: Path) -> str | None:
    if image is None or image == "":
        return None
    ref = str(image)
    if ref.startswith(_REMOTE_PREFIXES) or Path(ref).is_absolute():
        return ref
    return str(base_dir / ref)


def _recording_from_dict(entry: Any, base_dir: Path) -> Recording:
    if not isinstance(entry, dict):
        raise ManifestError(f"recording entry must be an object, got {type(entry).__name__}")
    try:
        recording_id = str(entry["recording_id"])
        fps = entry["fps"]
        raw_frames = entry["frames"]
    except KeyError as exc:
        raise ManifestError(f"recording entry missing key {exc}") from None
    scene_id = str(entry.get("scene_id", ""))
    if not isinstance(fps, int) or isinstance(fps, bool) or fps <= 0:
        raise ManifestError(f"{recording_id}: fps must be a positive integer, got {fps!r}")
    if not isinstance(raw_frames, list):
        raise ManifestError(f"{recording_id}: frames must be a list")

    frames: list[FrameRecord] = []
    previous_index: int | None = None
    for raw in raw_frames:
        try:
            frame_index = int(raw["frame_index"])
        except (KeyError, TypeError, ValueError):
            raise ManifestError(f"{recording_id}: frame entry missing a valid frame_index")
        if frame_index < 0:
            raise ManifestError(f"{recording_id}: frame_index {frame_index} is negative")
        if previous_index is not None and frame_index <= previous_index:
            raise MonotonicityError(
                f"{recording_id}: frame indices must be strictly increasing "
                f"({previous_index} then {frame_index})"
            )
        previous_index = frame_index
        labels = raw.get("labels", [])
        if not isinstance(labels, list):
            raise ManifestError(f"{recording_id}: labels must be a list of strings")
        frames.append(
            FrameRecord(
                frame_index=frame_index,
                timestamp_s=frame_index / fps,
                image_ref=_resolve_image(raw.get("image"), base_dir),
                behavior=Behavior.from_strings(labels),
            )
        )
    return Recording(recording_id, scene_id, fps, tuple(frames))


def load_dataset(manifest_path: str | Path) -> list[Recording]:
    """Load recordings from a JSON (array or single object) or JSON-lines manifest.

    Labels are normalized on ingest; relative image locators are resolved
    against the manifest's directory.
    """
    path = Path(manifest_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc

    entries: list[Any]
    try:
        document = json.loads(text)
        entries = document if isinstance(document, list) else [document]
    except json.JSONDecodeError:
        entries = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                entries.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
    if not entries:
        raise ManifestError(f"{path}: manifest contains no recordings")

    base_dir = path.resolve().parent
    recordings: list[Recording] = []
    seen: set[str] = set()
    for entry in entries:
        recording = _recording_from_dict(entry, base_dir)
        if recording.recording_id in seen:
            raise DuplicateRecordingError(
                f"duplicate recording_id {recording.recording_id!r}"
            )
        seen.add(recording.recording_id)
        recordings.append(recording)
    return recordings


def _step_frames(value_s: float, fps: int, name: str) -> int:
    """A duration as an exact positive frame count."""
    if value_s <= 0:
        raise ValueError(f"{name} must be positive, got {value_s}")
    frames = value_s * fps
    if abs(frames - round(frames)) > 1e-9 or round(frames) < 1:
        raise ValueError(f"{name}={value_s} is not a positive multiple of 1/fps (fps={fps})")
    return int(round(frames))


def _whole_seconds(value_s: float, name: str) -> int:
    if value_s <= 0 or abs(value_s - round(value_s)) > 1e-9:
        raise ValueError(
            f"{name}={value_s} must be a whole number of seconds "
            "(timesteps are sampled at 1-second spacing)"
        )
    return int(round(value_s))


def sample_sequences(
    recording: Recording,
    stride_s: float = 1.5,
    history_s: float = 2.0,
    horizon_s: float = 3.0,
    include_intermediates: bool = True,
) -> list[EvalSequence]:
    """Window a recording into evaluation sequences.

    Anchors (the t = 0 frames) start at history_s*fps and advance by
    stride_s*fps; a window is emitted only when every required frame index
    exists. A recording shorter than one full window yields an empty list.
    """
    fps = recording.fps
    stride_f = _step_frames(stride_s, fps, "stride_s")
    history_steps = _whole_seconds(history_s, "history_s")
    horizon_steps = _whole_seconds(horizon_s, "horizon_s")
    history_f = history_steps * fps
    horizon_f = horizon_steps * fps

    if not recording.frames:
        return []
    by_index = {frame.frame_index: frame for frame in recording.frames}
    max_index = recording.frames[-1].frame_index

    history_offsets = list(range(-history_steps, 1))
    intermediate_offsets = list(range(1, horizon_steps))

    sequences: list[EvalSequence] = []
    anchor = history_f
    while anchor + horizon_f <= max_index:
        required = [anchor + off * fps for off in history_offsets] + [anchor + horizon_f]
        if all(idx in by_index for idx in required):

            def timestep(offset: int) -> SequenceFrame:
                frame = by_index[anchor + offset * fps]
                return SequenceFrame(
                    offset_s=float(offset),
                    timestamp_s=frame.timestamp_s,
                    behavior=frame.behavior,
                    image_ref=frame.image_ref,
                )

            intermediates: tuple[SequenceFrame, ...] = ()
            if include_intermediates and all(
                anchor + off * fps in by_index for off in intermediate_offsets
            ):
                intermediates = tuple(timestep(off) for off in intermediate_offsets)
            sequences.append(
                EvalSequence(
                    sequence_id=f"{recording.recording_id}:{anchor:06d}",
                    recording_id=recording.recording_id,
                    anchor_frame_index=anchor,
                    fps=fps,
                    history=tuple(timestep(off) for off in history_offsets),
                    intermediates=intermediates,
                    target=by_index[anchor + horizon_f].behavior,
                    target_offset_s=float(horizon_steps),
                )
            )
        anchor += stride_f
    return sequences


def dataset_stats(sequences: Sequence[EvalSequence]) -> DatasetStats:
    """Fractions of sequences with a changed target and with >= 2 target labels."""
    n = len(sequences)
    if n == 0:
        return DatasetStats(0, 0.0, 0.0)
    changed = sum(1 for s in sequences if s.target_changed)
    multilabel = sum(1 for s in sequences if s.target_multilabel)
    return DatasetStats(n, changed / n, multilabel / n)


def sample_icl(
    pool: Iterable[EvalSequence],
    n: int,
    seed: int,
    exclude_id: str | None = None,
) -> list[IclExample]:
    """Draw n distinct ICL examples uniformly without replacement.

    The query sequence (exclude_id) never appears in its own examples. The
    draw is a pure function of (pool ids, n, seed, exclude_id): candidates
    are sorted by sequence_id before sampling, so pool order is irrelevant.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    candidates = sorted(
        (s for s in pool if s.sequence_id != exclude_id),
        key=lambda s: s.sequence_id,
    )
    if n > len(candidates):
        raise InsufficientPoolError(
            f"requested {n} ICL examples but only {len(candidates)} candidates remain"
        )
    rng = random.Random(seed)
    chosen = rng.sample(candidates, n) if n else []
    return [
        IclExample(
            history_labels=tuple(frame.behavior for frame in s.history),
            history_offsets_s=tuple(frame.offset_s for frame in s.history),
            target_labels=s.target,
            target_offset_s=s.target_offset_s,
            image_refs=s.history_image_refs(),
            source_sequence_id=s.sequence_id,
        )
        for s in chosen
    ]
