"""Extract normalized label predictions from free-form model output.

Parsing is total: every input string yields a ParsedPrediction, never an
exception. Unusable text is reported as ``failed`` and scored downstream as
the empty prediction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import MalformedLabelError
from .labels import Behavior, InteractionLabel, normalize_label

__all__ = [
    "PARSE_OK",
    "PARSE_RECOVERED",
    "PARSE_FAILED",
    "ParsedPrediction",
    "normalize_label",
    "parse_prediction",
]

PARSE_OK = "ok"
PARSE_RECOVERED = "recovered"
PARSE_FAILED = "failed"

_BRACKETED = re.compile(r"\[[^\[\]]*\]", re.DOTALL)
_QUOTED = re.compile(r'"([^"]*)"|\'([^\']*)\'')
# A timestep tag such as "1s:", "+2 s", "t=3s", "3 seconds:" right before a list.
_TIME_TAG = re.compile(
    r"(?:t\s*=\s*)?\+?\s*(\d+)(?:\.0+)?\s*s(?:ec(?:ond)?s?)?\s*[:\-]?\s*$",
    re.IGNORECASE,
)
_TAG_LOOKBACK = 24


@dataclass(frozen=True)
class ParsedPrediction:
    """Prediction extracted from one model response.

    ``final`` is the target-horizon behavior; ``intermediates`` holds the
    +1 s/+2 s behaviors when an autoregressive response supplied them.
    """

    final: Behavior
    intermediates: tuple[Behavior, Behavior] | None = None
    parse_status: str = PARSE_OK

    @property
    def failed(self) -> bool:
        return self.parse_status == PARSE_FAILED


def _parse_list_body(body: str) -> tuple[frozenset[InteractionLabel], bool] | None:
    """Parse the inside of one bracketed list.

    Returns (labels, repaired) or None when the body held items but none
    could be recovered. Unquoted items and dropped malformed items both
    count as repair.
    """
    quoted = _QUOTED.findall(body)
    if quoted:
        items = [a if a else b for a, b in quoted]
        repaired = False
    else:
        items = [piece.strip() for piece in body.split(",") if piece.strip()]
        repaired = bool(items)
    labels: set[InteractionLabel] = set()
    dropped = False
    for item in items:
        try:
            labels.add(normalize_label(item))
        except MalformedLabelError:
            dropped = True
    if items and not labels:
        return None
    return frozenset(labels), repaired or dropped


def _time_tag(text: str, bracket_start: int) -> int | None:
    prefix = text[max(0, bracket_start - _TAG_LOOKBACK) : bracket_start]
    match = _TIME_TAG.search(prefix)
    if match is None:
        return None
    return int(match.group(1))


def parse_prediction(raw_text: str, autoregressive: bool = False) -> ParsedPrediction:
    """Extract the predicted behavior(s) from a raw model response.

    Non-autoregressive: the last parseable bracketed list is the answer.
    Autoregressive: three timestep-tagged lists (1s/2s/3s) are preferred;
    otherwise the last three lists are taken in positional order.
    """
    text = raw_text or ""
    candidates: list[tuple[int | None, Behavior, bool, int]] = []
    last_match_index = -1
    for i, match in enumerate(_BRACKETED.finditer(text)):
        last_match_index = i
        parsed = _parse_list_body(match.group(0)[1:-1])
        if parsed is None:
            continue
        labels, repaired = parsed
        candidates.append((_time_tag(text, match.start()), Behavior(labels), repaired, i))
    if not candidates:
        return ParsedPrediction(Behavior(), None, PARSE_FAILED)

    if not autoregressive:
        tag, behavior, repaired, index = candidates[-1]
        # Using an earlier list because the last one was garbage is a repair.
        status = PARSE_RECOVERED if repaired or index != last_match_index else PARSE_OK
        return ParsedPrediction(behavior, None, status)

    tagged: dict[int, tuple[Behavior, bool]] = {}
    for tag, behavior, repaired, _ in candidates:
        if tag in (1, 2, 3):
            tagged[tag] = (behavior, repaired)  # later occurrences win
    if len(tagged) == 3:
        repaired_any = any(rep for _, rep in tagged.values())
        return ParsedPrediction(
            tagged[3][0],
            (tagged[1][0], tagged[2][0]),
            PARSE_RECOVERED if repaired_any else PARSE_OK,
        )
    if len(candidates) >= 3:
        first, second, last = candidates[-3], candidates[-2], candidates[-1]
        repaired_any = first[2] or second[2] or last[2]
        return ParsedPrediction(
            last[1],
            (first[1], second[1]),
            PARSE_RECOVERED if repaired_any else PARSE_OK,
        )
    # Fewer lists than timesteps: keep the last as the final prediction.
    return ParsedPrediction(candidates[-1][1], None, PARSE_RECOVERED)
