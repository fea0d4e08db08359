"""Append-only choice-event log: one JSON object per line, UTF-8.

The log is the source of truth for a session; every state the service
reports can be rebuilt by folding it from the start.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

EVENT_KINDS = frozenset(
    {
        "session_start",
        "session_end",
        "load",
        "preload",
        "promote",
        "drag",
        "cancel",
        "swipe",
        "tap",
        "answer",
    }
)

_FIELDS = ("seq", "timestamp", "session_id", "card_id", "item_id", "kind", "payload")


@dataclass(frozen=True)
class ChoiceEvent:
    seq: int                     # strictly increasing per session, no gaps
    timestamp: int               # UTC milliseconds (synthetic ticks when simulated)
    session_id: str
    card_id: str | None
    item_id: str | None
    kind: str
    payload: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.seq < 0:
            raise ValueError("seq must be non-negative")

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "session_id": self.session_id,
            "card_id": self.card_id,
            "item_id": self.item_id,
            "kind": self.kind,
            "payload": self.payload,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, raw: dict) -> "ChoiceEvent":
        missing = [f for f in _FIELDS if f not in raw]
        if missing:
            raise ValueError(f"event record missing fields: {missing}")
        return cls(**{f: raw[f] for f in _FIELDS})


class EventLog:
    """Line-buffered JSONL sink; each append writes and flushes one record."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "a", encoding="utf-8")
        self._lock = threading.Lock()

    def append(self, event: ChoiceEvent) -> None:
        line = event.to_json_line()
        with self._lock:
            self._fh.write(line + "\n")
            self._fh.flush()

    def close(self) -> None:
        with self._lock:
            self._fh.close()


def read_events(path: str | Path) -> list[ChoiceEvent]:
    return list(iter_events(path))


def iter_events(path: str | Path) -> Iterator[ChoiceEvent]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield ChoiceEvent.from_dict(json.loads(line))
            except (json.JSONDecodeError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad event record: {exc}") from exc
