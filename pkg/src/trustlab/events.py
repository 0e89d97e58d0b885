"""Append-only event records for the experiment session.

Every state transition in a subject's flow is persisted as one JSON line, so
any flow can be reconstructed exactly by replaying its events in order.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import IO, Iterable


@dataclass(frozen=True)
class EventRecord:
    seq: int  # gapless per subject ("" for session-level events)
    timestamp: float
    subject_id: str
    kind: str
    payload: dict

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "EventRecord":
        raw = json.loads(line)
        return cls(
            seq=raw["seq"],
            timestamp=raw["timestamp"],
            subject_id=raw["subject_id"],
            kind=raw["kind"],
            payload=raw["payload"],
        )


class EventLog:
    """In-memory event list with an optional append-only file sink."""

    def __init__(self, sink_path: str | Path | None = None):
        self.records: list[EventRecord] = []
        self._seqs: dict[str, int] = {}
        self._sink: IO[str] | None = None
        if sink_path is not None:
            self._sink = open(sink_path, "a")

    def next_seq(self, subject_id: str) -> int:
        return self._seqs.get(subject_id, 0)

    def append(self, record: EventRecord) -> None:
        expected = self.next_seq(record.subject_id)
        if record.seq != expected:
            raise ValueError(
                f"sequence gap for {record.subject_id!r}: got {record.seq}, "
                f"expected {expected}"
            )
        self.records.append(record)
        self._seqs[record.subject_id] = record.seq + 1
        if self._sink is not None:
            self._sink.write(record.to_json() + "\n")
            self._sink.flush()

    def close(self) -> None:
        if self._sink is not None:
            self._sink.close()
            self._sink = None

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)


def load_events(path: str | Path) -> list[EventRecord]:
    with open(path) as fh:
        return [EventRecord.from_json(line) for line in fh if line.strip()]


def dump_events(records: Iterable[EventRecord], path: str | Path) -> None:
    with open(path, "w") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")
