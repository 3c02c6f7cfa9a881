"""Collapse consecutive same-performer events into editing sessions.

A session is a maximal run of events on one artifact by one performer in
which every adjacent pair of events is at most ``gap_threshold`` seconds
apart and no other performer's event intervenes.  The gap is measured
between adjacent event timestamps, not from the session start, so a run
can span longer than the threshold in total.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .events import EventLog, EventRecord, format_timestamp, parse_timestamp

DEFAULT_GAP_SECONDS = 600


class PreconditionError(ValueError):
    """Input violates a documented precondition (unsorted or mixed artifacts)."""


@dataclass(frozen=True)
class Session:
    """A collapsed run of same-performer events on one artifact."""

    artifact_id: str
    performer_id: str
    start: int
    end: int
    edit_count: int
    size_total: int | None
    ordinal: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError("session start after end")
        if self.edit_count < 1:
            raise ValueError("edit_count must be >= 1")

    @property
    def duration(self) -> int:
        return self.end - self.start

    def to_dict(self) -> dict[str, object]:
        return {
            "artifact_id": self.artifact_id,
            "performer_id": self.performer_id,
            "start": format_timestamp(self.start),
            "end": format_timestamp(self.end),
            "edit_count": self.edit_count,
            "size_total": self.size_total,
            "ordinal": self.ordinal,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "Session":
        return cls(
            artifact_id=obj["artifact_id"],
            performer_id=obj["performer_id"],
            start=parse_timestamp(str(obj["start"])),
            end=parse_timestamp(str(obj["end"])),
            edit_count=int(obj["edit_count"]),
            size_total=None if obj.get("size_total") is None else int(obj["size_total"]),
            ordinal=int(obj["ordinal"]),
        )


@dataclass
class SessionVector:
    """One artifact's ordered sessions."""

    artifact_id: str
    sessions: list[Session]

    def __len__(self) -> int:
        return len(self.sessions)

    @property
    def performers(self) -> list[str]:
        return [s.performer_id for s in self.sessions]


def sessionize(events: Sequence[EventRecord], gap_threshold: int = DEFAULT_GAP_SECONDS) -> SessionVector:
    """Collapse one artifact's ordered events into a session vector."""
    if not events:
        raise PreconditionError("cannot sessionize an empty event list")
    artifact_id = events[0].artifact_id
    prev_ts = None
    for ev in events:
        if ev.artifact_id != artifact_id:
            raise PreconditionError("events span multiple artifacts")
        if prev_ts is not None and ev.timestamp < prev_ts:
            raise PreconditionError("events are not sorted by timestamp")
        prev_ts = ev.timestamp

    sessions: list[Session] = []
    run: list[EventRecord] = []

    def flush() -> None:
        if not run:
            return
        sizes = [e.size_delta for e in run]
        size_total = None if all(s is None for s in sizes) else sum(s or 0 for s in sizes)
        sessions.append(
            Session(
                artifact_id=artifact_id,
                performer_id=run[0].performer_id,
                start=run[0].timestamp,
                end=run[-1].timestamp,
                edit_count=len(run),
                size_total=size_total,
                ordinal=len(sessions) + 1,
            )
        )
        run.clear()

    for ev in events:
        if run and (
            ev.performer_id != run[-1].performer_id
            or ev.timestamp - run[-1].timestamp > gap_threshold
        ):
            flush()
        run.append(ev)
    flush()
    return SessionVector(artifact_id=artifact_id, sessions=sessions)


def sessionize_corpus(log: EventLog, gap_threshold: int = DEFAULT_GAP_SECONDS) -> list[SessionVector]:
    """One SessionVector per artifact, in artifact-id order."""
    return [
        sessionize(log.events_for(artifact_id), gap_threshold)
        for artifact_id in log.artifact_ids
    ]


def total_sessions(vectors: Iterable[SessionVector]) -> int:
    return sum(len(v) for v in vectors)


def gap_histogram(log: EventLog, bin_seconds: int = 60) -> Counter:
    """Histogram of same-performer adjacent inter-edit gaps, bucketed by bin.

    Diagnostic for choosing a collapse threshold; keys are bin lower bounds
    in seconds.
    """
    hist: Counter = Counter()
    for artifact_id in log.artifact_ids:
        events = log.events_for(artifact_id)
        for prev, cur in zip(events, events[1:]):
            if prev.performer_id == cur.performer_id:
                gap = cur.timestamp - prev.timestamp
                hist[(gap // bin_seconds) * bin_seconds] += 1
    return hist


def write_sessions_jsonl(vectors: Iterable[SessionVector], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for vec in vectors:
            for sess in vec.sessions:
                fh.write(json.dumps(sess.to_dict(), sort_keys=True) + "\n")


def read_sessions_jsonl(path) -> list[SessionVector]:
    by_artifact: dict[str, list[Session]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            sess = Session.from_dict(json.loads(line))
            by_artifact.setdefault(sess.artifact_id, []).append(sess)
    vectors = []
    for artifact_id in sorted(by_artifact):
        sessions = sorted(by_artifact[artifact_id], key=lambda s: s.ordinal)
        vectors.append(SessionVector(artifact_id=artifact_id, sessions=sessions))
    return vectors
