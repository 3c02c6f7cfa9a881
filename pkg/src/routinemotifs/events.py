"""Event-log data model: parsing, validation, and canonical ordering.

The log format is the Activity/Artifact/Performer/Order quartet common to
process-mining tools.  Timestamps are normalized to UTC epoch seconds so
that downstream gap arithmetic is DST-free.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Iterator, Mapping

CSV_HEADER = ["artifact_id", "performer_id", "activity", "timestamp", "size_delta"]


class SchemaError(ValueError):
    """A required column or key is missing from the input."""


class RowError(ValueError):
    """A single row failed validation (only fatal in strict mode)."""


def parse_timestamp(raw: str) -> int:
    """Parse an ISO-8601 timestamp (or raw epoch seconds) to UTC epoch seconds."""
    raw = raw.strip()
    if not raw:
        raise RowError("empty timestamp")
    try:
        return int(raw)
    except ValueError:
        pass
    text = raw[:-1] + "+00:00" if raw.endswith("Z") else raw
    try:
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise RowError(f"unparseable timestamp {raw!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def format_timestamp(epoch: int) -> str:
    dt = datetime.fromtimestamp(epoch, tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True, order=True)
class EventRecord:
    """One logged action: a performer acting on an artifact at an instant."""

    artifact_id: str
    timestamp: int
    performer_id: str
    activity: str = ""
    size_delta: int | None = None

    def __post_init__(self) -> None:
        if not self.artifact_id:
            raise RowError("artifact_id must be non-empty")
        if not self.performer_id:
            raise RowError("performer_id must be non-empty")


@dataclass
class EventLog:
    """A collection of events with a per-artifact positional index."""

    events: list[EventRecord]
    skipped_rows: int = 0
    _index: dict[str, list[int]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._rebuild_index()

    def _rebuild_index(self) -> None:
        self._index = {}
        for pos, ev in enumerate(self.events):
            self._index.setdefault(ev.artifact_id, []).append(pos)

    @property
    def artifact_ids(self) -> list[str]:
        return sorted(self._index)

    def events_for(self, artifact_id: str) -> list[EventRecord]:
        return [self.events[i] for i in self._index.get(artifact_id, [])]

    def __len__(self) -> int:
        return len(self.events)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventLog):
            return NotImplemented
        return self.events == other.events


def _record_from_mapping(row: Mapping[str, object]) -> EventRecord:
    missing = [k for k in ("artifact_id", "performer_id", "timestamp") if k not in row]
    if missing:
        raise SchemaError(f"missing required column(s): {', '.join(missing)}")
    ts_raw = row["timestamp"]
    ts = ts_raw if isinstance(ts_raw, int) else parse_timestamp(str(ts_raw))
    size_raw = row.get("size_delta")
    size: int | None = None
    if size_raw is not None and str(size_raw).strip() != "":
        try:
            size = int(size_raw)  # type: ignore[arg-type]
        except (TypeError, ValueError) as exc:
            raise RowError(f"bad size_delta {size_raw!r}") from exc
    return EventRecord(
        artifact_id=str(row["artifact_id"]),
        performer_id=str(row["performer_id"]),
        activity=str(row.get("activity") or ""),
        timestamp=ts,
        size_delta=size,
    )


def _iter_csv(stream: io.TextIOBase) -> Iterator[Mapping[str, object]]:
    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        return
    missing = [c for c in ("artifact_id", "performer_id", "timestamp") if c not in reader.fieldnames]
    if missing:
        raise SchemaError(f"missing required column(s): {', '.join(missing)}")
    for row in reader:
        yield row


def _iter_jsonl(stream: io.TextIOBase) -> Iterator[Mapping[str, object]]:
    for line in stream:
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RowError(f"bad JSON line: {exc}") from exc
        yield obj


def parse_event_log(stream, format: str = "csv", strict: bool = False) -> EventLog:
    """Parse a CSV or JSONL event stream.

    Malformed rows are skipped and counted in ``EventLog.skipped_rows``
    unless ``strict`` is set, in which case the first bad row raises.
    Missing required columns always raise :class:`SchemaError`.
    """
    if isinstance(stream, (bytes, bytearray)):
        stream = io.StringIO(stream.decode("utf-8"))
    elif isinstance(stream, str):
        stream = io.StringIO(stream)
    elif isinstance(stream, (io.RawIOBase, io.BufferedIOBase)):
        stream = io.TextIOWrapper(stream, encoding="utf-8")

    if format == "csv":
        rows = _iter_csv(stream)
    elif format == "jsonl":
        rows = _iter_jsonl(stream)
    else:
        raise ValueError(f"unknown format {format!r}")

    events: list[EventRecord] = []
    skipped = 0
    for row in rows:
        try:
            events.append(_record_from_mapping(row))
        except SchemaError:
            raise
        except RowError:
            if strict:
                raise
            skipped += 1
    return EventLog(events=events, skipped_rows=skipped)


def serialize_event_log(log: EventLog, format: str = "csv") -> str:
    """Serialize to the documented CSV or JSONL layout (inverse of parse)."""
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for ev in log.events:
            writer.writerow([
                ev.artifact_id,
                ev.performer_id,
                ev.activity,
                format_timestamp(ev.timestamp),
                "" if ev.size_delta is None else ev.size_delta,
            ])
        return buf.getvalue()
    if format == "jsonl":
        lines = []
        for ev in log.events:
            obj: dict[str, object] = {
                "artifact_id": ev.artifact_id,
                "performer_id": ev.performer_id,
                "activity": ev.activity,
                "timestamp": format_timestamp(ev.timestamp),
            }
            if ev.size_delta is not None:
                obj["size_delta"] = ev.size_delta
            lines.append(json.dumps(obj, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")
    raise ValueError(f"unknown format {format!r}")


def normalize(log: EventLog) -> EventLog:
    """Sort per-artifact by (timestamp, performer_id) and drop exact duplicates.

    Duplicate means identical (artifact, performer, timestamp); the first
    occurrence is kept.  Idempotent.  Ties on identical timestamps break by
    performer_id so downstream sequences are reproducible.
    """
    seen: set[tuple[str, str, int]] = set()
    kept: list[EventRecord] = []
    for ev in log.events:
        key = (ev.artifact_id, ev.performer_id, ev.timestamp)
        if key in seen:
            continue
        seen.add(key)
        kept.append(ev)
    kept.sort(key=lambda e: (e.artifact_id, e.timestamp, e.performer_id))
    return EventLog(events=kept, skipped_rows=log.skipped_rows)
