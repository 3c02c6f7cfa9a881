"""Recency labeling of session vectors.

Each session is coded by how many sessions ago its performer was last
active in the same artifact: A (previous session), B (two back),
C (3-5 back), D (six or more back), E (first session in this artifact),
F (first session on the whole platform).  Bucket boundaries are
configurable but default to the standard 1 / 2 / 3-5 / >=6 split.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

from .events import format_timestamp, parse_timestamp
from .sessions import PreconditionError, Session, SessionVector


class RecencyLabel(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    F = "F"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


ALPHABET: tuple[RecencyLabel, ...] = tuple(RecencyLabel)


@dataclass(frozen=True)
class RecencyBuckets:
    """Distance-to-label boundaries: d=1 -> A, d=2 -> B, c_lo<=d<=c_hi -> C, d>c_hi -> D."""

    c_lo: int = 3
    c_hi: int = 5

    def label_for_distance(self, d: int) -> RecencyLabel:
        if d < 1:
            raise ValueError("distance must be >= 1")
        if d == 1:
            return RecencyLabel.A
        if d == 2:
            return RecencyLabel.B
        if self.c_lo <= d <= self.c_hi:
            return RecencyLabel.C
        return RecencyLabel.D


@dataclass
class FirstEditIndex:
    """performer_id -> epoch seconds of that performer's first platform activity."""

    first_edits: dict[str, int] = field(default_factory=dict)

    def get(self, performer_id: str) -> int | None:
        return self.first_edits.get(performer_id)

    @classmethod
    def from_csv(cls, path) -> "FirstEditIndex":
        index: dict[str, int] = {}
        with open(path, encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "performer_id" not in reader.fieldnames:
                raise ValueError("first-edits CSV needs performer_id,first_edit_timestamp")
            for row in reader:
                index[row["performer_id"]] = parse_timestamp(row["first_edit_timestamp"])
        return cls(first_edits=index)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["performer_id", "first_edit_timestamp"])
            for pid in sorted(self.first_edits):
                writer.writerow([pid, format_timestamp(self.first_edits[pid])])


@dataclass
class LabelSequence:
    """An artifact's ordered recency labels, parallel to its session ordinals."""

    artifact_id: str
    labels: list[RecencyLabel]
    ordinals: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.ordinals:
            self.ordinals = list(range(1, len(self.labels) + 1))

    def __len__(self) -> int:
        return len(self.labels)

    def as_string(self) -> str:
        return "".join(l.value for l in self.labels)


LabelingHook = Callable[[Session, int | None, "FirstEditIndex"], RecencyLabel]


def _default_hook(buckets: RecencyBuckets) -> LabelingHook:
    def hook(session: Session, prev_ordinal: int | None, first_edits: FirstEditIndex) -> RecencyLabel:
        if prev_ordinal is not None:
            return buckets.label_for_distance(session.ordinal - prev_ordinal)
        first = first_edits.get(session.performer_id)
        if first is not None and first == session.start:
            return RecencyLabel.F
        return RecencyLabel.E

    return hook


def label_sessions(
    vec: SessionVector,
    first_edits: FirstEditIndex | None = None,
    buckets: RecencyBuckets = RecencyBuckets(),
    hook: LabelingHook | None = None,
) -> LabelSequence:
    """Label one artifact's sessions by performer recency.

    F (new to the platform) requires the performer's recorded first platform
    edit to coincide with this session's start; an unknown performer is
    labeled E, never F.
    """
    if not vec.sessions:
        raise PreconditionError("cannot label an empty session vector")
    for expected, sess in enumerate(vec.sessions, start=1):
        if sess.ordinal != expected:
            raise PreconditionError(
                f"session ordinals must be consecutive 1..n, got {sess.ordinal} at position {expected}"
            )
    first_edits = first_edits or FirstEditIndex()
    hook = hook or _default_hook(buckets)

    last_seen: dict[str, int] = {}
    labels: list[RecencyLabel] = []
    for sess in vec.sessions:
        prev = last_seen.get(sess.performer_id)
        labels.append(hook(sess, prev, first_edits))
        last_seen[sess.performer_id] = sess.ordinal
    return LabelSequence(artifact_id=vec.artifact_id, labels=labels)


def label_corpus(
    vectors: Sequence[SessionVector],
    first_edits: FirstEditIndex | None = None,
    buckets: RecencyBuckets = RecencyBuckets(),
) -> tuple[list[LabelSequence], Counter]:
    """Label every vector; also return the aggregate label histogram."""
    seqs = [label_sessions(vec, first_edits, buckets) for vec in vectors]
    histogram: Counter = Counter()
    for seq in seqs:
        histogram.update(seq.labels)
    return seqs, histogram


def write_labels_jsonl(seqs: Iterable[LabelSequence], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for seq in seqs:
            fh.write(
                json.dumps(
                    {"artifact_id": seq.artifact_id, "labels": seq.as_string()},
                    sort_keys=True,
                )
                + "\n"
            )


def read_labels_jsonl(path) -> list[LabelSequence]:
    seqs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            seqs.append(
                LabelSequence(
                    artifact_id=obj["artifact_id"],
                    labels=[RecencyLabel(ch) for ch in obj["labels"]],
                )
            )
    return seqs
