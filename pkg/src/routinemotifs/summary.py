"""Per-label descriptive statistics for a labeled session corpus.

For each recency label we report the session count and fraction, mean
session size, mean duration, mean time since the immediately preceding
session in the artifact (any performer), and mean time since the same
performer's previous session (defined only for labels A-D).  Gaps run
from the end of the earlier session to the start of the later one and
are stored in seconds; rendering to hours or days is a display concern.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

from .labeling import ALPHABET, LabelSequence, RecencyLabel
from .sessions import SessionVector

SECONDS_PER_HOUR = 3600.0
SECONDS_PER_DAY = 86400.0


class ConsistencyError(ValueError):
    """Session vectors and label sequences are misaligned."""


@dataclass
class LabelSummary:
    label: RecencyLabel
    count: int
    fraction: float
    mean_size: float | None
    mean_duration: float | None
    mean_gap_prev: float | None
    mean_gap_same: float | None


def _mean(total: float, n: int) -> float | None:
    return total / n if n else None


def summarize_labels(
    vectors: Sequence[SessionVector],
    seqs: Sequence[LabelSequence],
    size_absolute: bool = True,
) -> list[LabelSummary]:
    """Aggregate Table-style per-label statistics over aligned corpora.

    ``size_absolute`` sums |size_delta| per session (treating deltas as
    change magnitudes); when False, signed deltas are summed as-is.
    """
    if len(vectors) != len(seqs):
        raise ConsistencyError("vector and sequence lists differ in length")

    acc: dict[RecencyLabel, dict[str, float]] = {
        lab: {
            "count": 0,
            "size_sum": 0.0,
            "size_n": 0,
            "dur_sum": 0.0,
            "dur_n": 0,
            "gap_prev_sum": 0.0,
            "gap_prev_n": 0,
            "gap_same_sum": 0.0,
            "gap_same_n": 0,
        }
        for lab in ALPHABET
    }

    for vec, seq in zip(vectors, seqs):
        if vec.artifact_id != seq.artifact_id or len(vec) != len(seq):
            raise ConsistencyError(
                f"misaligned artifact {vec.artifact_id!r}: {len(vec)} sessions vs {len(seq)} labels"
            )
        last_end_by_performer: dict[str, int] = {}
        prev_end: int | None = None
        for sess, label in zip(vec.sessions, seq.labels):
            slot = acc[label]
            slot["count"] += 1
            if sess.size_total is not None:
                slot["size_sum"] += abs(sess.size_total) if size_absolute else sess.size_total
                slot["size_n"] += 1
            slot["dur_sum"] += sess.duration
            slot["dur_n"] += 1
            if prev_end is not None:
                slot["gap_prev_sum"] += sess.start - prev_end
                slot["gap_prev_n"] += 1
            same_prev = last_end_by_performer.get(sess.performer_id)
            if same_prev is not None and label in (
                RecencyLabel.A,
                RecencyLabel.B,
                RecencyLabel.C,
                RecencyLabel.D,
            ):
                slot["gap_same_sum"] += sess.start - same_prev
                slot["gap_same_n"] += 1
            last_end_by_performer[sess.performer_id] = sess.end
            prev_end = sess.end

    total = sum(int(acc[lab]["count"]) for lab in ALPHABET)
    summaries = []
    for lab in ALPHABET:
        slot = acc[lab]
        count = int(slot["count"])
        summaries.append(
            LabelSummary(
                label=lab,
                count=count,
                fraction=count / total if total else 0.0,
                mean_size=_mean(slot["size_sum"], int(slot["size_n"])),
                mean_duration=_mean(slot["dur_sum"], int(slot["dur_n"])),
                mean_gap_prev=_mean(slot["gap_prev_sum"], int(slot["gap_prev_n"])),
                mean_gap_same=_mean(slot["gap_same_sum"], int(slot["gap_same_n"])),
            )
        )
    return summaries


def write_summary_csv(summaries: Sequence[LabelSummary], path, duration_unit: str = "hours") -> None:
    """Emit the per-label summary table; gaps render in days, duration per flag."""
    dur_div = SECONDS_PER_HOUR if duration_unit == "hours" else 60.0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["label", "count", "percent", "mean_size", f"mean_duration_{duration_unit}",
             "mean_gap_prev_days", "mean_gap_same_days"]
        )
        for s in summaries:
            writer.writerow([
                s.label.value,
                s.count,
                f"{s.fraction * 100:.2f}",
                "" if s.mean_size is None else f"{s.mean_size:.1f}",
                "" if s.mean_duration is None else f"{s.mean_duration / dur_div:.4f}",
                "" if s.mean_gap_prev is None else f"{s.mean_gap_prev / SECONDS_PER_DAY:.4f}",
                "" if s.mean_gap_same is None else f"{s.mean_gap_same / SECONDS_PER_DAY:.4f}",
            ])
