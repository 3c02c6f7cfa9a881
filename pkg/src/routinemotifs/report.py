"""End-to-end pipeline orchestration and table rendering.

A run executes parse -> sessionize -> label -> mine -> stats -> summarize,
persists every intermediate, and renders machine-diffable CSV tables.
Given identical inputs and config the bundle is byte-identical apart from
the timestamp field inside run metadata.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .events import normalize, parse_event_log
from .labeling import FirstEditIndex, label_corpus, write_labels_jsonl
from .mining import (
    DEFAULT_SUPPORT,
    MotifCounts,
    count_motifs,
    filter_by_support,
    motif_to_string,
    write_motifs_json,
)
from .sessions import DEFAULT_GAP_SECONDS, sessionize_corpus, write_sessions_jsonl
from .stats import MotifStats, marginals, significance_report, write_stats_json
from .summary import summarize_labels, write_summary_csv


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name for diagnostics."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    events_path: Path
    out_dir: Path
    events_format: str = "csv"
    first_edits_path: Path | None = None
    gap_threshold: int = DEFAULT_GAP_SECONDS
    k_min: int = 2
    k_max: int = 4
    support: dict[int, tuple[int, bool]] = field(default_factory=lambda: dict(DEFAULT_SUPPORT))
    alpha: float = 0.001
    m_mode: str = "alphabet_power"
    duration_unit: str = "hours"

    def __post_init__(self) -> None:
        self.events_path = Path(self.events_path)
        self.out_dir = Path(self.out_dir)
        if self.first_edits_path is not None:
            self.first_edits_path = Path(self.first_edits_path)
        if not (2 <= self.k_min <= self.k_max <= 10):
            raise ValueError("k range must satisfy 2 <= k_min <= k_max <= 10")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")

    @classmethod
    def from_json(cls, path) -> "PipelineConfig":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        support = {
            int(k): (int(v[0]), bool(v[1])) for k, v in obj.pop("support", {}).items()
        } or dict(DEFAULT_SUPPORT)
        return cls(support=support, **obj)

    def to_dict(self) -> dict[str, object]:
        return {
            "events_path": str(self.events_path),
            "events_format": self.events_format,
            "first_edits_path": None if self.first_edits_path is None else str(self.first_edits_path),
            "gap_threshold": self.gap_threshold,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "support": {str(k): list(v) for k, v in sorted(self.support.items())},
            "alpha": self.alpha,
            "m_mode": self.m_mode,
            "duration_unit": self.duration_unit,
        }


FAMILY_ORDER = ["solo", "reactive", "inactive", "distinctive", "unclassified"]


def classify_motif(stats: MotifStats) -> str:
    """Heuristic family tag, first match wins in FAMILY_ORDER.

    solo: an uninterrupted same-performer run (all A, optional E prefix);
    reactive: contains a ping-pong (two or more consecutive B);
    inactive: newcomers and dormant returners only (E, or E/D mix);
    distinctive: a previously-active performer followed by a newcomer
    (an A/B/C -> E transition) occurring below chance.
    """
    text = motif_to_string(stats.motif)
    stripped = text.lstrip("E")
    if stripped and set(stripped) == {"A"}:
        return "solo"
    if "BB" in text:
        return "reactive"
    if set(text) <= {"E", "D"}:
        return "inactive"
    below_chance = stats.z is not None and stats.z < 0
    if below_chance and any(pair in text for pair in ("AE", "BE", "CE")):
        return "distinctive"
    return "unclassified"


def classify_motif_families(stats: Sequence[MotifStats]) -> list[tuple[MotifStats, str]]:
    return [(s, classify_motif(s)) for s in stats]


def _write_csv(path: Path, header: list[str], rows: list[list[object]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt_pct(x: float) -> str:
    return f"{x * 100:.2f}"


@dataclass
class ReportBundle:
    out_dir: Path
    files: list[str]

    def hash(self, exclude: tuple[str, ...] = ("metadata.json",)) -> str:
        """SHA-256 over the bundle's files, skipping the metadata record."""
        digest = hashlib.sha256()
        for name in sorted(self.files):
            if name in exclude:
                continue
            digest.update(name.encode())
            digest.update((self.out_dir / name).read_bytes())
        return digest.hexdigest()


def run_pipeline(config: PipelineConfig) -> ReportBundle:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    failed_marker = out / "FAILED"
    if failed_marker.exists():
        failed_marker.unlink()
    files: list[str] = []

    def stage(name: str, fn):
        try:
            return fn()
        except Exception as exc:
            failed_marker.write_text(f"{name}: {exc}\n", encoding="utf-8")
            raise StageError(name, exc) from exc

    raw = stage("parse", lambda: parse_event_log(
        config.events_path.read_text(encoding="utf-8"), config.events_format))
    log = stage("normalize", lambda: normalize(raw))
    corpus_hash = hashlib.sha256(config.events_path.read_bytes()).hexdigest()

    vectors = stage("sessionize", lambda: sessionize_corpus(log, config.gap_threshold))
    write_sessions_jsonl(vectors, out / "sessions.jsonl")
    files.append("sessions.jsonl")

    first_edits = (
        FirstEditIndex.from_csv(config.first_edits_path)
        if config.first_edits_path
        else FirstEditIndex()
    )
    seqs, _ = stage("label", lambda: label_corpus(vectors, first_edits))
    write_labels_jsonl(seqs, out / "labels.jsonl")
    files.append("labels.jsonl")

    marg = stage("marginals", lambda: marginals(seqs))

    mined: list[MotifCounts] = []
    filtered: list[MotifCounts] = []
    for k in range(config.k_min, config.k_max + 1):
        counts = stage(f"mine-k{k}", lambda k=k: count_motifs(seqs, k))
        mined.append(counts)
        min_count, inclusive = config.support.get(k, (1, True))
        filtered.append(filter_by_support(counts, min_count, inclusive))
    write_motifs_json(mined, out / "motifs.json")
    files.append("motifs.json")

    reports = [
        (mc.k, stage(f"stats-k{mc.k}", lambda mc=mc: significance_report(
            mc, marg, alpha=config.alpha, m_mode=config.m_mode)))
        for mc in filtered
    ]
    write_stats_json(reports, out / "stats.json", meta={"alpha": config.alpha, "m_mode": config.m_mode})
    files.append("stats.json")

    summaries = stage("summary", lambda: summarize_labels(vectors, seqs))
    write_summary_csv(summaries, out / "table_label_summary.csv", config.duration_unit)
    files.append("table_label_summary.csv")

    # Most frequent motifs per length.
    freq_rows: list[list[object]] = []
    for mc in filtered:
        ordered = sorted(mc.counts.items(), key=lambda kv: (-kv[1], motif_to_string(kv[0])))
        for motif, count in ordered:
            freq_rows.append([
                mc.k, motif_to_string(motif), count,
                _fmt_pct(count / mc.window_total) if mc.window_total else "",
            ])
    _write_csv(out / "table_frequent_motifs.csv",
               ["k", "motif", "count", "fraction_pct"], freq_rows)
    files.append("table_frequent_motifs.csv")

    # Top |z| motifs per length.
    z_rows: list[list[object]] = []
    for k, stats_list in reports:
        for s in stats_list:
            z_rows.append([
                k, motif_to_string(s.motif), _fmt_pct(s.expected_fraction),
                _fmt_pct(s.observed_fraction),
                "" if s.z is None else f"{s.z:.1f}",
                "yes" if s.significant else "no",
            ])
    _write_csv(out / "table_top_z.csv",
               ["k", "motif", "expected_pct", "observed_pct", "z", "significant"], z_rows)
    files.append("table_top_z.csv")

    # Heuristic family groupings.
    family_rows: list[list[object]] = []
    for k, stats_list in reports:
        for s, family in classify_motif_families(stats_list):
            family_rows.append([
                k, motif_to_string(s.motif), family, s.observed_count,
                "" if s.z is None else f"{s.z:.1f}",
            ])
    family_rows.sort(key=lambda r: (FAMILY_ORDER.index(str(r[2])), r[0], str(r[1])))
    _write_csv(out / "table_motif_families.csv",
               ["k", "motif", "family", "count", "z"], family_rows)
    files.append("table_motif_families.csv")

    metadata = {
        "config": config.to_dict(),
        "corpus_sha256": corpus_hash,
        "version": __version__,
        "events": len(log),
        "skipped_rows": log.skipped_rows,
        "artifacts": len(log.artifact_ids),
        "sessions": sum(len(v) for v in vectors),
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    (out / "metadata.json").write_text(
        json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    files.append("metadata.json")

    return ReportBundle(out_dir=out, files=files)
