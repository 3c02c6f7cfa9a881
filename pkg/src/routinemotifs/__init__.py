"""Behavioral motif mining for collaboration event logs.

Pipeline: parse an event log, collapse events into editing sessions,
code each session with a contributor-recency label (A-F), enumerate
k-gram motifs, and test their frequencies against a label-independence
null model with Bonferroni-corrected two-tailed Z-tests.
"""

__version__ = "0.1.0"

from .events import EventLog, EventRecord, normalize, parse_event_log, serialize_event_log
from .labeling import (
    FirstEditIndex,
    LabelSequence,
    RecencyBuckets,
    RecencyLabel,
    label_corpus,
    label_sessions,
)
from .mining import MotifCounts, count_motifs, filter_by_support, motif_from_string, motif_to_string
from .sessions import Session, SessionVector, sessionize, sessionize_corpus
from .stats import (
    MarginalFrequencies,
    MotifStats,
    bonferroni,
    expected_fraction,
    marginals,
    significance_report,
    z_score,
)
from .summary import LabelSummary, summarize_labels

__all__ = [
    "EventLog",
    "EventRecord",
    "FirstEditIndex",
    "LabelSequence",
    "LabelSummary",
    "MarginalFrequencies",
    "MotifCounts",
    "MotifStats",
    "RecencyBuckets",
    "RecencyLabel",
    "Session",
    "SessionVector",
    "bonferroni",
    "count_motifs",
    "expected_fraction",
    "filter_by_support",
    "label_corpus",
    "label_sessions",
    "marginals",
    "motif_from_string",
    "motif_to_string",
    "normalize",
    "parse_event_log",
    "serialize_event_log",
    "sessionize",
    "sessionize_corpus",
    "significance_report",
    "summarize_labels",
    "z_score",
]
