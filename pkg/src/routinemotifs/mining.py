"""K-gram motif enumeration over label sequences.

Windows slide within one artifact's sequence only; a sequence of length
L contributes max(0, L - k + 1) windows, so the corpus window total is
the sum of that quantity over artifacts.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .labeling import LabelSequence, RecencyLabel

K_MAX_DEFAULT = 10

# Support-threshold defaults per motif length: (min_count, inclusive?).
DEFAULT_SUPPORT: dict[int, tuple[int, bool]] = {2: (200, True), 3: (100, False), 4: (50, False)}

Motif = tuple[RecencyLabel, ...]


def motif_from_string(text: str) -> Motif:
    return tuple(RecencyLabel(ch) for ch in text)


def motif_to_string(motif: Motif) -> str:
    return "".join(l.value for l in motif)


@dataclass
class MotifCounts:
    """Exact window tallies for one motif length."""

    k: int
    counts: Counter = field(default_factory=Counter)
    window_total: int = 0

    def fraction(self, motif: Motif) -> float:
        if self.window_total == 0:
            return 0.0
        return self.counts.get(motif, 0) / self.window_total


def count_motifs(seqs: Sequence[LabelSequence], k: int, k_max: int = K_MAX_DEFAULT) -> MotifCounts:
    """Count every length-k window of every sequence, never spanning artifacts."""
    if k < 2:
        raise ValueError("motif length must be >= 2")
    if k > k_max:
        raise ValueError(f"motif length must be <= {k_max}")
    counts: Counter = Counter()
    window_total = 0
    for seq in seqs:
        labels = seq.labels
        n_windows = max(0, len(labels) - k + 1)
        window_total += n_windows
        for i in range(n_windows):
            counts[tuple(labels[i : i + k])] += 1
    return MotifCounts(k=k, counts=counts, window_total=window_total)


def filter_by_support(
    counts: MotifCounts, min_count: int, inclusive: bool = True
) -> MotifCounts:
    """Drop motifs below the support threshold; window_total is unchanged."""
    if inclusive:
        kept = Counter({m: c for m, c in counts.counts.items() if c >= min_count})
    else:
        kept = Counter({m: c for m, c in counts.counts.items() if c > min_count})
    return MotifCounts(k=counts.k, counts=kept, window_total=counts.window_total)


def default_support_filter(counts: MotifCounts) -> MotifCounts:
    """Apply the default per-length support threshold, if one is configured."""
    spec = DEFAULT_SUPPORT.get(counts.k)
    if spec is None:
        return counts
    min_count, inclusive = spec
    return filter_by_support(counts, min_count, inclusive)


def write_motifs_json(by_k: Iterable[MotifCounts], path) -> None:
    payload = [
        {
            "k": mc.k,
            "window_total": mc.window_total,
            "motifs": [
                {
                    "motif": motif_to_string(m),
                    "count": c,
                    "fraction": c / mc.window_total if mc.window_total else 0.0,
                }
                for m, c in sorted(mc.counts.items(), key=lambda kv: (-kv[1], kv[0]))
            ],
        }
        for mc in by_k
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_motifs_json(path) -> list[MotifCounts]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    result = []
    for entry in payload:
        counts = Counter(
            {motif_from_string(rec["motif"]): int(rec["count"]) for rec in entry["motifs"]}
        )
        result.append(
            MotifCounts(k=int(entry["k"]), counts=counts, window_total=int(entry["window_total"]))
        )
    return result
