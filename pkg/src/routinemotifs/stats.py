"""Significance testing of motif frequencies against a label-independence null.

Under the null, adjacent labels are independent, so a motif's expected
fraction is the product of its labels' unigram marginal fractions.  A
motif's observed fraction is compared to that expectation with a
two-tailed Z-test using the null variance, and p-values are adjusted with
the Bonferroni correction.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from scipy.stats import norm

from .labeling import ALPHABET, LabelSequence, RecencyLabel
from .mining import Motif, MotifCounts, motif_to_string


class DegenerateNullError(ValueError):
    """Expected fraction is 0 or 1, so the null variance vanishes."""


class ConsistencyError(ValueError):
    """Motif counts and marginals do not come from the same corpus."""


@dataclass
class MarginalFrequencies:
    """Unigram label fractions over a corpus of sessions."""

    counts: dict[RecencyLabel, int]
    total: int

    def fraction(self, label: RecencyLabel) -> float:
        return self.counts.get(label, 0) / self.total

    def rounded_fraction(self, label: RecencyLabel) -> float:
        """Fraction rounded to a whole percent (compatibility display mode)."""
        return round(self.fraction(label) * 100) / 100


def marginals(seqs: Sequence[LabelSequence]) -> MarginalFrequencies:
    counts: Counter = Counter()
    for seq in seqs:
        counts.update(seq.labels)
    total = sum(counts.values())
    if total == 0:
        raise ValueError("cannot compute marginals of an empty corpus")
    return MarginalFrequencies(counts=dict(counts), total=total)


def marginals_from_counts(counts: dict[RecencyLabel, int]) -> MarginalFrequencies:
    total = sum(counts.values())
    if total == 0:
        raise ValueError("cannot compute marginals of an empty corpus")
    return MarginalFrequencies(counts=dict(counts), total=total)


def expected_fraction(
    motif: Motif, marg: MarginalFrequencies, rounded: bool = False
) -> float:
    """Product of per-label marginal fractions; ``rounded`` uses whole-percent marginals."""
    product = 1.0
    for label in motif:
        product *= marg.rounded_fraction(label) if rounded else marg.fraction(label)
    return product


def z_score(observed_count: int, window_total: int, p_expected: float) -> float:
    """Proportion Z statistic against the null expectation.

    Positive means above chance.  Uses the null variance
    p(1-p)/N, which is what makes published motif scores reproducible.
    """
    if window_total < 1:
        raise ValueError("window_total must be >= 1")
    if not 0.0 < p_expected < 1.0:
        raise DegenerateNullError(f"degenerate null p={p_expected}")
    observed_fraction = observed_count / window_total
    return (observed_fraction - p_expected) / math.sqrt(
        p_expected * (1.0 - p_expected) / window_total
    )


def two_tailed_p(z: float) -> float:
    """Two-tailed standard normal tail mass; underflows to 0 for extreme z."""
    return float(2.0 * norm.sf(abs(z)))


def bonferroni(p_raw: float, m: int) -> float:
    if m < 1:
        raise ValueError("comparison count must be >= 1")
    return min(1.0, m * p_raw)


@dataclass
class MotifStats:
    """One motif's observed/expected frequencies and test results."""

    motif: Motif
    observed_count: int
    observed_fraction: float
    expected_fraction: float
    z: float | None
    p_raw: float | None
    p_adjusted: float | None
    comparisons_m: int
    significant: bool
    degenerate_null: bool = False

    def to_dict(self) -> dict[str, object]:
        return {
            "motif": motif_to_string(self.motif),
            "observed_count": self.observed_count,
            "observed_fraction": self.observed_fraction,
            "expected_fraction": self.expected_fraction,
            "z": self.z,
            "p_raw": self.p_raw,
            "p_adjusted": self.p_adjusted,
            "comparisons_m": self.comparisons_m,
            "significant": self.significant,
            "degenerate_null": self.degenerate_null,
        }


def significance_report(
    counts: MotifCounts,
    marg: MarginalFrequencies,
    alpha: float = 0.001,
    m_mode: str = "alphabet_power",
    rounded_expected: bool = False,
) -> list[MotifStats]:
    """Test every counted motif, sorted by |z| descending (count breaks ties).

    ``m_mode`` selects the Bonferroni comparison count: "alphabet_power"
    uses 6^k, "tested_count" uses the number of motifs in ``counts``.
    Motifs with a degenerate null (expected fraction 0 or 1) are reported
    with z undefined and flagged instead of raising.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if counts.window_total > max(0, marg.total - (counts.k - 1)):
        raise ConsistencyError(
            f"window_total {counts.window_total} impossible for {marg.total} sessions at k={counts.k}"
        )
    if m_mode == "alphabet_power":
        m = len(ALPHABET) ** counts.k
    elif m_mode == "tested_count":
        m = max(1, len(counts.counts))
    else:
        raise ValueError(f"unknown m_mode {m_mode!r}")

    # When p_raw underflows to exactly 0, significance is decided by the
    # z threshold equivalent to the corrected alpha.
    z_cutoff = float(norm.isf(alpha / m / 2.0))

    results: list[MotifStats] = []
    for motif, observed in counts.counts.items():
        p_exp = expected_fraction(motif, marg, rounded=rounded_expected)
        observed_fraction = observed / counts.window_total if counts.window_total else 0.0
        if not 0.0 < p_exp < 1.0:
            results.append(
                MotifStats(
                    motif=motif,
                    observed_count=observed,
                    observed_fraction=observed_fraction,
                    expected_fraction=p_exp,
                    z=None,
                    p_raw=None,
                    p_adjusted=None,
                    comparisons_m=m,
                    significant=False,
                    degenerate_null=True,
                )
            )
            continue
        z = z_score(observed, counts.window_total, p_exp)
        p_raw = two_tailed_p(z)
        p_adj = bonferroni(p_raw, m)
        significant = p_adj < alpha if p_raw > 0.0 else abs(z) > z_cutoff
        results.append(
            MotifStats(
                motif=motif,
                observed_count=observed,
                observed_fraction=observed_fraction,
                expected_fraction=p_exp,
                z=z,
                p_raw=p_raw,
                p_adjusted=p_adj,
                comparisons_m=m,
                significant=significant,
            )
        )
    results.sort(
        key=lambda s: (
            -(abs(s.z) if s.z is not None else -1.0),
            -s.observed_count,
            motif_to_string(s.motif),
        )
    )
    return results


def write_stats_json(reports: Iterable[tuple[int, list[MotifStats]]], path, meta: dict | None = None) -> None:
    payload = {
        "meta": meta or {},
        "reports": [
            {"k": k, "motifs": [s.to_dict() for s in stats]} for k, stats in reports
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
