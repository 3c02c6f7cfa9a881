"""Desk-scale sequence analytics: label transition matrices, pairwise edit
distance, and agglomerative clustering of label sequences."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .labeling import ALPHABET, LabelSequence, RecencyLabel

LABEL_INDEX = {label: i for i, label in enumerate(ALPHABET)}


@dataclass
class TransitionMatrix:
    """Row-normalized first-order transitions between recency labels.

    Bigrams are tallied within artifacts only.  A label with no outgoing
    bigram keeps an all-zero row and is listed in ``zero_rows``.
    """

    probabilities: np.ndarray
    row_counts: np.ndarray
    zero_rows: list[RecencyLabel] = field(default_factory=list)

    @property
    def total_bigrams(self) -> int:
        return int(self.row_counts.sum())


def transition_matrix(seqs: Sequence[LabelSequence]) -> TransitionMatrix:
    n = len(ALPHABET)
    counts = np.zeros((n, n), dtype=np.int64)
    for seq in seqs:
        for a, b in zip(seq.labels, seq.labels[1:]):
            counts[LABEL_INDEX[a], LABEL_INDEX[b]] += 1
    row_counts = counts.sum(axis=1)
    probabilities = np.zeros((n, n), dtype=float)
    zero_rows = []
    for i, label in enumerate(ALPHABET):
        if row_counts[i]:
            probabilities[i] = counts[i] / row_counts[i]
        else:
            zero_rows.append(label)
    return TransitionMatrix(probabilities=probabilities, row_counts=row_counts, zero_rows=zero_rows)


@dataclass(frozen=True)
class EditCosts:
    insert: float = 1.0
    delete: float = 1.0
    substitute: float = 1.0

    def __post_init__(self) -> None:
        if min(self.insert, self.delete, self.substitute) < 0:
            raise ValueError("edit costs must be non-negative")
        if self.substitute > self.insert + self.delete:
            raise ValueError("substitute cost must not exceed insert + delete")


def edit_distance(a: LabelSequence, b: LabelSequence, costs: EditCosts = EditCosts()) -> float:
    """Minimal-cost transformation of sequence a into sequence b."""
    sa, sb = a.labels, b.labels
    prev = [j * costs.insert for j in range(len(sb) + 1)]
    for i in range(1, len(sa) + 1):
        cur = [i * costs.delete] + [0.0] * len(sb)
        for j in range(1, len(sb) + 1):
            sub = prev[j - 1] + (0.0 if sa[i - 1] == sb[j - 1] else costs.substitute)
            cur[j] = min(sub, prev[j] + costs.delete, cur[j - 1] + costs.insert)
        prev = cur
    return prev[len(sb)]


def distance_matrix(seqs: Sequence[LabelSequence], costs: EditCosts = EditCosts()) -> np.ndarray:
    n = len(seqs)
    dm = np.zeros((n, n), dtype=float)
    for i in range(n):
        for j in range(i + 1, n):
            d = edit_distance(seqs[i], seqs[j], costs)
            dm[i, j] = dm[j, i] = d
    return dm


_LINKAGE_UPDATES: dict[str, Callable[[float, float, int, int], float]] = {
    "single": lambda da, db, na, nb: min(da, db),
    "complete": lambda da, db, na, nb: max(da, db),
    "average": lambda da, db, na, nb: (na * da + nb * db) / (na + nb),
}


@dataclass
class Dendrogram:
    """Recorded agglomerative merge order plus a k-cut helper."""

    n: int
    merges: list[tuple[int, int, float]]

    def cut(self, k: int) -> list[int]:
        """Assignment of each leaf to one of k clusters, numbered by first leaf."""
        if not 1 <= k <= self.n:
            raise ValueError(f"k must be in [1, {self.n}]")
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b, _ in self.merges[: self.n - k]:
            ra, rb = find(a), find(b)
            parent[max(ra, rb)] = min(ra, rb)
        roots: dict[int, int] = {}
        assignment = []
        for leaf in range(self.n):
            root = find(leaf)
            if root not in roots:
                roots[root] = len(roots)
            assignment.append(roots[root])
        return assignment


def cluster_sequences(dm: np.ndarray, linkage: str = "average", k: int | None = None):
    """Agglomerative clustering over a precomputed distance matrix.

    Ties on merge distance break deterministically on the lowest (i, j)
    cluster-representative pair.  Returns the dendrogram, or the k-cut
    assignment when ``k`` is given.
    """
    if linkage not in _LINKAGE_UPDATES:
        raise ValueError(f"unknown linkage {linkage!r}")
    update = _LINKAGE_UPDATES[linkage]
    n = dm.shape[0]
    if dm.shape != (n, n):
        raise ValueError("distance matrix must be square")
    dist = {(i, j): float(dm[i, j]) for i in range(n) for j in range(i + 1, n)}
    sizes = {i: 1 for i in range(n)}
    active = set(range(n))
    merges: list[tuple[int, int, float]] = []
    while len(active) > 1:
        best = min(dist.items(), key=lambda kv: (kv[1], kv[0]))
        (a, b), d = best
        merges.append((a, b, d))
        # The merged cluster keeps the lower representative index a.
        for c in active:
            if c in (a, b):
                continue
            ka = (min(a, c), max(a, c))
            kb = (min(b, c), max(b, c))
            dist[ka] = update(dist[ka], dist[kb], sizes[a], sizes[b])
            del dist[kb]
        del dist[(a, b)]
        sizes[a] += sizes.pop(b)
        active.remove(b)
    dendro = Dendrogram(n=n, merges=merges)
    if k is None:
        return dendro
    return dendro.cut(k)
