"""Scikit-learn style transformer wrappers around the pipeline stages.

Each stage is a stateless transform over domain objects (event logs,
session vectors, label sequences), so the wrappers implement the
fit/transform/get_params protocol and compose with sklearn pipelines and
cloning.  The functional API underneath remains the source of truth.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin

from .analytics import EditCosts, cluster_sequences, distance_matrix, transition_matrix
from .labeling import FirstEditIndex, RecencyBuckets, label_sessions
from .mining import count_motifs, filter_by_support
from .sessions import DEFAULT_GAP_SECONDS, sessionize
from .stats import marginals, significance_report


class Sessionizer(BaseEstimator, TransformerMixin):
    """EventLog -> list of SessionVector."""

    def __init__(self, gap_threshold: int = DEFAULT_GAP_SECONDS):
        self.gap_threshold = gap_threshold

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        return [sessionize(X.events_for(a), self.gap_threshold) for a in X.artifact_ids]


class RecencyLabeler(BaseEstimator, TransformerMixin):
    """list of SessionVector -> list of LabelSequence."""

    def __init__(self, first_edits: FirstEditIndex | None = None, c_lo: int = 3, c_hi: int = 5):
        self.first_edits = first_edits
        self.c_lo = c_lo
        self.c_hi = c_hi

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        buckets = RecencyBuckets(c_lo=self.c_lo, c_hi=self.c_hi)
        return [label_sessions(vec, self.first_edits, buckets) for vec in X]


class MotifCounter(BaseEstimator, TransformerMixin):
    """list of LabelSequence -> MotifCounts for one motif length."""

    def __init__(self, k: int = 2, min_count: int = 0, inclusive: bool = True):
        self.k = k
        self.min_count = min_count
        self.inclusive = inclusive

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        counts = count_motifs(X, self.k)
        if self.min_count:
            counts = filter_by_support(counts, self.min_count, self.inclusive)
        return counts


class MotifSignificance(BaseEstimator):
    """Fits marginals on a label corpus, then scores MotifCounts against them."""

    def __init__(self, alpha: float = 0.001, m_mode: str = "alphabet_power"):
        self.alpha = alpha
        self.m_mode = m_mode

    def fit(self, X, y=None):
        self.marginals_ = marginals(X)
        return self

    def score_counts(self, counts):
        return significance_report(counts, self.marginals_, alpha=self.alpha, m_mode=self.m_mode)


class TransitionEstimator(BaseEstimator):
    """Fits a first-order label transition matrix on a label corpus."""

    def fit(self, X, y=None):
        self.matrix_ = transition_matrix(X)
        return self


class SequenceClusterer(BaseEstimator):
    """Agglomerative clustering of label sequences by edit distance."""

    def __init__(self, n_clusters: int = 2, linkage: str = "average",
                 insert_cost: float = 1.0, delete_cost: float = 1.0, substitute_cost: float = 1.0):
        self.n_clusters = n_clusters
        self.linkage = linkage
        self.insert_cost = insert_cost
        self.delete_cost = delete_cost
        self.substitute_cost = substitute_cost

    def fit(self, X, y=None):
        costs = EditCosts(self.insert_cost, self.delete_cost, self.substitute_cost)
        self.distance_matrix_ = distance_matrix(X, costs)
        self.labels_ = cluster_sequences(self.distance_matrix_, self.linkage, self.n_clusters)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_
