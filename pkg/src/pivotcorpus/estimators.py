"""scikit-learn compatible wrappers around the pipeline stages.

The stages hold no learned state; ``fit`` only validates parameters, so the
objects can be cloned, grid-searched and chained in a ``Pipeline``::

    Pipeline([("sync", PivotSynchronizer()),
              ("rebuild", SentenceRebuilder(strategy="pivot")),
              ("count", TokenCounter(side="a", profile="arabic"))])
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .aligner import DEFAULT_PRIORS, AlignerParams, align
from .corpus import length_stats
from .pivot import aggregate, pivot_align
from .rebuild import PunctProfile, RebuildStrategy, SentenceUnit, rebuild
from .textproc import tokenize
from .validation import check_quad, check_segments, check_triples


class _AlignerParamsMixin:
    def _aligner_params(self):
        return AlignerParams(
            bead_priors=dict(self.bead_priors) if self.bead_priors is not None else dict(DEFAULT_PRIORS),
            length_ratio_mean=self.length_ratio_mean,
            length_ratio_var=self.length_ratio_var,
            lexical_pass=self.lexical_pass,
            lexical_weight=self.lexical_weight,
            band_width=self.band_width,
        )


class GaleChurchAligner(_AlignerParamsMixin, BaseEstimator, TransformerMixin):
    """Transforms ``(src_segments, tgt_segments)`` pairs into AlignmentMaps."""

    def __init__(self, bead_priors=None, length_ratio_mean=1.0, length_ratio_var=6.8,
                 lexical_pass=False, lexical_weight=0.5, band_width=None):
        self.bead_priors = bead_priors
        self.length_ratio_mean = length_ratio_mean
        self.length_ratio_var = length_ratio_var
        self.lexical_pass = lexical_pass
        self.lexical_weight = lexical_weight
        self.band_width = band_width

    def fit(self, X=None, y=None):
        self.params_ = self._aligner_params()
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        out = []
        for k, pair in enumerate(X):
            src, tgt = pair
            out.append(align(check_segments(src, f"X[{k}][0]"), check_segments(tgt, f"X[{k}][1]"), self.params_))
        return out


class PivotSynchronizer(_AlignerParamsMixin, BaseEstimator, TransformerMixin):
    """Transforms talk tuples ``(pivot, a, b)`` or ``(pivot_a, a, pivot_b, b)`` into lists of AlignedTriples.

    After ``transform`` the per-talk divergence reports are kept in
    ``reports_`` and their sum in ``divergence_``.
    """

    def __init__(self, bead_priors=None, length_ratio_mean=1.0, length_ratio_var=6.8,
                 lexical_pass=False, lexical_weight=0.5, band_width=None):
        self.bead_priors = bead_priors
        self.length_ratio_mean = length_ratio_mean
        self.length_ratio_var = length_ratio_var
        self.lexical_pass = lexical_pass
        self.lexical_weight = lexical_weight
        self.band_width = band_width

    def fit(self, X=None, y=None):
        self.params_ = self._aligner_params()
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        results = [pivot_align(*check_quad(item), self.params_) for item in X]
        self.reports_ = [r.report for r in results]
        self.divergence_ = aggregate(self.reports_)
        return [r.triples for r in results]


class SentenceRebuilder(BaseEstimator, TransformerMixin):
    """Transforms per-talk triple lists into per-talk SentenceUnit lists."""

    def __init__(self, strategy="pivot", punct=None):
        self.strategy = strategy
        self.punct = punct

    def fit(self, X=None, y=None):
        strategy = self.strategy
        self.strategy_ = strategy if isinstance(strategy, RebuildStrategy) else RebuildStrategy.parse(strategy)
        self.punct_ = self.punct if self.punct is not None else PunctProfile()
        return self

    def transform(self, X):
        check_is_fitted(self, "strategy_")
        return [rebuild(check_triples(triples, f"X[{k}]"), self.strategy_, self.punct_) for k, triples in enumerate(X)]


class TokenCounter(BaseEstimator, TransformerMixin):
    """Per-sentence token counts for one side, flattened over talks."""

    def __init__(self, side="a", profile="default"):
        self.side = side
        self.profile = profile

    def fit(self, X=None, y=None):
        if self.side not in ("pivot", "a", "b"):
            raise ValueError(f"side must be 'pivot', 'a' or 'b', got {self.side!r}")
        self.n_sentences_ = None
        return self

    def transform(self, X):
        check_is_fitted(self, "n_sentences_")
        counts = []
        for units in X:
            for u in units:
                if not isinstance(u, SentenceUnit):
                    raise TypeError(f"expected SentenceUnit, got {type(u).__name__}")
                counts.append(len(tokenize(u.text(self.side), self.profile)))
        self.n_sentences_ = len(counts)
        return np.asarray(counts, dtype=np.int64)

    def stats(self, X):
        return length_stats(self.fit(X).transform(X).tolist())
