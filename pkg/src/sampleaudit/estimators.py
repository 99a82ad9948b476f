"""Scikit-learn style estimators wrapping the library's core algorithms.

These follow the fit/transform/predict conventions (parameters in
``__init__``, learned state in trailing-underscore attributes, ``fit``
returns ``self``) so the forensic checks compose with pipelines,
cloning and parameter search.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import baselines, stats, transitions
from .dataset import Dataset, pool_values
from .melspec import MelConfig, mel_filterbank, melspectrogram
from .validation import as_boolean_rolls, as_signal, as_value_array


class DistributionComparator(BaseEstimator):
    """Compare candidate value collections against a fitted reference.

    Parameters
    ----------
    bins : int or None
        Histogram bins shared by every comparison.  None picks the
        default: one bin per discrete level when the reference declares
        them, otherwise 100 bins.
    value_range : (low, high) or None
        Histogram range.  None uses the reference's nominal or observed
        range.

    Attributes
    ----------
    reference_ : ndarray
        Pooled reference values.
    bins_ : int
    value_range_ : (float, float)
    """

    def __init__(self, bins=None, value_range=None):
        self.bins = bins
        self.value_range = value_range

    def fit(self, X, y=None):
        """Fit on the reference: X is a Dataset or a collection of values."""
        if isinstance(X, Dataset):
            values = pool_values(X)
            kind, levels = X.domain.kind, X.domain.discrete_levels
            self.reference_label_ = X.label or "reference"
        else:
            values = X
            kind, levels = "raw", None
            self.reference_label_ = "reference"
        self.reference_ = as_value_array(values, "reference")
        default_bins, default_range = stats.default_binning(kind, levels, self.reference_)
        self.bins_ = self.bins if self.bins is not None else default_bins
        self.value_range_ = tuple(self.value_range) if self.value_range is not None else default_range
        return self

    def evaluate(self, X) -> stats.ReportRow:
        """KS statistic, KS p-value and JSD of one candidate against the reference."""
        check_is_fitted(self, "reference_")
        values = as_value_array(pool_values(X) if isinstance(X, Dataset) else X, "candidate")
        ks = stats.ks_two_sample(self.reference_, values)
        div = stats.jsd(
            stats.histogram(self.reference_, self.bins_, self.value_range_),
            stats.histogram(values, self.bins_, self.value_range_),
        )
        return stats.ReportRow("candidate", ks.statistic, ks.p_value, div)

    def report(self, candidates) -> stats.ComparisonReport:
        """Full comparison report for labeled candidates.

        ``candidates`` is a mapping label -> values or a sequence of
        (label, values) pairs; rows keep the input order, after the
        leading reference-vs-itself row.
        """
        check_is_fitted(self, "reference_")
        pairs = candidates.items() if hasattr(candidates, "items") else candidates
        labeled = [
            (label, as_value_array(pool_values(v) if isinstance(v, Dataset) else v, label))
            for label, v in pairs
        ]
        return stats.compare(
            self.reference_, labeled, self.bins_, self.value_range_,
            reference_label=self.reference_label_,
        )


class TransitionSpecMiner(BaseEstimator):
    """Mine a pitch-class transition specification and score violations.

    Parameters
    ----------
    base_note : int
        MIDI note number of piano-roll row 0.

    Attributes
    ----------
    spec_ : TransitionSpec
    counts_ : ndarray of shape (12, 12)
    allowed_ : ndarray of bool, shape (12, 12)
    """

    def __init__(self, base_note=0):
        self.base_note = base_note

    def fit(self, X, y=None):
        rolls = as_boolean_rolls(X)
        self.spec_ = transitions.mine_spec(rolls, self.base_note)
        self.counts_ = self.spec_.counts
        self.allowed_ = self.spec_.allowed
        return self

    def predict(self, X) -> np.ndarray:
        """Violation occurrences per sample."""
        check_is_fitted(self, "spec_")
        return transitions.violations_per_sample(as_boolean_rolls(X), self.spec_, self.base_note)

    def violations(self, X) -> int:
        """Total violation occurrences over a dataset."""
        return int(self.predict(X).sum())


class MelSpectrogram(BaseEstimator, TransformerMixin):
    """Transform raw signals into compressed mel-spectrogram grids.

    Parameters mirror :class:`sampleaudit.melspec.MelConfig`; ``fit``
    only validates them and builds the filter matrix.
    """

    def __init__(self, sample_rate=8000, bands=64, window=1024, hop=160, compression=1000.0):
        self.sample_rate = sample_rate
        self.bands = bands
        self.window = window
        self.hop = hop
        self.compression = compression

    def _config(self) -> MelConfig:
        return MelConfig(
            sample_rate=self.sample_rate, bands=self.bands, window=self.window,
            hop=self.hop, compression=self.compression,
        )

    def fit(self, X=None, y=None):
        self.filterbank_ = mel_filterbank(self._config())
        return self

    def transform(self, X) -> list[np.ndarray]:
        """Mel grids (bands x frames) for a signal or a sequence of signals."""
        check_is_fitted(self, "filterbank_")
        cfg = self._config()
        if getattr(X, "ndim", None) == 1 or np.isscalar(X[0]):
            signals = [np.asarray(X)]
        else:
            signals = list(X)
        return [melspectrogram(as_signal(s, "signal"), cfg).grid for s in signals]


class RandomBaseline(BaseEstimator):
    """Fit a one-parameter random baseline to a dataset and sample from it.

    Parameters
    ----------
    kind : {"bernoulli", "exponential"}
    seed : int
        Root of the per-sample Philox substreams; identical (seed, kind,
        parameter, shape) always reproduce identical datasets.

    Attributes
    ----------
    parameter_ : float
        Bernoulli probability or Exponential rate.
    shape_ : (rows, cols, channels) learned from the fitted dataset.
    """

    def __init__(self, kind="bernoulli", seed=0):
        self.kind = kind
        self.seed = seed

    def fit(self, X, y=None):
        if not isinstance(X, Dataset):
            raise ValueError("RandomBaseline.fit expects a Dataset")
        if self.kind == "bernoulli":
            self.parameter_ = baselines.fit_bernoulli(X)
        elif self.kind == "exponential":
            self.parameter_ = baselines.fit_exponential(X)
        else:
            raise ValueError(f"unknown baseline kind {self.kind!r}")
        self.shape_ = (X.rows, X.cols, X.channels)
        return self

    def sample(self, count: int, workers: int = 1) -> Dataset:
        check_is_fitted(self, "parameter_")
        cfg = baselines.BaselineConfig(
            kind=self.kind, parameter=self.parameter_, shape=self.shape_,
            count=count, seed=self.seed,
        )
        return baselines.generate(cfg, workers=workers)
