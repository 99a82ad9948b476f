"""Per-sample feature extractors: spectral centroid and slope, boolean chroma,
note durations, and moment summaries of feature series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, Sample

MOMENT_NAMES = ("mean", "std", "skew", "kurt")


@dataclass(frozen=True)
class SlopeConfig:
    """Sliding-window configuration for the spectral slope."""

    window_size: int = 7
    stride: int = 1

    def __post_init__(self):
        if self.window_size < 2:
            raise ValueError("window_size must be >= 2")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")


@dataclass(frozen=True)
class MomentVector:
    mean: float
    std: float
    skewness: float
    excess_kurtosis: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.mean, self.std, self.skewness, self.excess_kurtosis)


def _single_channel_grid(sample) -> np.ndarray:
    if isinstance(sample, Sample):
        return sample.grid
    grid = np.asarray(sample)
    if grid.ndim == 3 and grid.shape[0] == 1:
        grid = grid[0]
    if grid.ndim != 2:
        raise ValueError(f"expected a single-channel 2-D sample, got shape {grid.shape}")
    return grid


def spectral_centroid(sample) -> np.ndarray:
    """Per-column barycenter of intensity: the expected row index under
    column-normalized values.

    Column j with values v[:, j] gives sum_i i * v[i, j] / sum_i v[i, j],
    rows indexed 0..R-1 top-down.  Columns that sum to zero fall back to
    the uniform barycenter (R - 1) / 2, so all-zero columns (routine in
    binarized digits) stay finite.  Values must be nonnegative.
    """
    grid = _single_channel_grid(sample).astype(np.float64)
    if np.any(grid < 0):
        raise ValueError("spectral centroid requires nonnegative values; scale to the unit domain first")
    n_rows = grid.shape[0]
    col_sums = grid.sum(axis=0)
    weighted = np.arange(n_rows, dtype=np.float64) @ grid
    centroids = np.full(grid.shape[1], (n_rows - 1) / 2.0)
    nonzero = col_sums > 0
    centroids[nonzero] = weighted[nonzero] / col_sums[nonzero]
    return centroids


def spectral_slope(centroids, config: SlopeConfig = SlopeConfig()) -> np.ndarray:
    """Least-squares slope of the centroids over a sliding window.

    Within each window the regressor is the local index 0..w-1, so an
    exactly linear centroid sequence yields the line's slope in every
    window.  Windows start at 0 and advance by the configured stride;
    with stride 1 there are len(centroids) - window_size + 1 windows.
    """
    y = np.asarray(centroids, dtype=np.float64).reshape(-1)
    w = config.window_size
    if y.size < w:
        raise ValueError(f"need at least {w} centroids, got {y.size}")
    x = np.arange(w, dtype=np.float64)
    x_centered = x - x.mean()
    denom = float(x_centered @ x_centered)
    windows = np.lib.stride_tricks.sliding_window_view(y, w)[:: config.stride]
    # centering y keeps constant windows at exactly zero slope
    centered = windows - windows.mean(axis=1, keepdims=True)
    return (centered @ x_centered) / denom


def _boolean_grid(sample) -> np.ndarray:
    grid = _single_channel_grid(sample)
    if not np.all((grid == 0) | (grid == 1)):
        raise ValueError("feature requires a boolean sample (every value exactly 0 or 1)")
    return grid != 0


def chroma(sample, base_note: int = 0) -> np.ndarray:
    """Boolean pitch-class activations, one 12-vector per column.

    Row r maps to MIDI note base_note + r; entry c of frame t is true
    iff some active row at column t folds to pitch class c (mod 12).
    """
    grid = _boolean_grid(sample)
    n_rows = grid.shape[0]
    pitch_class = (base_note + np.arange(n_rows)) % 12
    one_hot = np.zeros((n_rows, 12), dtype=np.int64)
    one_hot[np.arange(n_rows), pitch_class] = 1
    return (grid.T.astype(np.int64) @ one_hot) > 0


def note_durations(sample) -> np.ndarray:
    """Length of every maximal run of consecutive 1s along each row.

    Runs cut by the patch boundary count at their truncated length;
    output order is (row, run start) lexicographic.
    """
    grid = _boolean_grid(sample).astype(np.int8)
    # zero columns on both sides stop runs from crossing row boundaries
    padded = np.zeros((grid.shape[0], grid.shape[1] + 2), dtype=np.int8)
    padded[:, 1:-1] = grid
    flat = padded.reshape(-1)
    delta = np.diff(flat)
    starts = np.flatnonzero(delta == 1)
    ends = np.flatnonzero(delta == -1)
    return (ends - starts).astype(np.int64)


def moments(series) -> MomentVector:
    """Population moments of a series: mean, std, skewness, excess kurtosis.

    Normalization divides by n.  A zero-variance series has skewness and
    excess kurtosis defined as 0.
    """
    x = np.asarray(series, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise ValueError("cannot compute moments of an empty series")
    mu = float(x.mean())
    centered = x - mu
    var = float(np.mean(centered**2))
    std = float(np.sqrt(var))
    if std == 0.0:
        return MomentVector(mu, 0.0, 0.0, 0.0)
    skew = float(np.mean(centered**3) / std**3)
    kurt = float(np.mean(centered**4) / std**4 - 3.0)
    return MomentVector(mu, std, skew, kurt)


def feature_distribution(d: Dataset, feature: str,
                         slope_config: SlopeConfig = SlopeConfig(),
                         base_note: int = 0) -> dict[str, np.ndarray]:
    """Apply a per-sample extractor to a whole dataset and pool the results.

    feature "centroid_moments" / "slope_moments": four collections keyed
    "mean", "std", "skew", "kurt", one entry per sample (moments of that
    sample's centroid or slope series).  feature "durations": a single
    collection keyed "durations" pooling every run length in the dataset.
    """
    if feature == "durations":
        pooled = [note_durations(s) for s in d]
        return {"durations": np.concatenate(pooled) if pooled else np.array([], dtype=np.int64)}
    if feature not in ("centroid_moments", "slope_moments"):
        raise ValueError(f"unknown feature {feature!r}")
    per_sample = []
    for s in d:
        series = spectral_centroid(s)
        if feature == "slope_moments":
            series = spectral_slope(series, slope_config)
        per_sample.append(moments(series).as_tuple())
    stacked = np.asarray(per_sample, dtype=np.float64)
    return {name: stacked[:, i] for i, name in enumerate(MOMENT_NAMES)}
