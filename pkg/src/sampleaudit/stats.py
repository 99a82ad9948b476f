"""Distribution machinery: ECDFs, histograms, the two-sample KS test and JSD.

Conventions that matter for reproducing table-style comparisons:

* ECDFs are right-continuous step functions with tied values merged.
* Histograms use uniform bins; values on an interior edge fall in the
  right bin, values equal to the upper range bound fall in the last bin,
  and out-of-range values are tallied as overflow, excluded from bins.
* The KS statistic is the exact supremum over the merged observed
  support; its p-value is the asymptotic two-sided series with the
  small-sample correction factor.
* JSD uses the natural logarithm, so its range is [0, ln 2].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Ecdf:
    """Empirical CDF: strictly increasing support, cumulative fractions ending at 1."""

    support: np.ndarray
    fractions: np.ndarray

    def evaluate(self, x) -> np.ndarray:
        """Evaluate the right-continuous step function at the given points."""
        idx = np.searchsorted(self.support, np.asarray(x, dtype=np.float64), side="right")
        padded = np.concatenate(([0.0], self.fractions))
        return padded[idx]


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    overflow: int = 0
    normalized: bool = False

    @property
    def bins(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def normalized_mass(self) -> np.ndarray:
        """Counts as probability masses; sums to 1 when any value landed in a bin."""
        total = self.total
        if total == 0:
            return np.zeros_like(self.counts, dtype=np.float64)
        return self.counts.astype(np.float64) / total


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float


@dataclass(frozen=True)
class ReportRow:
    label: str
    ks_statistic: float
    ks_pvalue: float
    jsd: float


@dataclass(frozen=True)
class ComparisonReport:
    """Per-dataset (KS statistic, KS p-value, JSD) rows against one reference."""

    reference_label: str
    rows: list[ReportRow]
    config: dict = field(default_factory=dict)


def _as_values(values, name: str) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    return v


def ecdf(values) -> Ecdf:
    v = _as_values(values, "values")
    support, counts = np.unique(v, return_counts=True)
    fractions = np.cumsum(counts) / v.size
    return Ecdf(support, fractions)


def histogram(values, bins: int, value_range: tuple[float, float]) -> Histogram:
    if bins < 1:
        raise ValueError("bins must be >= 1")
    lo, hi = float(value_range[0]), float(value_range[1])
    if not lo < hi:
        raise ValueError(f"invalid range [{lo}, {hi}]")
    v = _as_values(values, "values")
    in_range = v[(v >= lo) & (v <= hi)]
    counts, edges = np.histogram(in_range, bins=bins, range=(lo, hi))
    return Histogram(edges=edges, counts=counts, overflow=int(v.size - in_range.size))


def ks_two_sample(a, b) -> KsResult:
    """Two-sample Kolmogorov-Smirnov test.

    The statistic is sup |F_a - F_b| over the union of observed points,
    computed exactly from a merged sorted scan.  The p-value is the
    asymptotic two-sided approximation 2 * sum_k (-1)^(k-1) exp(-2 k^2 L^2)
    with L = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) * D and ne the effective
    sample size, truncated when a term drops below 1e-12 and clamped to
    [0, 1].
    """
    xa = np.sort(_as_values(a, "first sample"))
    xb = np.sort(_as_values(b, "second sample"))
    grid = np.concatenate([xa, xb])
    grid.sort(kind="mergesort")
    fa = np.searchsorted(xa, grid, side="right") / xa.size
    fb = np.searchsorted(xb, grid, side="right") / xb.size
    d = float(np.max(np.abs(fa - fb)))
    return KsResult(d, ks_pvalue(d, xa.size, xb.size))


def ks_pvalue(d: float, n_a: int, n_b: int) -> float:
    """Asymptotic two-sided KS p-value with the small-sample correction factor."""
    if d == 0.0:
        return 1.0
    n_e = n_a * n_b / (n_a + n_b)
    lam = (np.sqrt(n_e) + 0.12 + 0.11 / np.sqrt(n_e)) * d
    total = 0.0
    sign = 1.0
    k = 1
    while True:
        term = np.exp(-2.0 * k * k * lam * lam)
        if term < 1e-12:
            break
        total += sign * term
        sign = -sign
        k += 1
    return float(min(1.0, max(0.0, 2.0 * total)))


def jsd(p: Histogram, q: Histogram) -> float:
    """Jensen-Shannon divergence between two histograms on identical bin edges.

    Natural log; zero-mass bins contribute nothing, so disjoint supports
    give exactly ln 2.
    """
    if p.bins != q.bins or not np.array_equal(p.edges, q.edges):
        raise ValueError("histograms have mismatched bin edges")
    if p.total == 0 or q.total == 0:
        raise ValueError("cannot compute JSD of a zero-total histogram")
    pm = p.normalized_mass()
    qm = q.normalized_mass()
    m = 0.5 * (pm + qm)
    return 0.5 * _kl(pm, m) + 0.5 * _kl(qm, m)


def _kl(p: np.ndarray, m: np.ndarray) -> float:
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / m[mask])))


def compare(reference, candidates, bins: int, value_range: tuple[float, float],
            reference_label: str = "reference", config: dict | None = None) -> ComparisonReport:
    """Compare labeled candidate value collections against a reference.

    ``candidates`` is a sequence of (label, values) pairs.  Histogram
    edges are built once from (bins, value_range) and shared by every
    row; the first row is always the reference against itself.
    """
    ref = _as_values(reference, "reference")
    ref_hist = histogram(ref, bins, value_range)
    rows = []
    for label, values in [(reference_label, ref)] + [(l, v) for l, v in candidates]:
        ks = ks_two_sample(ref, values)
        div = jsd(ref_hist, histogram(values, bins, value_range))
        rows.append(ReportRow(label, ks.statistic, ks.p_value, div))
    cfg = {"bins": bins, "range": [float(value_range[0]), float(value_range[1])]}
    if config:
        cfg.update(config)
    return ComparisonReport(reference_label=reference_label, rows=rows, config=cfg)


def default_binning(domain_kind: str, discrete_levels: int | None, reference) -> tuple[int, tuple[float, float]]:
    """Default histogram configuration for a reference dataset.

    Data quantized to known levels gets one bin per level over the
    domain's nominal range; continuous data gets 100 uniform bins over
    the reference's observed range.
    """
    nominal = {"unit": (0.0, 1.0), "boolean": (0.0, 1.0), "symmetric": (-1.0, 1.0)}
    ref = _as_values(reference, "reference")
    if discrete_levels is not None:
        rng = nominal.get(domain_kind)
        if rng is None:
            rng = _observed_range(ref)
        return discrete_levels, rng
    return 100, _observed_range(ref)


def _observed_range(ref: np.ndarray) -> tuple[float, float]:
    lo, hi = float(ref.min()), float(ref.max())
    if lo == hi:  # degenerate constant reference still needs a valid range
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi
