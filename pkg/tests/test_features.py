"""Feature extractor tests.

Oracles: per-window numpy.polyfit for the slope, a cell-by-cell scan for
run lengths, fsum-based direct summation for moments, and hand-evaluated
barycenters for the centroid fixtures.
"""

import math

import numpy as np
import pytest

from sampleaudit import (
    Dataset,
    Sample,
    SlopeConfig,
    ValueDomain,
    chroma,
    feature_distribution,
    moments,
    note_durations,
    spectral_centroid,
    spectral_slope,
)

# ---------------------------------------------------------------------------
# oracles


def slope_oracle(y, window):
    return [np.polyfit(np.arange(window), y[i : i + window], 1)[0]
            for i in range(len(y) - window + 1)]


def durations_oracle(grid):
    out = []
    for row in np.asarray(grid):
        run = 0
        for cell in row:
            if cell:
                run += 1
            elif run:
                out.append(run)
                run = 0
        if run:
            out.append(run)
    return out


def moments_oracle(series):
    xs = [float(x) for x in series]
    n = len(xs)
    mu = math.fsum(xs) / n
    var = math.fsum((x - mu) ** 2 for x in xs) / n
    std = math.sqrt(var)
    if std == 0:
        return mu, 0.0, 0.0, 0.0
    skew = math.fsum((x - mu) ** 3 for x in xs) / n / std**3
    kurt = math.fsum((x - mu) ** 4 for x in xs) / n / std**4 - 3.0
    return mu, std, skew, kurt


def boolean_sample(rng, rows=16, cols=32, density=0.2):
    return Sample((rng.random((rows, cols)) < density).astype(np.float32))


# ---------------------------------------------------------------------------
# spectral centroid

class TestSpectralCentroid:
    def test_point_mass(self):
        grid = np.zeros((28, 3))
        grid[5, :] = 2.5
        assert spectral_centroid(Sample(grid)).tolist() == [5.0, 5.0, 5.0]

    def test_uniform_column(self):
        assert spectral_centroid(Sample(np.ones((28, 2)))).tolist() == [13.5, 13.5]

    def test_zero_column_fallback(self):
        grid = np.zeros((28, 2))
        grid[3, 0] = 1.0
        assert spectral_centroid(Sample(grid)).tolist() == [3.0, 13.5]

    def test_scale_invariance_exact(self):
        rng = np.random.default_rng(20)
        for _ in range(50):
            grid = rng.integers(0, 256, (14, 9)).astype(np.float32)
            base = spectral_centroid(Sample(grid))
            for k in (0.5, 2.0, 100.0):
                np.testing.assert_array_equal(spectral_centroid(Sample(k * grid)), base)

    def test_range(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            rows = int(rng.integers(2, 30))
            c = spectral_centroid(Sample(rng.random((rows, 8))))
            assert np.all(c >= 0.0) and np.all(c <= rows - 1)

    def test_rejects_negative_values(self):
        with pytest.raises(ValueError, match="nonnegative"):
            spectral_centroid(Sample(np.array([[-1.0, 0.0]])))

    def test_rejects_multichannel(self):
        with pytest.raises(ValueError):
            spectral_centroid(Sample(np.zeros((3, 4, 4))))


# ---------------------------------------------------------------------------
# spectral slope

class TestSpectralSlope:
    def test_exact_linear_ramp(self):
        c = 2.0 * np.arange(20) + 3.0
        slopes = spectral_slope(c)
        assert slopes.shape == (14,)
        np.testing.assert_allclose(slopes, 2.0, rtol=0, atol=1e-12)

    def test_constant_centroids(self):
        assert np.all(spectral_slope(np.full(10, 4.2)) == 0.0)

    def test_matches_polyfit_oracle(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            y = rng.random(rng.integers(7, 40))
            np.testing.assert_allclose(spectral_slope(y), slope_oracle(y, 7), atol=1e-10)

    def test_window7_denominator_is_28(self):
        x = np.arange(7.0)
        assert float(((x - x.mean()) ** 2).sum()) == 28.0
        rng = np.random.default_rng(23)
        y = rng.random(7)
        xc = x - x.mean()
        expected = float((xc * (y - y.mean())).sum()) / 28.0
        assert spectral_slope(y)[0] == pytest.approx(expected, abs=1e-14)

    def test_too_few_centroids(self):
        with pytest.raises(ValueError):
            spectral_slope(np.arange(6.0))

    def test_stride(self):
        y = np.arange(20.0) ** 1.5
        strided = spectral_slope(y, SlopeConfig(window_size=7, stride=3))
        np.testing.assert_array_equal(strided, spectral_slope(y)[::3])

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SlopeConfig(window_size=1)
        with pytest.raises(ValueError):
            SlopeConfig(stride=0)


# ---------------------------------------------------------------------------
# chroma

class TestChroma:
    def _roll(self, active, rows=96, cols=1):
        grid = np.zeros((rows, cols))
        for r in active:
            grid[r, :] = 1.0
        return Sample(grid)

    def test_octave_folding(self):
        frames = chroma(self._roll([60, 72]), base_note=0)
        assert set(np.flatnonzero(frames[0])) == {0}

    def test_major_triad(self):
        frames = chroma(self._roll([60, 64, 67]), base_note=0)
        assert set(np.flatnonzero(frames[0])) == {0, 4, 7}

    def test_silent_column(self):
        frames = chroma(Sample(np.zeros((12, 3))), base_note=48)
        assert not frames.any()

    def test_base_note_offsets_classes(self):
        frames = chroma(self._roll([2]), base_note=60)
        assert set(np.flatnonzero(frames[0])) == {(60 + 2) % 12}

    def test_octave_invariance(self):
        rng = np.random.default_rng(24)
        for _ in range(30):
            grid = np.zeros((40, 8))
            rows = rng.integers(0, 24, 10)
            cols = rng.integers(0, 8, 10)
            grid[rows, cols] = 1.0
            shifted = np.zeros_like(grid)
            shifted[rows + 12, cols] = 1.0
            np.testing.assert_array_equal(chroma(Sample(grid), 5), chroma(Sample(shifted), 5))

    def test_rejects_non_boolean(self):
        with pytest.raises(ValueError, match="boolean"):
            chroma(Sample(np.full((4, 4), 0.5)))


# ---------------------------------------------------------------------------
# note durations

class TestNoteDurations:
    def test_run_lengths(self):
        assert note_durations(Sample(np.array([[1, 1, 1, 0, 1.0]]))).tolist() == [3, 1]

    def test_all_zero_patch(self):
        assert note_durations(Sample(np.zeros((4, 6)))).tolist() == []

    def test_boundary_truncated_runs(self):
        assert note_durations(Sample(np.array([[1, 1, 0, 1.0]]))).tolist() == [2, 1]

    def test_matches_scan_oracle(self):
        rng = np.random.default_rng(25)
        for _ in range(50):
            grid = (rng.random((16, 32)) < 0.4).astype(np.float32)
            assert note_durations(Sample(grid)).tolist() == durations_oracle(grid)

    def test_total_equals_active_cells(self):
        rng = np.random.default_rng(26)
        for _ in range(50):
            grid = (rng.random((10, 20)) < 0.3).astype(np.float32)
            assert note_durations(Sample(grid)).sum() == grid.sum()


# ---------------------------------------------------------------------------
# moments

class TestMoments:
    def test_constant_series(self):
        assert moments(np.full(9, 3.25)).as_tuple() == (3.25, 0.0, 0.0, 0.0)

    def test_two_point_symmetric(self):
        m = moments([-1.0, 1.0])
        assert m.as_tuple() == (0.0, 1.0, 0.0, -2.0)

    def test_matches_summation_oracle(self):
        rng = np.random.default_rng(27)
        for _ in range(40):
            series = rng.normal(3.0, 2.0, 100)
            got = moments(series).as_tuple()
            want = moments_oracle(series)
            np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12)

    def test_translation_covariance(self):
        rng = np.random.default_rng(28)
        series = rng.random(64)
        base = moments(series)
        shifted = moments(series + 17.5)
        assert shifted.mean == pytest.approx(base.mean + 17.5, abs=1e-10)
        assert shifted.std == pytest.approx(base.std, abs=1e-10)
        assert shifted.skewness == pytest.approx(base.skewness, abs=1e-10)
        assert shifted.excess_kurtosis == pytest.approx(base.excess_kurtosis, abs=1e-10)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            moments([])


# ---------------------------------------------------------------------------
# dataset-level pooling

class TestFeatureDistribution:
    def test_identical_samples_give_identical_entries(self):
        grid = np.zeros((6, 8), dtype=np.float32)
        grid[2, :] = 1.0
        d = Dataset(np.stack([grid] * 10)[:, np.newaxis], ValueDomain("unit"))
        dist = feature_distribution(d, "centroid_moments")
        assert np.all(dist["mean"] == dist["mean"][0])
        assert len(dist["mean"]) == 10

    def test_all_zero_boolean_patches_have_no_durations(self):
        d = Dataset(np.zeros((5, 1, 4, 4), dtype=np.float32), ValueDomain("boolean", 2))
        assert feature_distribution(d, "durations")["durations"].size == 0

    def test_hand_built_digits_centroid_means(self):
        # digit 1: point mass at row 1 in every column -> centroids all 1
        d1 = np.zeros((4, 4))
        d1[1, :] = 1.0
        # digit 2 columns: {rows 0,2 equal} -> 1; {row 3} -> 3; zero -> 1.5;
        # uniform -> 1.5; mean = (1 + 3 + 1.5 + 1.5) / 4 = 1.75
        d2 = np.zeros((4, 4))
        d2[0, 0] = d2[2, 0] = 1.0
        d2[3, 1] = 1.0
        d2[:, 3] = 1.0
        # digit 3 columns: (1*0 + 3*1)/4 = 0.75; (2*2 + 2*3)/4 = 2.5;
        # {row 0} -> 0; {rows 1,3} -> 2; mean = (0.75 + 2.5 + 0 + 2) / 4 = 1.3125
        d3 = np.zeros((4, 4))
        d3[0, 0], d3[1, 0] = 1.0, 3.0
        d3[2, 1] = d3[3, 1] = 2.0
        d3[0, 2] = 1.0
        d3[1, 3] = d3[3, 3] = 1.0
        d = Dataset(np.stack([d1, d2, d3])[:, np.newaxis].astype(np.float32), ValueDomain("raw"))
        dist = feature_distribution(d, "centroid_moments")
        assert dist["mean"].tolist() == [1.0, 1.75, 1.3125]

    def test_slope_moments_shape(self):
        rng = np.random.default_rng(29)
        d = Dataset(rng.random((4, 1, 10, 12)).astype(np.float32), ValueDomain("unit"))
        dist = feature_distribution(d, "slope_moments")
        assert set(dist) == {"mean", "std", "skew", "kurt"}
        assert all(v.shape == (4,) for v in dist.values())

    def test_unknown_feature(self):
        d = Dataset(np.zeros((1, 1, 2, 2), dtype=np.float32), ValueDomain("unit"))
        with pytest.raises(ValueError):
            feature_distribution(d, "nope")
