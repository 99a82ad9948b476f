"""Speech signal to compressed mel-spectrogram pipeline.

STFT with a periodic Hann window and no edge padding (every frame lies
fully inside the signal, so the frame count is exactly
floor((len - window) / hop) + 1), triangular mel filters with
area (Slaney-style) normalization, and log(1 + C*M) dynamic range
compression.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, Sample, ValueDomain


@dataclass(frozen=True)
class MelConfig:
    """Mel pipeline parameters; defaults follow the telephone-speech setup."""

    sample_rate: float
    bands: int = 64
    window: int = 1024
    hop: int = 160
    compression: float = 1000.0

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.bands < 2:
            raise ValueError("bands must be >= 2")
        if self.window < 1 or self.window & (self.window - 1):
            raise ValueError("window must be a power of two")
        if not 1 <= self.hop <= self.window:
            raise ValueError("hop must satisfy 1 <= hop <= window")
        if self.compression <= 0:
            raise ValueError("compression must be positive")

    @property
    def freq_bins(self) -> int:
        return self.window // 2 + 1


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def frame_count(length: int, window: int, hop: int) -> int:
    if length < window:
        raise ValueError(f"signal of {length} samples is shorter than the {window}-sample window")
    return (length - window) // hop + 1


def stft_power(signal, window: int, hop: int) -> np.ndarray:
    """Power spectrogram, shape (window // 2 + 1, frames).

    Frames are Hann-windowed and transformed at the window length; power
    is the squared magnitude of the nonnegative-frequency bins.
    """
    x = np.asarray(signal, dtype=np.float64).reshape(-1)
    n_frames = frame_count(x.size, window, hop)
    frames = np.lib.stride_tricks.sliding_window_view(x, window)[: n_frames * hop : hop]
    hann = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(window) / window)
    spectrum = np.fft.rfft(frames * hann, axis=1)
    return (spectrum.real**2 + spectrum.imag**2).T


def mel_filterbank(cfg: MelConfig) -> np.ndarray:
    """Triangular mel filter matrix, shape (bands, window // 2 + 1).

    Filter centers are equally spaced on the mel scale between 0 Hz and
    sample_rate / 2; each triangle is scaled by 2 / (width in Hz), the
    area normalization used by the common audio libraries.
    """
    mel_points = np.linspace(0.0, hz_to_mel(cfg.sample_rate / 2.0), cfg.bands + 2)
    hz_points = mel_to_hz(mel_points)
    fft_freqs = np.arange(cfg.freq_bins, dtype=np.float64) * cfg.sample_rate / cfg.window

    lower = hz_points[:-2, np.newaxis]
    center = hz_points[1:-1, np.newaxis]
    upper = hz_points[2:, np.newaxis]
    rising = (fft_freqs - lower) / (center - lower)
    falling = (upper - fft_freqs) / (upper - center)
    weights = np.maximum(0.0, np.minimum(rising, falling))
    weights *= 2.0 / (upper - lower)

    if np.any(weights.max(axis=1) <= 0):
        raise ValueError(
            f"{cfg.bands} bands exceed the frequency resolution of a {cfg.window}-sample window "
            f"at {cfg.sample_rate} Hz (some filters cover no FFT bin)"
        )
    return weights


def filter_centers_hz(cfg: MelConfig) -> np.ndarray:
    """Center frequency of each mel filter in Hz."""
    mel_points = np.linspace(0.0, hz_to_mel(cfg.sample_rate / 2.0), cfg.bands + 2)
    return mel_to_hz(mel_points[1:-1])


def melspectrogram(signal, cfg: MelConfig) -> Sample:
    """Compressed mel spectrogram: log(1 + C * filterbank @ power)."""
    power = stft_power(signal, cfg.window, cfg.hop)
    mel_power = mel_filterbank(cfg) @ power
    return Sample(np.log1p(cfg.compression * mel_power))


def patchify(sample, patch_cols: int, label: str = "") -> Dataset:
    """Split a sample into non-overlapping column blocks, left to right.

    Trailing columns that do not fill a whole patch are dropped.
    """
    if patch_cols < 1:
        raise ValueError("patch_cols must be >= 1")
    values = sample.values if isinstance(sample, Sample) else Sample(np.asarray(sample)).values
    n_patches = values.shape[2] // patch_cols
    if n_patches == 0:
        raise ValueError(f"sample has {values.shape[2]} columns, fewer than patch_cols={patch_cols}")
    blocks = [values[:, :, i * patch_cols : (i + 1) * patch_cols] for i in range(n_patches)]
    return Dataset(np.stack(blocks), ValueDomain("raw"), label=label)
