"""In-memory data model: value grids, value domains, and the transforms applied before measurement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DOMAIN_KINDS = ("unit", "symmetric", "boolean", "raw")

# Nominal value range per domain kind; raw is unbounded and checked separately.
_DOMAIN_RANGES = {
    "unit": (0.0, 1.0),
    "symmetric": (-1.0, 1.0),
    "boolean": (0.0, 1.0),
}


@dataclass(frozen=True)
class ValueDomain:
    """Declared range of the values in a dataset.

    kind: "unit" ([0,1]), "symmetric" ([-1,1]), "boolean" ({0,1}) or
    "raw" (unbounded nonnegative-or-signed).  discrete_levels is set for
    data quantized to a known number of levels (256 for 8-bit sources)
    and None for continuous data.
    """

    kind: str
    discrete_levels: int | None = None

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.discrete_levels is not None and self.discrete_levels < 1:
            raise ValueError("discrete_levels must be positive")

    def nominal_range(self) -> tuple[float, float] | None:
        return _DOMAIN_RANGES.get(self.kind)


@dataclass(frozen=True)
class Sample:
    """One 2-D value grid with one or more planar channels.

    values has shape (channels, rows, cols), float32.  Rows are indexed
    top-down (row 0 is the top image row / piano-roll note row 0).
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float32)
        if v.ndim == 2:
            v = v[np.newaxis]
        if v.ndim != 3:
            raise ValueError(f"sample values must be 2-D or (channels, rows, cols), got shape {v.shape}")
        if v.shape[1] < 1 or v.shape[2] < 1:
            raise ValueError("sample must have at least one row and one column")
        if not np.all(np.isfinite(v)):
            raise ValueError("sample contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def channels(self) -> int:
        return self.values.shape[0]

    @property
    def rows(self) -> int:
        return self.values.shape[1]

    @property
    def cols(self) -> int:
        return self.values.shape[2]

    @property
    def grid(self) -> np.ndarray:
        """The single channel of a 1-channel sample, shape (rows, cols)."""
        if self.channels != 1:
            raise ValueError(f"sample has {self.channels} channels, expected 1")
        return self.values[0]


class Dataset:
    """Ordered collection of equally-shaped samples plus domain metadata.

    Values are held as one float32 stack of shape (count, channels, rows,
    cols); datasets are immutable after construction and safe to share.
    """

    def __init__(self, values, domain: ValueDomain, label: str = ""):
        stack = np.asarray(values, dtype=np.float32)
        # never freeze a caller-owned writeable buffer
        if isinstance(values, np.ndarray) and values.flags.writeable and np.shares_memory(stack, values):
            stack = stack.copy()
        if stack.ndim == 3:  # (count, rows, cols) single-channel shorthand
            stack = stack[:, np.newaxis]
        if stack.ndim != 4:
            raise ValueError(f"dataset values must have shape (count, channels, rows, cols), got {stack.shape}")
        if stack.shape[0] == 0:
            raise ValueError("dataset is empty")
        if stack.shape[2] < 1 or stack.shape[3] < 1:
            raise ValueError("samples must have at least one row and one column")
        if not np.all(np.isfinite(stack)):
            raise ValueError("dataset contains non-finite values")
        _check_domain(stack, domain)
        stack.setflags(write=False)
        self._stack = stack
        self.domain = domain
        self.label = label

    @classmethod
    def from_samples(cls, samples, domain: ValueDomain, label: str = "") -> "Dataset":
        samples = list(samples)
        if not samples:
            raise ValueError("dataset is empty")
        shapes = {s.values.shape for s in samples}
        if len(shapes) > 1:
            raise ValueError(f"samples have mismatched shapes: {sorted(shapes)}")
        return cls(np.stack([s.values for s in samples]), domain, label)

    @property
    def values(self) -> np.ndarray:
        return self._stack

    @property
    def count(self) -> int:
        return self._stack.shape[0]

    @property
    def channels(self) -> int:
        return self._stack.shape[1]

    @property
    def rows(self) -> int:
        return self._stack.shape[2]

    @property
    def cols(self) -> int:
        return self._stack.shape[3]

    def __len__(self) -> int:
        return self.count

    def __getitem__(self, index: int) -> Sample:
        return Sample(self._stack[index])

    def __iter__(self):
        for i in range(self.count):
            yield self[i]

    def with_label(self, label: str) -> "Dataset":
        return Dataset(self._stack, self.domain, label)

    def with_domain(self, domain: ValueDomain) -> "Dataset":
        return Dataset(self._stack, domain, self.label)

    def subset(self, indices) -> "Dataset":
        return Dataset(self._stack[np.asarray(indices)], self.domain, self.label)


def _check_domain(stack: np.ndarray, domain: ValueDomain) -> None:
    if domain.kind == "boolean":
        if not np.all((stack == 0.0) | (stack == 1.0)):
            raise ValueError("boolean domain requires every value to be exactly 0 or 1")
        return
    rng = domain.nominal_range()
    if rng is not None:
        lo, hi = rng
        mn, mx = float(stack.min()), float(stack.max())
        if mn < lo or mx > hi:
            raise ValueError(f"values [{mn}, {mx}] exceed declared {domain.kind} range [{lo}, {hi}]")


def scale_to_unit(d: Dataset) -> Dataset:
    """Affinely map all values to [0, 1] using the dataset-global min/max.

    A constant dataset maps to all zeros.  discrete_levels is preserved:
    the affine map does not change how many distinct levels exist.
    """
    stack = d.values
    lo = float(stack.min())
    hi = float(stack.max())
    if hi == lo:
        scaled = np.zeros_like(stack)
    else:
        scaled = (stack - np.float32(lo)) / np.float32(hi - lo)
    return Dataset(scaled, ValueDomain("unit", d.domain.discrete_levels), d.label)


def scale_to_symmetric(d: Dataset) -> Dataset:
    """Affinely map all values to [-1, 1]: unit scaling followed by 2u - 1."""
    unit = scale_to_unit(d)
    return Dataset(2.0 * unit.values - 1.0, ValueDomain("symmetric", d.domain.discrete_levels), d.label)


def binarize(d: Dataset, threshold: float) -> Dataset:
    """Threshold a unit-domain dataset: v >= threshold -> 1, else 0.

    Requires the dataset to be in the unit domain already, which forces
    the scale-then-threshold order.  Ties go to 1.
    """
    if d.domain.kind != "unit":
        raise ValueError(f"binarize requires a unit-domain dataset, got {d.domain.kind!r}")
    binary = (d.values >= np.float32(threshold)).astype(np.float32)
    return Dataset(binary, ValueDomain("boolean", 2), d.label)


def pool_values(d: Dataset) -> np.ndarray:
    """Flatten every value of every sample into one 1-D array.

    Order is (sample, channel, row-major), i.e. the C order of the
    underlying (count, channels, rows, cols) stack; length is
    count * channels * rows * cols.
    """
    return d.values.reshape(-1)


def pool_values_channel(d: Dataset, channel: int) -> np.ndarray:
    """As pool_values, restricted to a single channel plane."""
    if not 0 <= channel < d.channels:
        raise ValueError(f"channel {channel} out of range for {d.channels}-channel dataset")
    return d.values[:, channel].reshape(-1)
