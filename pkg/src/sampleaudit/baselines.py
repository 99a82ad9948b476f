"""Random reference datasets: Bernoulli and Exponential baselines.

Generation is reproducible regardless of scheduling: sample k of a run is
drawn from its own Philox (4x64 counter-based) stream keyed by
(seed, k), so serial and parallel generation produce identical bytes.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, ValueDomain, pool_values

KINDS = ("bernoulli", "exponential")


@dataclass(frozen=True)
class BaselineConfig:
    kind: str
    parameter: float
    shape: tuple[int, int, int]  # rows, cols, channels
    count: int
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown baseline kind {self.kind!r}")
        if self.kind == "bernoulli" and not 0.0 <= self.parameter <= 1.0:
            raise ValueError(f"Bernoulli parameter must be in [0, 1], got {self.parameter}")
        if self.kind == "exponential" and not self.parameter > 0.0:
            raise ValueError(f"Exponential rate must be positive, got {self.parameter}")
        rows, cols, channels = self.shape
        if min(rows, cols, channels) < 1:
            raise ValueError(f"invalid sample shape {self.shape}")
        if self.count < 1:
            raise ValueError("count must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def fit_bernoulli(d: Dataset) -> float:
    """Bernoulli probability = mean of all pooled values of a [0,1]-domain dataset."""
    if d.domain.kind not in ("unit", "boolean"):
        raise ValueError(f"Bernoulli fit requires a unit or boolean domain, got {d.domain.kind!r}")
    return float(np.mean(pool_values(d), dtype=np.float64))


def fit_exponential(d: Dataset) -> float:
    """Exponential rate = 1 / mean of pooled values (maximum-likelihood fit)."""
    pooled = pool_values(d)
    if np.any(pooled < 0):
        raise ValueError("Exponential fit requires nonnegative values")
    mean = float(np.mean(pooled, dtype=np.float64))
    if mean == 0.0:
        raise ValueError("Exponential fit requires a positive mean")
    return 1.0 / mean


def _sample_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))


def _draw_sample(cfg: BaselineConfig, index: int) -> np.ndarray:
    rows, cols, channels = cfg.shape
    rng = _sample_stream(cfg.seed, index)
    u = rng.random((channels, rows, cols))
    if cfg.kind == "bernoulli":
        return (u < cfg.parameter).astype(np.float32)
    # inverse-CDF draw with u in (0, 1]
    return (-np.log(1.0 - u) / cfg.parameter).astype(np.float32)


def generate(cfg: BaselineConfig, workers: int = 1) -> Dataset:
    """Generate a baseline dataset; identical for any worker count."""
    if workers <= 1:
        samples = [_draw_sample(cfg, k) for k in range(cfg.count)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(lambda k: _draw_sample(cfg, k), range(cfg.count)))
    stack = np.stack(samples)
    if cfg.kind == "bernoulli":
        domain = ValueDomain("boolean", 2)
    else:
        domain = ValueDomain("raw")
    return Dataset(stack, domain, label=f"{cfg.kind}_baseline")
