"""Shared fixtures: synthetic stand-in corpora and real-data discovery.

Real MNIST IDX files are looked up in $SAMPLEAUDIT_MNIST_DIR or
<repo>/data/mnist; tests that assert published-table values skip when
they are absent.  Everything else runs on deterministic synthetic
fixtures built here.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np
import pytest

from sampleaudit import Dataset, ValueDomain

_TRAIN_NAMES = ("train-images-idx3-ubyte", "train-images.idx3-ubyte")
_TEST_NAMES = ("t10k-images-idx3-ubyte", "t10k-images.idx3-ubyte")


def find_mnist() -> tuple[Path, Path] | None:
    """Locate real MNIST train/test image files, or None."""
    roots = []
    env = os.environ.get("SAMPLEAUDIT_MNIST_DIR")
    if env:
        roots.append(Path(env))
    roots.append(Path(__file__).resolve().parent.parent / "data" / "mnist")
    for root in roots:
        for train_name in _TRAIN_NAMES:
            for test_name in _TEST_NAMES:
                train, test = root / train_name, root / test_name
                if train.exists() and test.exists():
                    return train, test
    return None


def write_idx(path: Path, images: np.ndarray) -> Path:
    """Write a (count, rows, cols) uint8 array in the IDX image layout."""
    count, rows, cols = images.shape
    header = struct.pack(">BBBBIII", 0, 0, 0x08, 3, count, rows, cols)
    path.write_bytes(header + images.astype(np.uint8).tobytes())
    return path


def stroke_digits(count: int, seed: int = 7, size: int = 28) -> np.ndarray:
    """Deterministic digit-like uint8 images: a few bright strokes on black.

    Statistically shaped like handwritten digits (mostly-zero background,
    saturated strokes) without being any published dataset.
    """
    rng = np.random.default_rng(seed)
    images = np.zeros((count, size, size), dtype=np.uint8)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    for i in range(count):
        canvas = np.zeros((size, size))
        for _ in range(rng.integers(2, 4)):
            r0, c0 = rng.uniform(0.15 * size, 0.85 * size, 2)
            angle = rng.uniform(0, np.pi)
            length = rng.uniform(0.2 * size, 0.5 * size)
            r1 = r0 + length * np.sin(angle)
            c1 = c0 + length * np.cos(angle)
            for t in np.linspace(0, 1, 24):
                rr, cc = r0 + t * (r1 - r0), c0 + t * (c1 - c0)
                canvas += np.exp(-((yy - rr) ** 2 + (xx - cc) ** 2) / 1.8)
        canvas = np.clip(canvas / max(canvas.max(), 1e-9), 0, 1)
        images[i] = np.round(255 * canvas).astype(np.uint8)
    return images


def random_rolls(count: int, rows: int = 16, cols: int = 32, density: float = 0.08,
                 seed: int = 0) -> Dataset:
    """Random boolean piano-roll dataset."""
    rng = np.random.default_rng(seed)
    grids = (rng.random((count, rows, cols)) < density).astype(np.float32)
    return Dataset(grids[:, np.newaxis], ValueDomain("boolean", 2), label=f"rolls_seed{seed}")


def chorale_like_rolls(count: int, rows: int = 24, cols: int = 32, seed: int = 0,
                       label: str = "chorale") -> Dataset:
    """Boolean rolls with held notes and stepwise voice motion, chorale-ish."""
    rng = np.random.default_rng(seed)
    grids = np.zeros((count, rows, cols), dtype=np.float32)
    for i in range(count):
        for _voice in range(rng.integers(2, 5)):
            r = int(rng.integers(0, rows))
            t = 0
            while t < cols:
                hold = int(rng.integers(2, 8))
                grids[i, r, t : t + hold] = 1.0
                t += hold
                r = int(np.clip(r + rng.integers(-2, 3), 0, rows - 1))
    return Dataset(grids[:, np.newaxis], ValueDomain("boolean", 2), label=label)


@pytest.fixture(scope="session")
def mnist_paths():
    paths = find_mnist()
    if paths is None:
        pytest.skip(
            "real MNIST IDX files not found; place train-images-idx3-ubyte and "
            "t10k-images-idx3-ubyte in $SAMPLEAUDIT_MNIST_DIR or data/mnist/"
        )
    return paths


@pytest.fixture(scope="session")
def surrogate_idx(tmp_path_factory):
    """Synthetic digit-like train/test IDX files (stand-in corpus)."""
    root = tmp_path_factory.mktemp("surrogate_idx")
    train = write_idx(root / "train-images-idx3-ubyte", stroke_digits(400, seed=11))
    test = write_idx(root / "t10k-images-idx3-ubyte", stroke_digits(400, seed=22))
    return train, test
