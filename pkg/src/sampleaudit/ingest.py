"""Readers and writers for external dataset formats.

Every reader is deterministic (same bytes -> same dataset) and returns the
in-memory model from :mod:`sampleaudit.dataset`.  Malformed input raises
:class:`FormatError`.
"""

from __future__ import annotations

import json
import struct
import wave
from pathlib import Path

import numpy as np

from .dataset import Dataset, ValueDomain

RASTER_MAGIC = b"GSR1"

# IDX type codes (only unsigned byte is accepted)
_IDX_UBYTE = 0x08


class FormatError(Exception):
    """A file does not conform to its declared format."""


def read_idx(path) -> Dataset:
    """Read an IDX image container (the standard MNIST layout).

    Layout (big endian):
      u8[2]  | 0x00 0x00
      u8     | type code (0x08 = unsigned byte)
      u8     | dimension count
      u32[n] | dimension sizes
      u8[]   | raw values, row-major
    """
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 4:
        raise FormatError(f"{path}: shorter than the 4-byte IDX magic")
    if data[0] != 0 or data[1] != 0:
        raise FormatError(f"{path}: bad IDX magic {data[:4].hex()}")
    type_code, ndim = data[2], data[3]
    if type_code != _IDX_UBYTE:
        raise FormatError(f"{path}: unsupported IDX type code 0x{type_code:02X}")
    if ndim != 3:
        raise FormatError(f"{path}: expected 3 dimensions (count, rows, cols), got {ndim}")
    header_len = 4 + 4 * ndim
    if len(data) < header_len:
        raise FormatError(f"{path}: truncated IDX dimension header")
    count, rows, cols = struct.unpack(">III", data[4:header_len])
    expected = count * rows * cols
    payload = data[header_len:]
    if len(payload) != expected:
        raise FormatError(f"{path}: payload holds {len(payload)} bytes, header declares {expected}")
    values = np.frombuffer(payload, dtype=np.uint8).reshape(count, 1, rows, cols)
    return Dataset(values, ValueDomain("raw", discrete_levels=256), label=path.stem)


def read_cifar10(paths) -> Dataset:
    """Read one or more CIFAR-10 binary batch files.

    Each 3073-byte record is 1 label byte (discarded; the analysis is
    label-free) followed by 3x1024 planar channel bytes of a 32x32 image.
    """
    if isinstance(paths, (str, Path)):
        paths = [paths]
    paths = [Path(p) for p in paths]
    if not paths:
        raise FormatError("no CIFAR-10 batch files given")
    batches = []
    for path in paths:
        data = path.read_bytes()
        if len(data) == 0 or len(data) % 3073 != 0:
            raise FormatError(f"{path}: length {len(data)} is not a positive multiple of 3073")
        records = np.frombuffer(data, dtype=np.uint8).reshape(-1, 3073)
        batches.append(records[:, 1:].reshape(-1, 3, 32, 32))
    values = np.concatenate(batches)
    label = paths[0].stem if len(paths) == 1 else f"{paths[0].stem}+{len(paths) - 1}"
    return Dataset(values, ValueDomain("raw", discrete_levels=256), label=label)


def read_wav(path) -> tuple[int, np.ndarray]:
    """Read a PCM 16-bit mono RIFF/WAVE file.

    Returns (sample_rate, signal) with the signal scaled to [-1, 1] by
    dividing the integer samples by 32768.
    """
    path = Path(path)
    try:
        with wave.open(str(path), "rb") as w:
            if w.getcomptype() != "NONE":
                raise FormatError(f"{path}: non-PCM encoding {w.getcomptype()!r}")
            if w.getnchannels() != 1:
                raise FormatError(f"{path}: {w.getnchannels()} channels, only mono is supported")
            if w.getsampwidth() != 2:
                raise FormatError(f"{path}: {8 * w.getsampwidth()}-bit samples, only 16-bit is supported")
            rate = w.getframerate()
            frames = w.readframes(w.getnframes())
    except wave.Error as exc:
        raise FormatError(f"{path}: malformed RIFF/WAVE file ({exc})") from exc
    signal = np.frombuffer(frames, dtype="<i2").astype(np.float64) / 32768.0
    return rate, signal


def read_pianoroll_csv(directory) -> Dataset:
    """Read a directory of CSV matrices, one piano-roll piece per file.

    Files are taken in lexicographic name order; all must share one
    rows x cols shape.  Rows are note numbers, columns time steps.
    """
    directory = Path(directory)
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() == ".csv")
    if not files:
        raise FormatError(f"{directory}: no CSV files found")
    grids = []
    for path in files:
        grids.append(_read_csv_matrix(path))
        if grids[-1].shape != grids[0].shape:
            raise FormatError(
                f"{path}: shape {grids[-1].shape} does not match {files[0].name}'s {grids[0].shape}"
            )
    return Dataset(np.stack(grids)[:, np.newaxis], ValueDomain("raw"), label=directory.name)


def _read_csv_matrix(path: Path) -> np.ndarray:
    rows = []
    width = None
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise FormatError(f"{path}:{lineno}: ragged row ({len(cells)} cells, expected {width})")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: non-numeric cell ({exc})") from exc
    if not rows:
        raise FormatError(f"{path}: empty matrix")
    return np.asarray(rows, dtype=np.float32)


def read_raster(path) -> Dataset:
    """Read a raster store.

    Layout (little endian):
      u8[4]  | magic "GSR1"
      u32[4] | count, rows, cols, channels
      f32[]  | values, planar channel order, row-major
    """
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 20:
        raise FormatError(f"{path}: shorter than the 20-byte raster header")
    if data[:4] != RASTER_MAGIC:
        raise FormatError(f"{path}: bad raster magic {data[:4]!r}")
    count, rows, cols, channels = struct.unpack("<IIII", data[4:20])
    expected = 4 * count * rows * cols * channels
    payload = data[20:]
    if len(payload) != expected:
        raise FormatError(f"{path}: payload holds {len(payload)} bytes, header declares {expected}")
    values = np.frombuffer(payload, dtype="<f4").reshape(count, channels, rows, cols)
    if not np.all(np.isfinite(values)):
        raise FormatError(f"{path}: payload contains non-finite values")
    return Dataset(values, ValueDomain("raw"), label=path.stem)


def write_raster(d: Dataset, path) -> None:
    """Write a dataset as a raster store; read_raster(write_raster(d)) is bit-exact."""
    path = Path(path)
    header = RASTER_MAGIC + struct.pack("<IIII", d.count, d.rows, d.cols, d.channels)
    payload = np.ascontiguousarray(d.values, dtype="<f4").tobytes()
    path.write_bytes(header + payload)


def write_sidecar(d: Dataset, store_path) -> None:
    """Write the domain-metadata JSON sidecar next to a raster store."""
    doc = {
        "schema_version": 1,
        "domain": d.domain.kind,
        "discrete_levels": d.domain.discrete_levels,
        "label": d.label,
    }
    sidecar_path(store_path).write_text(json.dumps(doc, sort_keys=True) + "\n")


def sidecar_path(store_path) -> Path:
    return Path(str(store_path) + ".json")


def load_store(path) -> Dataset:
    """Read a raster store, restoring domain metadata from its sidecar if present."""
    d = read_raster(path)
    sc = sidecar_path(path)
    if sc.exists():
        try:
            doc = json.loads(sc.read_text())
            domain = ValueDomain(doc["domain"], doc.get("discrete_levels"))
            label = doc.get("label") or d.label
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{sc}: malformed sidecar ({exc})") from exc
        d = Dataset(d.values, domain, label)
    return d


def save_store(d: Dataset, path) -> None:
    """Write a raster store together with its domain sidecar."""
    write_raster(d, path)
    write_sidecar(d, path)
