"""Mine pitch-class transition specifications from reference piano rolls and
count specification violations in candidate data.

States are the 12 pitch classes.  Every adjacent column pair (t, t+1) of a
boolean roll contributes one occurrence per (active class at t, active
class at t+1) pair; transitions never cross sample boundaries, and frames
adjacent to a silent column contribute nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .features import chroma

N_CLASSES = 12


@dataclass(frozen=True)
class TransitionSpec:
    """Admissible pitch-class transitions mined from reference data.

    counts[i][j] is how often class i at one frame was followed by class
    j at the next; a transition is allowed iff its count is positive.
    """

    counts: np.ndarray
    source_label: str = ""

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (N_CLASSES, N_CLASSES):
            raise ValueError(f"counts must be {N_CLASSES}x{N_CLASSES}, got {counts.shape}")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def allowed(self) -> np.ndarray:
        return self.counts > 0


def _require_boolean(d: Dataset) -> None:
    if d.domain.kind != "boolean":
        raise ValueError(f"transition analysis requires a boolean dataset, got domain {d.domain.kind!r}")


def _transition_counts(sample, base_note: int) -> np.ndarray:
    frames = chroma(sample, base_note).astype(np.int64)  # (cols, 12)
    return frames[:-1].T @ frames[1:]


def mine_spec(d: Dataset, base_note: int = 0) -> TransitionSpec:
    """Accumulate pitch-class transition counts over every sample of a dataset."""
    _require_boolean(d)
    counts = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    for sample in d:
        counts += _transition_counts(sample, base_note)
    return TransitionSpec(counts, source_label=d.label)


def violations_per_sample(d: Dataset, spec: TransitionSpec, base_note: int = 0) -> np.ndarray:
    """Occurrence count of disallowed transitions in each sample."""
    _require_boolean(d)
    disallowed = ~spec.allowed
    return np.array(
        [int(_transition_counts(s, base_note)[disallowed].sum()) for s in d], dtype=np.int64
    )


def count_violations(d: Dataset, spec: TransitionSpec, base_note: int = 0) -> int:
    """Total occurrences of (sample, t, class pair) triples the spec disallows."""
    return int(violations_per_sample(d, spec, base_note).sum())


def violation_breakdown(d: Dataset, spec: TransitionSpec, base_note: int = 0) -> np.ndarray:
    """Occurrence counts per disallowed (from, to) class pair, 12x12."""
    _require_boolean(d)
    observed = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    for sample in d:
        observed += _transition_counts(sample, base_note)
    observed[spec.allowed] = 0
    return observed


def spec_to_json(spec: TransitionSpec) -> str:
    doc = {
        "schema_version": 1,
        "source_label": spec.source_label,
        "counts": spec.counts.tolist(),
    }
    return json.dumps(doc, sort_keys=True) + "\n"


def spec_from_json(data) -> TransitionSpec:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed specification document: {exc}") from exc
    if not isinstance(doc, dict) or "counts" not in doc:
        raise ValueError("specification document must be an object with a 'counts' field")
    counts = doc["counts"]
    if (
        not isinstance(counts, list)
        or len(counts) != N_CLASSES
        or any(not isinstance(row, list) or len(row) != N_CLASSES for row in counts)
    ):
        raise ValueError(f"counts must be a {N_CLASSES}x{N_CLASSES} integer matrix")
    if any(not isinstance(c, int) or isinstance(c, bool) for row in counts for c in row):
        raise ValueError("counts must be integers")
    return TransitionSpec(np.asarray(counts, dtype=np.int64), source_label=str(doc.get("source_label", "")))
