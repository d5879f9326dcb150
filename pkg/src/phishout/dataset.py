"""Labeled feature matrices shared by the ranking, learning and evaluation code."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FEATURE_NAMES = (
    "capRatio",
    "NoLinks",
    "NoLinksIP",
    "NoWords",
    "NoLinkMismatch",
    "NoPhishyWords",
    "isAtPresent",
    "NoLinkASCII",
)

# label encoding used everywhere: index == integer class
LABELS = ("ham", "phish")
HAM, PHISH = 0, 1


class DataError(ValueError):
    """Raised when a dataset cannot be used for the requested operation."""


def encode_labels(labels) -> np.ndarray:
    """Map ``ham``/``phish`` strings (or 0/1) onto integer classes."""
    out = []
    for i, lab in enumerate(labels):
        if isinstance(lab, str):
            try:
                out.append(LABELS.index(lab.strip().lower()))
            except ValueError:
                raise DataError(f"row {i}: unknown label {lab!r}") from None
        elif lab in (0, 1):
            out.append(int(lab))
        else:
            raise DataError(f"row {i}: unknown label {lab!r}")
    return np.asarray(out, dtype=np.int64)


@dataclass
class LabeledDataset:
    X: np.ndarray
    y: np.ndarray
    sources: list[str] = field(default_factory=list)
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64).reshape(-1, len(self.feature_names))
        self.y = encode_labels(self.y) if len(self.y) else np.zeros(0, dtype=np.int64)
        if self.X.shape[0] != self.y.shape[0]:
            raise DataError(f"{self.X.shape[0]} feature rows but {self.y.shape[0]} labels")
        if self.sources and len(self.sources) != len(self.y):
            raise DataError("sources must align with rows")

    def __len__(self):
        return len(self.y)

    @property
    def counts(self) -> dict[str, int]:
        return {name: int(np.sum(self.y == code)) for code, name in enumerate(LABELS)}

    @property
    def rows(self):
        return [(x, LABELS[c]) for x, c in zip(self.X, self.y)]

    def equals(self, other: LabeledDataset) -> bool:
        """Exact equality of names, values and labels (provenance ignored)."""
        return (
            tuple(self.feature_names) == tuple(other.feature_names)
            and self.X.shape == other.X.shape
            and bool(np.array_equal(self.X, other.X))
            and bool(np.array_equal(self.y, other.y))
        )

    def require_both_labels(self):
        counts = self.counts
        missing = [name for name, n in counts.items() if n == 0]
        if missing:
            raise DataError(f"dataset has no {'/'.join(missing)} rows; need both labels")
