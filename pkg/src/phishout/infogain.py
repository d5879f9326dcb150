"""Information Gain over MDL-discretized numeric features."""
from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .dataset import FEATURE_NAMES, DataError

# cut candidates whose split entropy is within this of the best are treated as ties
_TIE_EPS = 1e-12


@dataclass(frozen=True)
class RankedFeature:
    name: str
    gain: float
    rank: int
    cut_points: list[float] = field(default_factory=list)

    def to_dict(self):
        return {"name": self.name, "gain": self.gain, "rank": self.rank, "cut_points": list(self.cut_points)}


def entropy(label_counts) -> float:
    """Shannon entropy in bits of a label histogram (mapping or sequence of counts)."""
    counts = list(label_counts.values()) if isinstance(label_counts, Mapping) else list(label_counts)
    counts = np.asarray(counts, dtype=np.float64)
    if np.any(counts < 0):
        raise ValueError("label counts must be non-negative")
    total = counts.sum()
    if total <= 0:
        raise ValueError("entropy of an empty distribution is undefined")
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum()) + 0.0


def _class_counts(codes: np.ndarray, n_classes: int) -> np.ndarray:
    return np.bincount(codes, minlength=n_classes)


def _best_cut(values: np.ndarray, codes: np.ndarray, n_classes: int):
    """Best boundary cut of an already sorted block; returns (index, split_entropy) or None.

    ``index`` i splits the block into ``[:i]`` / ``[i:]``.
    """
    n = len(values)
    distinct_end = np.flatnonzero(np.diff(values) != 0) + 1  # first index of each new value
    if distinct_end.size == 0:
        return None
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), codes] = 1.0
    cum = np.cumsum(onehot, axis=0)
    total = cum[-1]

    # boundary points: adjacent value groups that are not both pure in the same class
    group_starts = np.concatenate(([0], distinct_end))
    group_ends = np.concatenate((distinct_end, [n]))
    group_counts = np.diff(np.vstack([np.zeros(n_classes), cum[group_ends - 1]]), axis=0)
    pure_label = np.where((group_counts > 0).sum(axis=1) == 1, group_counts.argmax(axis=1), -1)
    candidates = [
        group_starts[g + 1]
        for g in range(len(group_starts) - 1)
        if not (pure_label[g] >= 0 and pure_label[g] == pure_label[g + 1])
    ]
    if not candidates:
        return None
    idx = np.asarray(candidates)
    left = cum[idx - 1]
    right = total - left
    nl = left.sum(axis=1)
    nr = right.sum(axis=1)

    def _h(c, m):
        with np.errstate(divide="ignore", invalid="ignore"):
            p = c / m[:, None]
            terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        return terms.sum(axis=1)

    split_h = (nl * _h(left, nl) + nr * _h(right, nr)) / n
    best = split_h.min()
    pos = int(np.flatnonzero(split_h <= best + _TIE_EPS)[0])
    return int(idx[pos]), float(split_h[pos])


def _mdl_accepts(codes: np.ndarray, cut: int, split_h: float, n_classes: int) -> bool:
    n = len(codes)
    full = _class_counts(codes, n_classes)
    lc = _class_counts(codes[:cut], n_classes)
    rc = _class_counts(codes[cut:], n_classes)
    h, h1, h2 = entropy(full), entropy(lc), entropy(rc)
    k, k1, k2 = (int((c > 0).sum()) for c in (full, lc, rc))
    gain = h - split_h
    delta = math.log2(3**k - 2) - (k * h - k1 * h1 - k2 * h2)
    return gain > (math.log2(n - 1) + delta) / n


def _as_codes(labels) -> tuple[np.ndarray, int]:
    _, codes = np.unique(np.asarray(labels), return_inverse=True)
    return codes.astype(np.int64), int(codes.max()) + 1 if len(codes) else 0


def discretize_mdl(values, labels) -> list[float]:
    """Fayyad-Irani recursive minimum-entropy splitting with the MDL stopping rule."""
    values = np.asarray(values, dtype=np.float64)
    codes, n_classes = _as_codes(labels)
    if values.shape != codes.shape or values.size == 0:
        raise ValueError("values and labels must be non-empty and the same length")
    order = np.argsort(values, kind="stable")
    values, codes = values[order], codes[order]

    cuts: list[float] = []
    stack = [(0, len(values))]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        v, c = values[lo:hi], codes[lo:hi]
        found = _best_cut(v, c, n_classes)
        if found is None:
            continue
        i, split_h = found
        if not _mdl_accepts(c, i, split_h, n_classes):
            continue
        cuts.append(float((v[i - 1] + v[i]) / 2.0))
        stack.append((lo, lo + i))
        stack.append((lo + i, hi))
    return sorted(cuts)


def information_gain(values, labels, cut_points=None) -> float:
    values = np.asarray(values, dtype=np.float64)
    codes, n_classes = _as_codes(labels)
    if cut_points is None:
        cut_points = discretize_mdl(values, codes)
    h = entropy(_class_counts(codes, n_classes))
    if not cut_points:
        return 0.0
    bins = np.searchsorted(np.asarray(cut_points), values, side="left")
    cond = 0.0
    n = len(values)
    for b in np.unique(bins):
        member = codes[bins == b]
        cond += len(member) / n * entropy(_class_counts(member, n_classes))
    return min(max(h - cond, 0.0), h)


def rank_features(X, y, feature_names=FEATURE_NAMES) -> list[RankedFeature]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[1] != len(feature_names):
        raise DataError("feature matrix, labels and names do not line up")
    if X.shape[0] < 2 or np.unique(y).size < 2:
        raise DataError("ranking needs at least two rows and both labels")
    scored = []
    for j, name in enumerate(feature_names):
        cuts = discretize_mdl(X[:, j], y)
        scored.append((information_gain(X[:, j], y, cuts), j, name, cuts))
    scored.sort(key=lambda s: (-s[0], s[1]))
    return [RankedFeature(name, gain, r, cuts) for r, (gain, _, name, cuts) in enumerate(scored, 1)]


class InfoGainSelector(TransformerMixin, BaseEstimator):
    """Rank columns by MDL Information Gain and keep the ``k`` best (all when ``None``)."""

    def __init__(self, k=None, feature_names=None):
        self.k = k
        self.feature_names = feature_names

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        names = tuple(self.feature_names) if self.feature_names is not None else FEATURE_NAMES
        if len(names) != X.shape[1]:
            names = tuple(f"x{j}" for j in range(X.shape[1]))
        self.ranking_ = rank_features(X, y, names)
        index = {name: j for j, name in enumerate(names)}
        self.scores_ = np.zeros(X.shape[1])
        for rf in self.ranking_:
            self.scores_[index[rf.name]] = rf.gain
        k = X.shape[1] if self.k is None else int(self.k)
        self.support_ = np.asarray(sorted(index[rf.name] for rf in self.ranking_[:k]), dtype=int)
        self.feature_names_in_ = np.asarray(names, dtype=object)
        return self

    def transform(self, X):
        check_is_fitted(self, "support_")
        return np.asarray(X, dtype=np.float64)[:, self.support_]

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "support_")
        return self.feature_names_in_[self.support_]
