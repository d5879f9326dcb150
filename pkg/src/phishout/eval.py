"""Stratified cross-validation and the precision/recall/F/accuracy/FPR/MAE suite.

Phish is the positive class throughout.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import clone

from .dataset import PHISH, DataError, encode_labels


class MetricWarning(UserWarning):
    """A metric had a zero denominator and was reported as 0."""


@dataclass(frozen=True)
class ConfusionMatrix:
    TP: int
    FP: int
    FN: int
    TN: int

    def __post_init__(self):
        if min(self.TP, self.FP, self.FN, self.TN) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.TP + self.FP + self.FN + self.TN

    @classmethod
    def from_predictions(cls, y_true, y_pred) -> ConfusionMatrix:
        t = np.asarray(y_true) == PHISH
        p = np.asarray(y_pred) == PHISH
        return cls(int(np.sum(t & p)), int(np.sum(~t & p)), int(np.sum(t & ~p)), int(np.sum(~t & ~p)))


def _percent(num: int, den: int, name: str) -> float:
    # int / int true division rounds once, so the result is the exact ratio to double precision
    if den == 0:
        warnings.warn(f"{name} undefined (zero denominator); reported as 0", MetricWarning, stacklevel=3)
        return 0.0
    return 100 * num / den


def compute_metrics(cm: ConfusionMatrix) -> dict[str, float]:
    """Percentages for precision, recall, F-measure, accuracy and false-positive rate."""
    if cm.total == 0:
        raise ValueError("confusion matrix is empty")
    tp, fp, fn, tn = (int(v) for v in (cm.TP, cm.FP, cm.FN, cm.TN))
    precision = _percent(tp, tp + fp, "precision")
    recall = _percent(tp, tp + fn, "recall")
    # harmonic mean of P and R reduces to 2TP / (2TP + FP + FN); undefined when P + R = 0
    f_measure = _percent(2 * tp, 2 * tp + fp + fn if tp else 0, "F-measure")
    return {
        "precision": precision,
        "recall": recall,
        "f_measure": f_measure,
        "accuracy": 100 * (tp + tn) / cm.total,
        "fpr": _percent(fp, fp + tn, "FPR"),
    }


def mean_absolute_error(probs, labels) -> float:
    probs = np.asarray(probs, dtype=np.float64)
    truth = (encode_labels(labels) == PHISH).astype(np.float64)
    if probs.shape != truth.shape or probs.size == 0:
        raise ValueError("probabilities and labels must be non-empty and aligned")
    if np.any((probs < 0) | (probs > 1)):
        raise ValueError("probabilities must lie in [0, 1]")
    return float(np.mean(np.abs(probs - truth)))


def stratified_folds(y, k: int = 10, seed: int = 42) -> list[np.ndarray]:
    """Shuffle each label's rows with ``seed``, then deal them round-robin into ``k`` folds.

    The dealing position carries over from one label to the next so fold
    sizes also differ by at most one.
    """
    y = encode_labels(y)
    if k < 2:
        raise DataError("need at least 2 folds")
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(y), dtype=np.int64)
    offset = 0
    for label in np.unique(y):
        members = np.flatnonzero(y == label)
        if len(members) < k:
            raise DataError(f"label {label} has {len(members)} rows, fewer than {k} folds")
        members = rng.permutation(members)
        assignment[members] = (offset + np.arange(len(members))) % k
        offset = (offset + len(members)) % k
    folds = [np.flatnonzero(assignment == f) for f in range(k)]
    return folds


class StratifiedRoundRobinKFold:
    """sklearn-compatible splitter wrapping :func:`stratified_folds`."""

    def __init__(self, n_splits=10, random_state=42):
        self.n_splits = n_splits
        self.random_state = random_state

    def get_n_splits(self, X=None, y=None, groups=None):
        return self.n_splits

    def split(self, X, y, groups=None):
        all_idx = np.arange(len(y))
        for test in stratified_folds(y, self.n_splits, self.random_state):
            train = np.setdiff1d(all_idx, test, assume_unique=True)
            yield train, test


@dataclass(frozen=True)
class MetricsReport:
    classifier: str
    folds: int
    seed: int
    precision: float
    recall: float
    f_measure: float
    accuracy: float
    fpr: float
    mae: float
    confusion: ConfusionMatrix

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("precision", "recall", "f_measure", "accuracy", "fpr"):
            d[key] = round(d[key], 2)
        d["fpr_3dp"] = round(self.fpr, 3)
        d["mae"] = round(self.mae, 4)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


REPORT_COLUMNS = ("Classifier", "Precision", "Recall", "F-Measure", "Accuracy", "FPR", "MAE")


def format_table(reports: list[MetricsReport]) -> str:
    rows = [REPORT_COLUMNS]
    for r in reports:
        rows.append((r.classifier.upper(), f"{r.precision:.2f}", f"{r.recall:.2f}", f"{r.f_measure:.2f}",
                     f"{r.accuracy:.2f}", f"{r.fpr:.3f}", f"{100 * r.mae:.2f}%"))
    widths = [max(len(row[i]) for row in rows) for i in range(len(REPORT_COLUMNS))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    if len(reports) == 1:
        cm = reports[0].confusion
        lines.append(f"confusion: TP={cm.TP} FP={cm.FP} FN={cm.FN} TN={cm.TN}  "
                     f"({reports[0].folds}-fold CV, seed {reports[0].seed})")
    return "\n".join(lines)


def cross_validate(estimator, X, y, k: int = 10, seed: int = 42, kind: str | None = None) -> MetricsReport:
    """Train on k-1 folds, predict the held-out fold, and pool counts over all folds.

    ``estimator`` is a fitted-or-not sklearn classifier or a
    :class:`~phishout.learn.ClassifierSpec`. Fold ``i`` trains with the
    classifier seed plus ``i``.
    """
    from .learn import ClassifierSpec

    X = np.asarray(X, dtype=np.float64)
    y = encode_labels(y)
    folds = stratified_folds(y, k, seed)
    covered = np.concatenate(folds)
    if len(covered) != len(y) or len(np.unique(covered)) != len(y):
        raise AssertionError("folds do not partition the dataset")

    pred = np.empty(len(y), dtype=np.int64)
    proba = np.empty(len(y), dtype=np.float64)
    all_idx = np.arange(len(y))
    for i, test in enumerate(folds):
        train = np.setdiff1d(all_idx, test, assume_unique=True)
        if isinstance(estimator, ClassifierSpec):
            model = estimator.build(seed_offset=i)
        else:
            model = clone(estimator)
            if "random_state" in model.get_params() and model.get_params()["random_state"] is not None:
                model.set_params(random_state=model.get_params()["random_state"] + i)
        model.fit(X[train], y[train])
        p = model.predict_proba(X[test])[:, 1]
        proba[test] = p
        pred[test] = (p >= 0.5).astype(np.int64)

    cm = ConfusionMatrix.from_predictions(y, pred)
    if cm.total != len(y):
        raise AssertionError("pooled confusion total differs from dataset size")
    name = kind or getattr(estimator, "kind", None) or type(estimator).__name__
    return MetricsReport(name, k, seed, **compute_metrics(cm), mae=mean_absolute_error(proba, y), confusion=cm)
