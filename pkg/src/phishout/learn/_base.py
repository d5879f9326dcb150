from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.preprocessing import StandardScaler
from sklearn.utils.validation import check_is_fitted

from ..dataset import DataError, encode_labels


def check_features(X) -> np.ndarray:
    """2-D float matrix with every value finite; the offending row is named otherwise."""
    try:
        X = np.asarray(X, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DataError(f"features are not numeric: {exc}") from None
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise DataError(f"expected a 2-D feature matrix, got shape {X.shape}")
    bad = np.flatnonzero(~np.isfinite(X).all(axis=1))
    if bad.size:
        raise DataError(f"non-finite feature value in row {int(bad[0])}")
    return X


def check_training_data(X, y):
    X = check_features(X)
    y = encode_labels(y)
    if X.shape[0] != y.shape[0]:
        raise DataError(f"{X.shape[0]} rows but {y.shape[0]} labels")
    if not (np.any(y == 0) and np.any(y == 1)):
        raise DataError("training data must contain both ham and phish rows")
    return X, y


def scaler_state(scaler: StandardScaler) -> dict:
    return {"mean": scaler.mean_.tolist(), "scale": scaler.scale_.tolist()}


def scaler_from_state(state: dict) -> StandardScaler:
    scaler = StandardScaler()
    scaler.mean_ = np.asarray(state["mean"], dtype=np.float64)
    scaler.scale_ = np.asarray(state["scale"], dtype=np.float64)
    scaler.var_ = scaler.scale_**2
    scaler.n_features_in_ = scaler.mean_.shape[0]
    scaler.n_samples_seen_ = 0
    return scaler


class PhishClassifier(ClassifierMixin, BaseEstimator):
    """Shared plumbing: label coding (0 = ham, 1 = phish), validation, thresholding.

    Subclasses implement ``_fit``, ``_phish_proba`` and the ``_state`` pair used
    for JSON serialization.
    """

    kind: str = ""

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        self._fit(X, y)
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "classes_")
        X = check_features(X)
        if X.shape[1] != self.n_features_in_:
            raise DataError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        p = np.clip(self._phish_proba(X), 0.0, 1.0)
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        # ties go to phish so borderline mail is flagged for review
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(np.int64)

    def get_state(self) -> dict:
        check_is_fitted(self, "classes_")
        return {"n_features": int(self.n_features_in_), **self._state()}

    def set_state(self, state: dict):
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = int(state["n_features"])
        self._load_state(state)
        return self

    def _fit(self, X, y):
        raise NotImplementedError

    def _phish_proba(self, X):
        raise NotImplementedError

    def _state(self) -> dict:
        raise NotImplementedError

    def _load_state(self, state: dict):
        raise NotImplementedError
