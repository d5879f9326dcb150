"""Classifiers with a shared fit/predict_proba interface and JSON persistence."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..dataset import FEATURE_NAMES
from ._base import PhishClassifier, check_features
from .mlp import MultilayerPerceptron
from .naive_bayes import GaussianNaiveBayes
from .svm import LinearSVM
from .trees import RandomForest, RandomTree

CLASSIFIERS: dict[str, type[PhishClassifier]] = {
    "nb": GaussianNaiveBayes,
    "rt": RandomTree,
    "rf": RandomForest,
    "nn": MultilayerPerceptron,
    "svm": LinearSVM,
}

MODEL_FORMAT = "phishout-model"
MODEL_VERSION = 1

# data-dependent defaults resolved for the fixed 8-feature layout
_MATERIALIZED = {"hidden_units": (len(FEATURE_NAMES) + 2 + 1) // 2, "n_candidates": 4}


class ModelFormatError(ValueError):
    pass


@dataclass
class ClassifierSpec:
    """Kind + hyperparameters + seed, with every default filled in."""

    kind: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 42

    def __post_init__(self):
        if self.kind not in CLASSIFIERS:
            raise ValueError(f"unknown classifier {self.kind!r}; choose from {', '.join(CLASSIFIERS)}")
        cls = CLASSIFIERS[self.kind]
        params = cls().get_params()
        params.pop("random_state", None)
        unknown = set(self.hyperparameters) - set(params)
        if unknown:
            raise ValueError(f"unknown {self.kind} hyperparameters: {', '.join(sorted(unknown))}")
        for key, value in _MATERIALIZED.items():
            if key in params and params[key] is None:
                params[key] = value
        params.update(self.hyperparameters)
        self.hyperparameters = params

    def build(self, seed_offset: int = 0) -> PhishClassifier:
        est = CLASSIFIERS[self.kind](**self.hyperparameters)
        if "random_state" in est.get_params():
            est.set_params(random_state=self.seed + seed_offset)
        return est


def make_classifier(kind: str, seed: int = 42, **hyperparameters) -> PhishClassifier:
    return ClassifierSpec(kind, hyperparameters, seed).build()


def model_to_dict(model: PhishClassifier) -> dict:
    params = model.get_params()
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind,
        "seed": params.pop("random_state", None),
        "hyperparameters": params,
        "feature_names": list(FEATURE_NAMES),
        "state": model.get_state(),
    }


def model_from_dict(doc: dict) -> PhishClassifier:
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError("not a phishout model document")
    if doc.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {doc.get('version')!r}")
    kind = doc.get("kind")
    if kind not in CLASSIFIERS:
        raise ModelFormatError(f"unknown model kind {kind!r}")
    params = dict(doc.get("hyperparameters", {}))
    if doc.get("seed") is not None:
        params["random_state"] = doc["seed"]
    try:
        return CLASSIFIERS[kind](**params).set_state(doc["state"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupt model document: {exc}") from None


def save_model(model: PhishClassifier, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), sort_keys=True) + "\n", encoding="utf-8")


def load_model(path) -> PhishClassifier:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON ({exc})") from None
    return model_from_dict(doc)


__all__ = [
    "CLASSIFIERS",
    "ClassifierSpec",
    "GaussianNaiveBayes",
    "LinearSVM",
    "ModelFormatError",
    "MultilayerPerceptron",
    "PhishClassifier",
    "RandomForest",
    "RandomTree",
    "check_features",
    "load_model",
    "make_classifier",
    "model_from_dict",
    "model_to_dict",
    "save_model",
]
