"""Phishing email detection from eight content and URL features."""

__version__ = "0.1.0"

from .corpus import EmailDocument, RawMessage, load_labeled_corpus, parse_mbox, parse_mime  # noqa: E402
from .dataset import FEATURE_NAMES, LABELS, DataError, LabeledDataset  # noqa: E402
from .eval import ConfusionMatrix, MetricsReport, compute_metrics, cross_validate, stratified_folds  # noqa: E402
from .features import FeatureVector, PhishFeatureExtractor, PhishyDictionary, extract_features  # noqa: E402
from .infogain import InfoGainSelector, information_gain, rank_features  # noqa: E402
from .learn import ClassifierSpec, load_model, make_classifier, save_model  # noqa: E402

__all__ = [
    "FEATURE_NAMES",
    "LABELS",
    "ClassifierSpec",
    "ConfusionMatrix",
    "DataError",
    "EmailDocument",
    "FeatureVector",
    "InfoGainSelector",
    "LabeledDataset",
    "MetricsReport",
    "PhishFeatureExtractor",
    "PhishyDictionary",
    "RawMessage",
    "compute_metrics",
    "cross_validate",
    "extract_features",
    "information_gain",
    "load_labeled_corpus",
    "load_model",
    "make_classifier",
    "parse_mbox",
    "parse_mime",
    "rank_features",
    "save_model",
    "stratified_folds",
]
