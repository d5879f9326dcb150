"""The eight per-message features: body statistics plus URL abuse counts."""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .dataset import FEATURE_NAMES
from .htmlurl import (
    COUNTED_SCHEMES,
    decode_entities,
    extract_anchors,
    extract_plaintext_urls,
    host_is_ip,
    link_is_mismatch,
    split_url,
    url_contains_at,
    url_has_encoded_chars,
)

BUILTIN_PHISHY_WORDS = frozenset(
    {
        "account", "bank", "verify", "update", "confirm", "login", "password",
        "urgent", "suspend", "security", "click", "limited", "money", "credit",
        "paypal", "ebay", "ssn", "billing",
    }
)


class FeatureVector(NamedTuple):
    # field names are the canonical attribute names written to CSV/ARFF
    capRatio: float
    NoLinks: int
    NoLinksIP: int
    NoWords: int
    NoLinkMismatch: int
    NoPhishyWords: int
    isAtPresent: int
    NoLinkASCII: int


assert FeatureVector._fields == FEATURE_NAMES


@dataclass(frozen=True)
class PhishyDictionary:
    words: frozenset[str]
    source: str = "builtin"

    def __post_init__(self):
        if not self.words:
            raise ValueError("phishy-word dictionary is empty")
        bad = [w for w in self.words if w != w.lower() or not w or any(c.isspace() for c in w)]
        if bad:
            raise ValueError(f"dictionary entries must be lowercase single words: {sorted(bad)[:5]}")

    @classmethod
    def builtin(cls) -> PhishyDictionary:
        return cls(BUILTIN_PHISHY_WORDS, "builtin")

    @classmethod
    def from_file(cls, path) -> PhishyDictionary:
        words = set()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                words.add(line.lower())
        return cls(frozenset(words), str(path))


_HIDDEN_BLOCKS = re.compile(r"<(script|style)\b.*?</\1\s*>|<!--.*?-->", re.IGNORECASE | re.DOTALL)
_TAG = re.compile(r"<[^>]*>?")
_WS = re.compile(r"\s+")
_WORD = re.compile(r"[^\W_]+")


def html_to_text(html: str) -> str:
    text = _TAG.sub(" ", _HIDDEN_BLOCKS.sub(" ", html))
    return _WS.sub(" ", decode_entities(text)).strip()


def visible_text(doc) -> str:
    return "\n".join([*doc.text_parts, *(html_to_text(h) for h in doc.html_parts)])


def cap_ratio(text: str) -> float:
    upper = lower = 0
    for ch in text:
        cat = unicodedata.category(ch)
        if cat == "Lu":
            upper += 1
        elif cat == "Ll":
            lower += 1
    total = upper + lower
    return upper / total if total else 0.0


def words(text: str) -> list[str]:
    return _WORD.findall(text)


def count_words(text: str) -> int:
    return len(words(text))


def count_phishy_words(text: str, dictionary: PhishyDictionary) -> int:
    vocab = dictionary.words
    return sum(1 for w in words(text) if w.lower() in vocab)


def _six_digits(x: float) -> float:
    # the CSV/ARFF writers keep 6 significant digits; quantize once so files round-trip exactly
    return float(f"{x:.6g}")


def extract_features(doc, dictionary: PhishyDictionary | None = None) -> FeatureVector:
    dictionary = dictionary or PhishyDictionary.builtin()
    links = [link for html in doc.html_parts for link in extract_anchors(html)]
    links += [link for text in doc.text_parts for link in extract_plaintext_urls(text)]

    n_ip = n_encoded = n_mismatch = 0
    at_present = False
    for link in links:
        parts = split_url(link.href)
        if parts is None or parts.scheme not in COUNTED_SCHEMES:
            continue
        n_ip += host_is_ip(parts.host)
        n_encoded += url_has_encoded_chars(link.href)
        n_mismatch += link_is_mismatch(link)
        at_present = at_present or url_contains_at(parts)

    body = visible_text(doc)
    return FeatureVector(
        capRatio=_six_digits(cap_ratio(body)),
        NoLinks=len(links),
        NoLinksIP=n_ip,
        NoWords=count_words(body),
        NoLinkMismatch=n_mismatch,
        NoPhishyWords=count_phishy_words(body, dictionary),
        isAtPresent=int(at_present),
        NoLinkASCII=n_encoded,
    )


class PhishFeatureExtractor(TransformerMixin, BaseEstimator):
    """Turn parsed :class:`~phishout.corpus.EmailDocument` objects into an (n, 8) matrix.

    ``phishy_words`` is a path to a word list; ``None`` selects the builtin one.
    Stateless, so ``fit`` only validates the dictionary.
    """

    def __init__(self, phishy_words=None):
        self.phishy_words = phishy_words

    def _dictionary(self):
        if self.phishy_words is None:
            return PhishyDictionary.builtin()
        return PhishyDictionary.from_file(self.phishy_words)

    def fit(self, docs, y=None):
        self.dictionary_ = self._dictionary()
        self.n_features_out_ = len(FEATURE_NAMES)
        return self

    def transform(self, docs):
        dictionary = getattr(self, "dictionary_", None) or self._dictionary()
        rows = [extract_features(doc, dictionary) for doc in docs]
        return np.asarray(rows, dtype=np.float64).reshape(-1, len(FEATURE_NAMES))

    def get_feature_names_out(self, input_features=None):
        return np.asarray(FEATURE_NAMES, dtype=object)
