"""Tolerant mbox / MIME reading.

Everything here is total over arbitrary bytes: broken input degrades to a
``malformed`` flag instead of an exception, because public phishing corpora
are full of hand-mangled messages.
"""
from __future__ import annotations

import binascii
import email
import email.utils
import logging
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from email.policy import compat32
from pathlib import Path

import numpy as np

from .dataset import HAM, PHISH, DataError, LabeledDataset

log = logging.getLogger(__name__)

MAX_MULTIPART_DEPTH = 32

_HEADER_START = re.compile(rb"\A[^\s:]+[ \t]*:")
_STUFFED_FROM = re.compile(rb"^>(>*From )", re.MULTILINE)
_FOLD = re.compile(r"\r?\n(?=[ \t])")

# declared charsets decoded as themselves; anything else goes through latin-1
_STRICT_CHARSETS = {
    "us-ascii": "ascii",
    "ascii": "ascii",
    "utf-8": "utf-8",
    "utf8": "utf-8",
    "iso-8859-1": "latin-1",
    "iso8859-1": "latin-1",
    "latin-1": "latin-1",
    "latin1": "latin-1",
}


class CorpusError(DataError):
    """A corpus path is missing or yields no usable messages."""


@dataclass(frozen=True)
class RawMessage:
    """One message cut out of an mbox or read from a single file.

    ``data`` holds the bytes exactly as stored (``>From`` quoting intact) so
    that ``delimiter + data`` over all messages rebuilds the archive;
    :attr:`content` is the unstuffed form handed to the MIME parser.
    """

    data: bytes
    source_offset: int = 0
    source_file: str = ""
    delimiter: bytes = b""

    @property
    def content(self) -> bytes:
        return _STUFFED_FROM.sub(rb"\1", self.data)

    @property
    def malformed(self) -> bool:
        return not _HEADER_START.match(self.content)


@dataclass(frozen=True)
class EmailDocument:
    headers: tuple[tuple[str, str], ...] = ()
    text_parts: tuple[str, ...] = ("",)
    html_parts: tuple[str, ...] = ()
    malformed: bool = False

    def header(self, name: str, default: str | None = None) -> str | None:
        name = name.lower()
        for key, value in self.headers:
            if key.lower() == name:
                return value
        return default


def _iter_lines(data: bytes):
    pos, n = 0, len(data)
    while pos < n:
        nl = data.find(b"\n", pos)
        end = n if nl < 0 else nl + 1
        yield pos, data[pos:end]
        pos = end


def parse_mbox(data: bytes, source_file: str = "") -> list[RawMessage]:
    """Split an mbox archive on ``From `` lines that open the file or follow a blank line."""
    messages: list[RawMessage] = []
    start = 0
    delim = b""
    delim_offset = 0
    prev_blank = True
    for pos, line in _iter_lines(data):
        if prev_blank and line.startswith(b"From "):
            if pos > start or delim:
                messages.append(RawMessage(data[start:pos], delim_offset, source_file, delim))
            delim = line
            delim_offset = pos
            start = pos + len(line)
        prev_blank = line.rstrip(b"\r\n") == b""
    if start < len(data) or delim:
        messages.append(RawMessage(data[start:], delim_offset, source_file, delim))
    return messages


def decode_transfer_encoding(body: bytes, encoding: str | None) -> bytes:
    enc = (encoding or "").strip().lower()
    if enc == "quoted-printable":
        return binascii.a2b_qp(body)
    if enc == "base64":
        compact = re.sub(rb"\s+", b"", body)
        try:
            return binascii.a2b_base64(compact)
        except binascii.Error:
            # truncated tails are common: decode the complete quanta, keep the rest verbatim
            cut = len(compact) - len(compact) % 4
            try:
                return binascii.a2b_base64(compact[:cut]) + compact[cut:]
            except binascii.Error:
                return body
    return body


def decode_charset(body: bytes, charset: str | None) -> str:
    codec = _STRICT_CHARSETS.get((charset or "").strip().strip('"').lower())
    if codec is None:
        return body.decode("latin-1")
    return body.decode(codec, errors="replace")


def _raw_payload(part) -> bytes:
    # get_payload() would already charset-decode 8-bit bodies with replacement chars
    payload = part._payload
    if isinstance(payload, bytes):
        return payload
    if not isinstance(payload, str):
        return b""
    try:
        return payload.encode("ascii", "surrogateescape")
    except UnicodeEncodeError:
        return payload.encode("utf-8", "surrogateescape")


def _clean_header(value) -> str:
    value = _FOLD.sub("", str(value))
    raw = value.encode("utf-8", "surrogateescape")
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        return raw.decode("latin-1")


def _header_str(part, name: str) -> str | None:
    value = part.get(name)
    return None if value is None else _clean_header(value)


def _charset(part) -> str | None:
    # RFC 2231 parameters come back as (charset, language, value) tuples
    value = part.get_param("charset")
    if isinstance(value, tuple):
        value = email.utils.collapse_rfc2231_value(value)
    return None if value is None else _clean_header(value)


class _Degraded(Exception):
    pass


def _collect(part, depth: int, text: list[str], html: list[str]):
    if depth > MAX_MULTIPART_DEPTH:
        raise _Degraded("multipart nesting too deep")
    maintype = part.get_content_maintype()
    if maintype == "multipart":
        payload = part.get_payload()
        if not isinstance(payload, list):
            raise _Degraded("multipart body without parsable boundary")
        for sub in payload:
            _collect(sub, depth + 1, text, html)
        return
    ctype = part.get_content_type()
    if ctype not in ("text/plain", "text/html"):
        return
    body = decode_transfer_encoding(_raw_payload(part), _header_str(part, "content-transfer-encoding"))
    decoded = decode_charset(body, _charset(part))
    (text if ctype == "text/plain" else html).append(decoded)


def _body_after_headers(data: bytes) -> bytes:
    m = re.search(rb"\r?\n\r?\n", data)
    return data[m.end():] if m else data


def parse_mime(msg: RawMessage | bytes) -> EmailDocument:
    data = msg.content if isinstance(msg, RawMessage) else bytes(msg)
    if not _HEADER_START.match(data):
        return EmailDocument((), (decode_charset(data, None),), (), True)
    try:
        message = email.message_from_bytes(data, policy=compat32)
        headers = tuple((str(k), _clean_header(v)) for k, v in message.raw_items())
    except Exception:  # stdlib parser recursion or decoding trouble on hostile input
        return EmailDocument((), (decode_charset(_body_after_headers(data), None),), (), True)
    text: list[str] = []
    html: list[str] = []
    try:
        _collect(message, 0, text, html)
    except (_Degraded, RecursionError):
        body = decode_charset(_body_after_headers(data), _charset(message))
        return EmailDocument(headers, (body,), (), True)
    if not text and not html:
        text.append("")
    return EmailDocument(headers, tuple(text), tuple(html), False)


def read_messages(path: str | os.PathLike) -> list[RawMessage]:
    """Read an mbox file, or a directory holding one raw message per file."""
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus path does not exist: {path}")
    if path.is_dir():
        out = []
        for entry in sorted(path.iterdir()):
            if entry.name.startswith(".") or not entry.is_file():
                continue
            data = entry.read_bytes()
            delim = b""
            if data.startswith(b"From "):
                nl = data.find(b"\n")
                cut = len(data) if nl < 0 else nl + 1
                delim, data = data[:cut], data[cut:]
            out.append(RawMessage(data, 0, str(entry), delim))
        return out
    return parse_mbox(path.read_bytes(), str(path))


def _featurize(content: bytes, words: frozenset[str]):
    from .features import PhishyDictionary, extract_features

    doc = parse_mime(content)
    return tuple(extract_features(doc, PhishyDictionary(words, "worker")))


def _label_messages(path, dictionary, jobs: int):
    msgs = [m for m in read_messages(path) if m.data.strip()]
    if not msgs:
        raise CorpusError(f"no messages found in {path}")
    contents = [m.content for m in msgs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            vectors = list(pool.map(_featurize, contents, [dictionary.words] * len(contents), chunksize=32))
    else:
        vectors = [_featurize(c, dictionary.words) for c in contents]
    sources = [f"{m.source_file}:{m.source_offset}" for m in msgs]
    malformed = sum(m.malformed for m in msgs)
    if malformed:
        log.info("%s: %d of %d messages lack a header block", path, malformed, len(msgs))
    return vectors, sources


def load_labeled_corpus(phish_path, ham_path, dictionary=None, jobs: int = 1) -> LabeledDataset:
    """Parse both corpora, extract features and label rows by source."""
    from .features import PhishyDictionary

    dictionary = dictionary or PhishyDictionary.builtin()
    pv, ps = _label_messages(phish_path, dictionary, jobs)
    hv, hs = _label_messages(ham_path, dictionary, jobs)
    X = np.array(pv + hv, dtype=np.float64)
    y = np.array([PHISH] * len(pv) + [HAM] * len(hv))
    ds = LabeledDataset(X, y, ps + hs)
    log.info("loaded corpus: %s", ds.counts)
    return ds
