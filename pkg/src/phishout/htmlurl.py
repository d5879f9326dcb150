"""Hyperlink extraction and URL predicates.

The anchor scanner is a regex walk rather than a DOM parser: phishing HTML is
routinely broken and we only need ``<a href>`` plus the text it displays.
"""
from __future__ import annotations

import ipaddress
import re
from dataclasses import dataclass
from typing import Literal, NamedTuple

HTML_ANCHOR = "html_anchor"
PLAIN_TEXT = "plain_text"
COUNTED_SCHEMES = frozenset({"http", "https", "ftp"})


@dataclass(frozen=True)
class Link:
    href: str
    visible_text: str
    origin: Literal["html_anchor", "plain_text"] = HTML_ANCHOR


class UrlParts(NamedTuple):
    scheme: str
    authority: str
    host: str
    path_query: str


_ANCHOR_OPEN = re.compile(r"<a(?=[\s/>])", re.IGNORECASE)
_ANCHOR_CLOSE = re.compile(r"</a\s*>", re.IGNORECASE)
_ATTR = re.compile(
    r"""([^\s"'<>/=]+)          # name
        (?:\s*=\s*
           (?:"([^"]*)"?        # double quoted (tolerate missing close)
             |'([^']*)'?
             |([^\s>]*)))?""",
    re.VERBOSE,
)
_TAG = re.compile(r"<[^>]*>?")
_WS = re.compile(r"\s+")
_ENTITY = re.compile(r"&(?:#(\d{1,7})|#[xX]([0-9a-fA-F]{1,6})|(amp|lt|gt|quot|nbsp));?")
_NAMED = {"amp": "&", "lt": "<", "gt": ">", "quot": '"', "nbsp": " "}

_PLAIN_URL = re.compile(r"""(?:https?|ftp)://[^\s<>"')\]}]+""", re.IGNORECASE)
_TRAILING_PUNCT = ".,;:!?"


def decode_entities(text: str) -> str:
    """Decode the handful of entities that matter for link text."""

    def repl(m):
        dec, hexa, name = m.groups()
        if name:
            return _NAMED[name]
        try:
            return chr(int(dec) if dec else int(hexa, 16))
        except (ValueError, OverflowError):
            return m.group(0)

    return _ENTITY.sub(repl, text)


def strip_tags(html: str) -> str:
    return _TAG.sub(" ", html)


def _tag_end(html: str, pos: int) -> int:
    """Index just past the '>' closing the tag that starts before ``pos``; quotes respected."""
    quote = None
    for i in range(pos, len(html)):
        ch = html[i]
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch == ">":
            return i + 1
    # unbalanced quote: fall back to the first bare '>'
    gt = html.find(">", pos)
    return len(html) if gt < 0 else gt + 1


def _href_of(attrs: str) -> str | None:
    for m in _ATTR.finditer(attrs):
        if m.group(1).lower() == "href":
            value = next((v for v in m.groups()[1:] if v is not None), None)
            return value
    return None


def _clean_text(fragment: str) -> str:
    return _WS.sub(" ", decode_entities(strip_tags(fragment))).strip()


def extract_anchors(html: str) -> list[Link]:
    links = []
    for m in _ANCHOR_OPEN.finditer(html):
        end = _tag_end(html, m.end())
        attrs = html[m.end():end].rstrip(">")
        href = _href_of(attrs)
        if href is None or not href.strip():
            continue
        close = _ANCHOR_CLOSE.search(html, end)
        nxt = _ANCHOR_OPEN.search(html, end)
        if close is None or (nxt is not None and nxt.start() < close.start()):
            text = ""
        else:
            text = _clean_text(html[end:close.start()])
        links.append(Link(href.strip(), text, HTML_ANCHOR))
    return links


def extract_plaintext_urls(text: str) -> list[Link]:
    links = []
    for m in _PLAIN_URL.finditer(text):
        url = m.group(0).rstrip(_TRAILING_PUNCT)
        if url.endswith("://"):
            continue
        links.append(Link(url, url, PLAIN_TEXT))
    return links


def split_url(href: str) -> UrlParts | None:
    """Split ``scheme://authority/rest``; ``None`` marks a malformed URL."""
    href = href.strip()
    scheme, sep, rest = href.partition("://")
    if not sep:
        return None
    m = re.search(r"[/?#]", rest)
    authority, path_query = (rest[:m.start()], rest[m.start():]) if m else (rest, "")
    host = authority.rpartition("@")[2]
    if host.startswith("["):
        close = host.find("]")
        host = host if close < 0 else host[:close + 1]
    else:
        host = host.split(":", 1)[0]
    host = host.lower()
    if not host or re.search(r"\s", host):
        return None
    return UrlParts(scheme.lower(), authority, host, path_query)


_DOTTED_QUAD = re.compile(r"(?:25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d|0\d{1,2})(?:\.(?:25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d|0\d{1,2})){3}")
_DECIMAL = re.compile(r"[0-9]+")
_HEX = re.compile(r"0x[0-9a-f]+", re.IGNORECASE)


def host_is_ip(host: str) -> bool:
    if _DOTTED_QUAD.fullmatch(host) or _DECIMAL.fullmatch(host) or _HEX.fullmatch(host):
        return True
    if host.startswith("[") and host.endswith("]"):
        try:
            ipaddress.IPv6Address(host[1:-1])
        except ValueError:
            return False
        return True
    return False


def url_contains_at(parts: UrlParts) -> bool:
    return "@" in parts.authority


_PERCENT_ESCAPE = re.compile(r"%[0-9A-Fa-f]{2}")


def url_has_encoded_chars(href: str) -> bool:
    return bool(_PERCENT_ESCAPE.search(href)) or any(not " " <= ch <= "~" for ch in href)


_DOMAIN = re.compile(r"(?:[a-z0-9](?:[a-z0-9-]*[a-z0-9])?\.)+[a-z]{2,}", re.IGNORECASE)
_TOKEN_STRIP = "()[]{}<>\"'.,;:!?"


def normalize_host(host: str) -> str:
    host = host.casefold().rstrip(".")
    return host[4:] if host.startswith("www.") else host


def _shown_host(token: str) -> str | None:
    """Host a reader would infer from one word of link text, if it looks like a URL or domain."""
    token = token.strip(_TOKEN_STRIP)
    if "://" in token:
        parts = split_url(token)
        return parts.host if parts else None
    candidate = re.split(r"[/?#]", token, maxsplit=1)[0]
    candidate = candidate.rpartition("@")[2].split(":", 1)[0]
    return candidate if _DOMAIN.fullmatch(candidate) else None


def link_is_mismatch(link: Link) -> bool:
    if link.origin != HTML_ANCHOR:
        return False
    target = split_url(link.href)
    if target is None:
        return False
    target_host = normalize_host(target.host)
    for token in link.visible_text.split():
        shown = _shown_host(token)
        if shown is not None and normalize_host(shown) != target_host:
            return True
    return False
