import ipaddress
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phishout.htmlurl import (
    HTML_ANCHOR,
    PLAIN_TEXT,
    Link,
    decode_entities,
    extract_anchors,
    extract_plaintext_urls,
    host_is_ip,
    link_is_mismatch,
    split_url,
    url_contains_at,
    url_has_encoded_chars,
)

DIGITS = set("0123456789")
HEXDIGITS = set("0123456789abcdef")


def numeric_host_oracle(host):
    """Brute-force: try every numeric host spelling by actually parsing it."""
    if host and set(host) <= DIGITS:
        int(host, 10)
        return True
    if host.startswith("0x") and len(host) > 2 and set(host[2:]) <= HEXDIGITS:
        int(host[2:], 16)
        return True
    parts = host.split(".")
    if len(parts) == 4 and all(p and len(p) <= 3 and set(p) <= DIGITS for p in parts):
        return all(0 <= int(p) <= 255 for p in parts)
    if len(host) > 2 and host[0] == "[" and host[-1] == "]":
        try:
            ipaddress.ip_address(host[1:-1])
        except ValueError:
            return False
        return ":" in host
    return False


def _random_host(rng):
    kind = rng.randrange(8)
    if kind == 0:
        return ".".join(str(rng.randint(0, 300)) for _ in range(4))
    if kind == 1:
        return ".".join(str(rng.randint(0, 255)) for _ in range(rng.choice([3, 4, 5])))
    if kind == 2:
        return str(rng.randint(0, 2**33))
    if kind == 3:
        return "0x" + "".join(rng.choice("0123456789abcdefg") for _ in range(rng.randint(0, 9)))
    if kind == 4:
        return "[" + str(ipaddress.IPv6Address(rng.getrandbits(128))) + "]"
    if kind == 5:
        return "[" + "".join(rng.choice("0123456789abcdef:z") for _ in range(rng.randint(0, 12))) + "]"
    if kind == 6:
        return "".join(rng.choice("abc.-19") for _ in range(rng.randint(1, 12)))
    return rng.choice(["www.paypal.com", "1.2.3", "1..2.3", "01.02.03.004", "0x", "x0c0", "1.2.3.4a"])


class TestAnchors:
    def test_simple(self):
        assert extract_anchors('<a href="http://x.com">x.com</a>') == [Link("http://x.com", "x.com", HTML_ANCHOR)]

    def test_case_and_quoting(self):
        links = extract_anchors("<A HREF=http://a.b>click</A><a href='http://a.b'>go</a>")
        assert [(l.href, l.visible_text) for l in links] == [("http://a.b", "click"), ("http://a.b", "go")]

    def test_no_links(self):
        assert extract_anchors("<p>no links</p>") == []

    def test_unterminated_anchor_has_empty_text(self):
        links = extract_anchors('<a href="http://a">dangling <a href="http://b">b</a><a href=http://c>')
        assert [(l.href, l.visible_text) for l in links] == [("http://a", ""), ("http://b", "b"), ("http://c", "")]

    def test_anchor_without_href_skipped(self):
        assert extract_anchors('<a name="top">top</a><abbr href="x">no</abbr>') == []

    def test_visible_text_entities_and_whitespace(self):
        [link] = extract_anchors('<a href="http://e.com" >  <b>Pay&amp;Pal</b>\n&#46;com&nbsp;&#x21;</a>')
        assert link.visible_text == "Pay&Pal .com !"

    def test_gt_inside_quoted_attribute(self):
        [link] = extract_anchors('<a title="a>b" href="http://q.com">q</a>')
        assert link.href == "http://q.com" and link.visible_text == "q"

    def test_duplicates_preserved(self):
        assert len(extract_anchors('<a href="u">1</a>' * 3)) == 3

    @given(st.text(alphabet=st.sampled_from(list('<a href="=\'> /A</a>xyz&#;')), max_size=120))
    def test_total(self, html):
        for link in extract_anchors(html):
            assert link.href


def test_entities_limited_table():
    assert decode_entities("&lt;&gt;&quot;&amp;&#65;&#x42;&copy;") == '<>"&AB&copy;'


class TestPlainUrls:
    def test_simple(self):
        assert extract_plaintext_urls("visit http://a.com/x now") == [Link("http://a.com/x", "http://a.com/x", PLAIN_TEXT)]

    def test_brackets_and_trailing_punct(self):
        assert [l.href for l in extract_plaintext_urls("see (https://a.com).")] == ["https://a.com"]

    def test_none(self):
        assert extract_plaintext_urls("no urls here") == []

    def test_case_insensitive_scheme_and_ftp(self):
        hrefs = [l.href for l in extract_plaintext_urls("HTTP://A.COM, ftp://f.org/x?y; <https://b.c/>")]
        assert hrefs == ["HTTP://A.COM", "ftp://f.org/x?y", "https://b.c/"]

    @given(st.text(max_size=200))
    def test_total_and_consistent(self, text):
        for link in extract_plaintext_urls(text):
            assert link.visible_text == link.href
            assert link.href[-1] not in ".,;:!?"


class TestSplitUrl:
    def test_userinfo_and_port(self):
        parts = split_url("http://user@10.0.0.1:80/a")
        assert parts.scheme == "http" and parts.host == "10.0.0.1" and "@" in parts.authority
        assert parts.path_query == "/a"

    def test_case_folding(self):
        parts = split_url("HTTPS://Ex.COM/p?q")
        assert (parts.scheme, parts.host, parts.path_query) == ("https", "ex.com", "/p?q")

    def test_malformed(self):
        assert split_url("not a url") is None
        assert split_url("mailto:a@b.com") is None

    def test_ipv6_with_port(self):
        assert split_url("http://[::1]:8080/").host == "[::1]"

    def test_query_only_authority(self):
        parts = split_url("http://evil.com?a@b")
        assert parts.authority == "evil.com" and parts.path_query == "?a@b"

    @given(st.text(max_size=80))
    def test_host_invariant(self, href):
        parts = split_url(href)
        if parts is not None:
            assert "/" not in parts.host
            assert not any(c.isspace() for c in parts.host)


class TestHostIsIp:
    @pytest.mark.parametrize(
        "host, expected",
        [("192.168.0.1", True), ("www.paypal.com", False), ("0xc0a80001", True), ("3232235521", True),
         ("[::1]", True), ("256.1.1.1", False), ("1.2.3", False), ("[nope]", False)],
    )
    def test_examples(self, host, expected):
        assert host_is_ip(host) is expected

    def test_hex_example_via_split(self):
        # hosts are lowercased by split_url before classification
        assert host_is_ip(split_url("http://0xC0A80001/").host)

    def test_agrees_with_brute_force_oracle(self):
        rng = random.Random(1234)
        hosts = [_random_host(rng) for _ in range(1000)]
        disagreements = [h for h in hosts if host_is_ip(h) != numeric_host_oracle(h)]
        assert disagreements == []
        assert 200 < sum(map(numeric_host_oracle, hosts)) < 800


class TestUrlPredicates:
    @pytest.mark.parametrize(
        "href, expected",
        [("http://good.com@evil.com/", True), ("http://evil.com/?a@b", False), ("http://a.com/", False),
         ("http://192.168.1.1/@login", False)],
    )
    def test_at_only_in_authority(self, href, expected):
        assert url_contains_at(split_url(href)) is expected

    @pytest.mark.parametrize(
        "href, expected",
        [("http://a.com/%70aypal", True), ("http://a.com/paypal", False), ("http://аpple.com/", True),
         ("http://a.com/100%", False), ("http://a.com/\t", True)],
    )
    def test_encoded_chars(self, href, expected):
        assert url_has_encoded_chars(href) is expected

    @given(st.text(max_size=40))
    def test_encoded_matches_codepoint_oracle(self, href):
        outside = any(ord(c) < 0x20 or ord(c) > 0x7E for c in href)
        escape = any(
            href[i] == "%" and all(c in "0123456789abcdefABCDEF" for c in href[i + 1:i + 3]) and len(href[i + 1:i + 3]) == 2
            for i in range(len(href))
        )
        assert url_has_encoded_chars(href) is (outside or escape)


class TestMismatch:
    @pytest.mark.parametrize(
        "href, text, expected",
        [
            ("http://evil.com", "www.paypal.com", True),
            ("http://paypal.com/x", "paypal.com", False),
            ("http://evil.com", "Click here", False),
            ("http://www.PayPal.com/login", "https://paypal.com/", False),
            ("http://evil.com/", "Log in at https://paypal.com/signin now", True),
            ("http://paypal.com.evil.ru/", "paypal.com", True),
            ("http://evil.com", "version 2.0", False),
            ("mailto:x@paypal.com", "paypal.com", False),
        ],
    )
    def test_cases(self, href, text, expected):
        assert link_is_mismatch(Link(href, text, HTML_ANCHOR)) is expected

    def test_plain_text_links_never_mismatch(self):
        assert not link_is_mismatch(Link("http://evil.com", "www.paypal.com", PLAIN_TEXT))

    @given(st.from_regex(r"[a-z]{1,8}(\.[a-z]{2,4}){1,2}", fullmatch=True), st.booleans(), st.booleans(), st.booleans())
    def test_equal_hosts_never_mismatch(self, host, www_href, www_text, upper):
        href = "http://" + ("www." if www_href else "") + host + "/path"
        text = ("www." if www_text else "") + host
        text = text.upper() if upper else text
        assert not link_is_mismatch(Link(href, text, HTML_ANCHOR))
