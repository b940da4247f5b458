import json
import re
import string
from datetime import datetime, timezone
from urllib.parse import unquote, urlsplit

import pytest
from hypothesis import given, strategies as st

from wayback_patterns.archiveuri import (
    CanonicalizeError, ResourceClass, ResourceRules, UriClassifier, UriKind, canonicalize, classify,
    classify_resource,
)

# Built by hand from the canonicalization rules before running the code.
CANONICAL_TABLE = [
    ("HTTP://WWW.Google.COM:80/", "google.com/"),
    ("http://google.com", "google.com/"),
    ("http://google.com/", "google.com/"),
    ("https://www.google.com", "google.com/"),
    ("http://www.google.com:80/", "google.com/"),
    ("https://google.com:443/a", "google.com/a"),
    ("https://google.com:80/", "google.com/"),
    ("http://google.com:443/", "google.com/"),
    ("http://GOOGLE.com/A", "google.com/A"),
    ("http://wwW.Google.com", "google.com/"),
    ("http://www.www.example.com/", "example.com/"),
    ("http://wwwexample.com/", "wwwexample.com/"),
    ("http://www2.example.com/", "www2.example.com/"),
    ("http://example.com:8080/", "example.com:8080/"),
    ("https://www.example.com:8443/a", "example.com:8443/a"),
    ("http://example.com:/x", "example.com/x"),
    ("http://example.com:80", "example.com/"),
    ("http://127.0.0.1:80/x", "127.0.0.1/x"),
    ("http://example.com/a#frag", "example.com/a"),
    ("x.com", "x.com/"),
    ("http://x.com/#frag", "x.com/"),
    ("http://example.com/%7Euser", "example.com/~user"),
    ("http://example.com/%7e", "example.com/~"),
    ("http://example.com/%41bc", "example.com/Abc"),
    ("http://example.com/%5F%2D%2E", "example.com/_-."),
    ("http://example.com/a%2fb", "example.com/a%2Fb"),
    ("http://example.com/a%2Fb", "example.com/a%2Fb"),
    ("http://example.com/a%20b", "example.com/a%20b"),
    ("http://example.com/%e2%82%ac", "example.com/%E2%82%AC"),
    ("http://www.example.com/%E2%82%AC", "example.com/%E2%82%AC"),
    ("http://example.com/?q=A%20B#x", "example.com/?q=A%20B"),
    ("http://example.com/a?B=%7e", "example.com/a?B=%7e"),
    ("http://example.com?x=1", "example.com/?x=1"),
    ("http://example.com/a?b=c&d=e", "example.com/a?b=c&d=e"),
    ("https://www.google.com/search?q=wayback#top", "google.com/search?q=wayback"),
    ("http://www.example.com:443/x?y#z", "example.com/x?y"),
    ("laquadrature.net", "laquadrature.net/"),
    ("humanite.fr/", "humanite.fr/"),
    ("www.example.com", "example.com/"),
    ("google.com", "google.com/"),
    ("http:/example.com/x", "example.com/x"),
    ("HTTP://Example.COM", "example.com/"),
    ("http://user@example.com/", "example.com/"),
    ("ftp://example.com/f", "example.com/f"),
    ("http://example.com/a/../b", "example.com/a/../b"),
    ("http://example.com//x", "example.com//x"),
    ("http://example.com/A/B.HTML", "example.com/A/B.HTML"),
    ("http://my-ru.net/home.php", "my-ru.net/home.php"),
    ("http://my-ru.net/carousel.php", "my-ru.net/carousel.php"),
    ("http://iyasizuku.com", "iyasizuku.com/"),
]

_UNRESERVED = set(string.ascii_letters + string.digits + "-._~")


def reference_canonicalize(uri: str) -> str:
    """Independent canonicalizer built on urllib, used as an oracle."""
    if not re.match(r"[A-Za-z][A-Za-z0-9+.\-]*://", uri):
        uri = "http://" + uri
    parts = urlsplit(uri)
    host = parts.hostname or ""
    while host.startswith("www."):
        host = host[4:]
    netloc = host if parts.port in (None, 80, 443) else f"{host}:{parts.port}"

    def fix(m):
        char = unquote(m.group())
        return char if char in _UNRESERVED else m.group().upper()

    path = re.sub(r"%[0-9A-Fa-f]{2}", fix, parts.path) or "/"
    return netloc + path + ("?" + parts.query if parts.query else "")


def test_table_has_fifty_cases():
    assert len(CANONICAL_TABLE) == 50


@pytest.mark.parametrize("raw,expected", CANONICAL_TABLE)
def test_canonical_table(raw, expected):
    assert canonicalize(raw) == expected


@pytest.mark.parametrize("raw,expected", CANONICAL_TABLE)
def test_reference_agrees_with_table(raw, expected):
    if raw.startswith("http:/") and not raw.startswith("http://"):
        pytest.skip("collapsed scheme form is outside urllib's grammar")
    assert reference_canonicalize(raw) == expected


_label = st.text(alphabet=string.ascii_letters + string.digits + "-", min_size=1, max_size=8)
_escape = st.sampled_from(["%7e", "%7E", "%41", "%2f", "%20", "%e2%82%ac", "%5F"])
_segment = st.lists(st.one_of(st.text(alphabet=string.ascii_letters + string.digits + "._~-", min_size=1,
                                      max_size=6), _escape), max_size=3).map("".join)


@st.composite
def web_uris(draw):
    scheme = draw(st.sampled_from(["", "http://", "https://", "HTTP://"]))
    www = draw(st.sampled_from(["", "www.", "WWW.", "www.www."]))
    host = ".".join(draw(st.lists(_label, min_size=1, max_size=3))) + draw(st.sampled_from([".com", ".org"]))
    port = draw(st.sampled_from(["", ":80", ":443", ":8080"]))
    path = "".join("/" + s for s in draw(st.lists(_segment, max_size=3)))
    query = draw(st.sampled_from(["", "?a=1", "?Q=%7e&b", "?x=A%20B"]))
    frag = draw(st.sampled_from(["", "#top", "#"]))
    return scheme + www + host + port + path + query + frag


@given(web_uris())
def test_matches_reference(uri):
    assert canonicalize(uri) == reference_canonicalize(uri)


@given(web_uris())
def test_idempotent(uri):
    once = canonicalize(uri)
    assert canonicalize(once) == once


@pytest.mark.parametrize("raw", ["about:blank", "javascript:alert(1)", "data:text/html,x", "mailto:a@b.c",
                                 "", "http://", "http://exa mple.com/", "http://host:abc/"])
def test_uninterpretable(raw):
    with pytest.raises(CanonicalizeError):
        canonicalize(raw)


def test_dip_excerpt_timemap():
    t = classify("http://wayback.archive.org/web/*/http://iyasizuku.com")
    assert t.kind is UriKind.TIMEMAP
    assert t.uri_r == canonicalize("iyasizuku.com")
    assert t.memento_datetime is None


def test_dip_excerpt_memento():
    m = classify("http://web.archive.org/web/19961022174810/http://altavista.com")
    assert m.kind is UriKind.MEMENTO
    assert m.memento_datetime == datetime(1996, 10, 22, 17, 48, 10, tzinfo=timezone.utc)
    assert m.uri_r == "altavista.com/"
    assert m.resource_class is ResourceClass.HTML


def test_slide_excerpt_timemap_prefix():
    t = classify("http://wayback.archive.org/web/20000715000000*/http://google.com")
    assert t.kind is UriKind.TIMEMAP
    assert t.datetime_prefix == "20000715000000"
    assert t.memento_datetime is None


def test_dive_excerpt_paths_are_distinct():
    a = classify("http://web.archive.org/web/20100709124643/http://my-ru.net/home.php")
    b = classify("http://web.archive.org/web/20100706170736/http://my-ru.net/carousel.php")
    assert a.uri_r != b.uri_r
    assert a.resource_class is ResourceClass.HTML


def test_path_only_request():
    m = classify("/web/20110101000000/http://x.com/")
    assert m.kind is UriKind.MEMENTO and m.uri_r == "x.com/"


def test_modifier_stripped_and_recorded():
    m = classify("http://web.archive.org/web/20000301105534im_/http://google.com/logo.gif")
    assert m.kind is UriKind.MEMENTO
    assert m.modifier == "im_"
    assert m.uri_r == "google.com/logo.gif"
    assert m.resource_class is ResourceClass.IMAGE


@pytest.mark.parametrize("uri", ["/web/20001399000000/http://x.com", "/web/20000230000000/http://x.com",
                                 "/web/20000101250000/http://x.com", "/web/*/about:blank",
                                 "/web/20100101000000/javascript:void(0)"])
def test_invalid_targets_are_flagged(uri):
    t = classify(uri)
    assert t.kind is UriKind.OTHER
    assert t.invalid


def test_old_years_are_not_rejected():
    assert classify("/web/19000101000000/http://x.com/").kind is UriKind.MEMENTO


def test_robots_txt():
    assert classify("http://web.archive.org/robots.txt").resource_class is ResourceClass.ROBOTS_TXT


@pytest.mark.parametrize("path,cls", [
    ("/web/20100709124643/http://my-ru.net/home.php", ResourceClass.HTML),
    ("/web/20100101000000/http://a.com/logo.png", ResourceClass.IMAGE),
    ("/web/20100101000000/http://a.com/", ResourceClass.HTML),
    ("/a/b", ResourceClass.HTML),
    ("/a/pic.JPG", ResourceClass.IMAGE),
    ("/a/style.css", ResourceClass.OTHER_EMBEDDED),
    ("/a/app.js?v=2", ResourceClass.OTHER_EMBEDDED),
    ("/a/movie.swf", ResourceClass.OTHER_EMBEDDED),
    ("/static/css/site.css", ResourceClass.OTHER_EMBEDDED),
    ("/static/about.html", ResourceClass.STATIC_SITE),
    ("/images/", ResourceClass.STATIC_SITE),
    ("/web/web.php", ResourceClass.STATIC_SITE),
    ("/liveweb/http://x.com/", ResourceClass.LIVEWEB),
    ("/robots.txt", ResourceClass.ROBOTS_TXT),
])
def test_classify_resource(path, cls):
    assert classify_resource(path) is cls


def test_chrome_flag_on_site_assets():
    t = classify("http://web.archive.org/static/images/toolbar/wm_1.png")
    assert t.resource_class is ResourceClass.IMAGE and t.chrome


def test_rules_from_file(tmp_path):
    cfg = tmp_path / "rules.json"
    cfg.write_text(json.dumps({"image_exts": ["tif"], "liveweb_prefixes": ["/live/"]}))
    rules = ResourceRules.load(str(cfg))
    assert classify_resource("/x.tif", rules) is ResourceClass.IMAGE
    assert classify_resource("/x.png", rules) is ResourceClass.HTML
    assert classify_resource("/live/x", rules) is ResourceClass.LIVEWEB


def test_unknown_rule_keys_rejected():
    with pytest.raises((KeyError, ValueError)):
        ResourceRules.from_mapping({"picture_exts": ["png"]})


def test_memoized_classifier_is_consistent():
    c = UriClassifier()
    uri = "http://web.archive.org/web/20100101000000/http://a.com/"
    assert c(uri) is c(uri)
    assert c(uri) == classify(uri)


@st.composite
def archive_paths(draw):
    host = draw(st.sampled_from(["a.com", "www.b.org", "c.net:8080"]))
    target = draw(st.sampled_from(["http://", "https://", ""])) + host + draw(st.sampled_from(["", "/", "/x.html"]))
    ts = draw(st.datetimes(min_value=datetime(1996, 1, 1), max_value=datetime(2012, 12, 31))).strftime("%Y%m%d%H%M%S")
    return draw(st.sampled_from([f"/web/{ts}/{target}", f"/web/*/{target}", f"/web/{ts[:4]}*/{target}"]))


@given(archive_paths(), archive_paths())
def test_triple_identity(a, b):
    ka, kb = classify(a).key, classify(b).key
    same_capture = ka[0] == kb[0] and canonicalize(a.split("/", 3)[3]) == canonicalize(b.split("/", 3)[3]) \
        and (ka[0] != "Memento" or a.split("/")[2] == b.split("/")[2])
    assert (ka == kb) == same_capture
