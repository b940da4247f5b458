"""Memento view of requested URIs: TimeMaps (URI-T), mementos (URI-M) and the rest.

Wayback paths look like ``/web/<14 digits>[mod_]/<URI-R>`` for a memento and
``/web/*/<URI-R>`` or ``/web/<digits>*/<URI-R>`` for a TimeMap. The embedded
URI-R is canonicalized so that equal strings mean "same original resource".
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone


class UriKind(str, enum.Enum):
    MEMENTO = "Memento"
    TIMEMAP = "TimeMap"
    OTHER = "Other"


class ResourceClass(str, enum.Enum):
    HTML = "HTML"
    IMAGE = "Image"
    OTHER_EMBEDDED = "OtherEmbedded"
    ROBOTS_TXT = "RobotsTxt"
    STATIC_SITE = "StaticSite"
    LIVEWEB = "Liveweb"


EMBEDDED_CLASSES = frozenset({ResourceClass.IMAGE, ResourceClass.OTHER_EMBEDDED})


class CanonicalizeError(ValueError):
    pass


@dataclass(frozen=True)
class ResourceRules:
    """Extension and prefix lists driving :func:`classify_resource`."""

    image_exts: frozenset[str] = frozenset({"png", "jpg", "jpeg", "gif", "ico", "bmp", "svg", "webp"})
    embedded_exts: frozenset[str] = frozenset({"css", "js", "woff", "woff2", "ttf", "eot", "swf",
                                               "flv", "mp3", "mp4", "ogg", "avi"})
    html_exts: frozenset[str] = frozenset({"html", "htm", "php", "asp", "aspx", "jsp", "cgi", "shtml"})
    static_prefixes: tuple[str, ...] = ("/static/", "/images/", "/web/web.php")
    liveweb_prefixes: tuple[str, ...] = ("/liveweb/", "http://liveweb.archive.org/")

    KEYS = ("image_exts", "embedded_exts", "html_exts", "static_prefixes", "liveweb_prefixes")

    @classmethod
    def from_mapping(cls, data: dict) -> "ResourceRules":
        unknown = set(data) - set(cls.KEYS)
        if unknown:
            raise ValueError(f"unknown resource rule keys: {sorted(unknown)}")
        kwargs = {}
        for key in ("image_exts", "embedded_exts", "html_exts"):
            if key in data:
                kwargs[key] = frozenset(e.lower().lstrip(".") for e in data[key])
        for key in ("static_prefixes", "liveweb_prefixes"):
            if key in data:
                kwargs[key] = tuple(data[key])
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str) -> "ResourceRules":
        with open(path, encoding="utf-8") as fh:
            return cls.from_mapping(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "image_exts": sorted(self.image_exts),
            "embedded_exts": sorted(self.embedded_exts),
            "html_exts": sorted(self.html_exts),
            "static_prefixes": list(self.static_prefixes),
            "liveweb_prefixes": list(self.liveweb_prefixes),
        }


DEFAULT_RULES = ResourceRules()


@dataclass(frozen=True)
class ArchiveUri:
    kind: UriKind
    raw: str
    resource_class: ResourceClass
    uri_r: str | None = None
    memento_datetime: datetime | None = None
    datetime_prefix: str | None = None
    modifier: str | None = None  # wayback path modifier such as "im_", stripped from the path
    chrome: bool = False  # path under a static-site or liveweb prefix
    invalid: str | None = None  # reason the request is unusable, if any

    @property
    def is_pattern_eligible(self) -> bool:
        return self.kind is not UriKind.OTHER

    @property
    def key(self) -> tuple:
        return (self.kind.value, self.uri_r, self.memento_datetime)


# --- canonicalization -------------------------------------------------------

_SCHEME_RE = re.compile(r"([A-Za-z][A-Za-z0-9+.\-]*):")
_WEB_SCHEMES = {"http", "https", "ftp"}
_HOST_RE = re.compile(r"(?:[a-z0-9_~%\-]+\.)*[a-z0-9_~%\-]+\.?|\[[0-9a-f:.]+\]")
_PCT_RE = re.compile(r"%([0-9A-Fa-f]{2})")
_SPACE_RE = re.compile(r"\s")
# already-clean URI-Rs (the vast majority) skip the general path
_SIMPLE_RE = re.compile(r"(?:https?://)?(?:www\.)*([a-z0-9\-]+(?:\.[a-z0-9\-]+)*)(/[^%#?\s]*)?(\?[^#\s]*)?")
_UNRESERVED = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~")
_DEFAULT_PORTS = {"80", "443"}


def _normalize_escape(m: re.Match) -> str:
    char = chr(int(m.group(1), 16))
    return char if char in _UNRESERVED else "%" + m.group(1).upper()


def canonicalize(uri_r: str) -> str:
    """Reduce a URI-R to its comparison key.

    Scheme is dropped, host lowercased and stripped of ``www.`` and default
    ports, the fragment removed, escaped unreserved characters decoded in the
    path, and an empty path becomes ``/``. The query is kept verbatim.

    >>> canonicalize("HTTP://WWW.Google.COM:80/")
    'google.com/'
    """
    m = _SIMPLE_RE.fullmatch(uri_r)
    if m is not None and not m.group(1).startswith("www."):
        host, path, query = m.groups()
        return host + (path or "/") + (query or "")
    text = uri_r.strip()
    if not text or _SPACE_RE.search(text):
        raise CanonicalizeError(f"not a URI: {uri_r!r}")
    m = _SCHEME_RE.match(text)
    if m is not None:
        rest = text[m.end():]
        scheme = m.group(1).lower()
        if rest.startswith("/"):
            if scheme not in _WEB_SCHEMES:
                raise CanonicalizeError(f"unsupported scheme in {uri_r!r}")
            text = rest.lstrip("/")  # tolerates the collapsed "http:/host" form
        elif not re.match(r"\d*(?:[/?#]|$)", rest):
            # "about:blank", "javascript:..." and friends; "host:8080/..." is a port
            raise CanonicalizeError(f"non-web URI {uri_r!r}")
    text = text.split("#", 1)[0]
    end = len(text)
    for sep in "/?":
        pos = text.find(sep)
        if pos != -1 and pos < end:
            end = pos
    authority, rest = text[:end], text[end:]
    authority = authority.rpartition("@")[2].lower()
    host, colon, port = authority, "", ""
    if not authority.endswith("]") and ":" in authority:
        host, colon, port = authority.rpartition(":")
    if colon:
        if port and not port.isdigit():
            raise CanonicalizeError(f"bad port in {uri_r!r}")
        if not port or port in _DEFAULT_PORTS:
            colon = port = ""
    host = host.rstrip(".")
    while host.startswith("www."):
        host = host[4:]
    if not host or not _HOST_RE.fullmatch(host):
        raise CanonicalizeError(f"bad host in {uri_r!r}")
    path, qmark, query = rest.partition("?")
    if not path:
        path = "/"
    elif "%" in path:
        path = _PCT_RE.sub(_normalize_escape, path)
    return f"{host}{colon}{port}{path}{qmark}{query}"


# --- classification ---------------------------------------------------------

_ARCHIVE_RE = re.compile(
    r"/web/(?:(?P<tm>\*|(?P<prefix>\d*)\*)|(?P<ts>\d{14})(?P<mod>[a-z]{2}_)?)/(?P<target>.+)$"
)
_EMPTY_TARGET_RE = re.compile(r"/web/(?:\*|\d*\*|\d{14}(?:[a-z]{2}_)?)/?$")


def _extension(path: str) -> str:
    path = path.split("?", 1)[0].split("#", 1)[0]
    if path.endswith("/"):
        return ""
    base, dot, ext = path.rsplit("/", 1)[-1].rpartition(".")
    return ext.lower() if dot and base else ""


def classify_resource(path: str, rules: ResourceRules = DEFAULT_RULES) -> ResourceClass:
    """Resource class of a request path (archive path or URI-R path).

    Embedded-resource extensions win over site prefixes so that archive chrome
    images still count as images.
    """
    if path == "/robots.txt":
        return ResourceClass.ROBOTS_TXT
    ext = _extension(path)
    if ext in rules.image_exts:
        return ResourceClass.IMAGE
    if ext in rules.embedded_exts:
        return ResourceClass.OTHER_EMBEDDED
    if path.startswith(rules.liveweb_prefixes):
        return ResourceClass.LIVEWEB
    if path.startswith(rules.static_prefixes):
        return ResourceClass.STATIC_SITE
    # extensionless, trailing slash, html-ish, and unknown document types are pages
    return ResourceClass.HTML


def _split_target(request_uri: str) -> tuple[str, str]:
    """Split an absolute request URI into (scheme://host, path)."""
    if request_uri.startswith("/"):
        return "", request_uri
    scheme_end = request_uri.find("://")
    if scheme_end == -1:
        return "", request_uri
    slash = request_uri.find("/", scheme_end + 3)
    if slash == -1:
        return request_uri, "/"
    return request_uri[:slash], request_uri[slash:]


def _memento_datetime(digits: str) -> datetime:
    return datetime(int(digits[0:4]), int(digits[4:6]), int(digits[6:8]),
                    int(digits[8:10]), int(digits[10:12]), int(digits[12:14]), tzinfo=timezone.utc)


class UriClassifier:
    """Memoizing classifier bound to one set of resource rules."""

    def __init__(self, rules: ResourceRules = DEFAULT_RULES, cache_size: int = 500_000):
        self.rules = rules
        self.cache_size = cache_size
        self._cache: dict[str, ArchiveUri] = {}

    def __call__(self, request_uri: str) -> ArchiveUri:
        hit = self._cache.get(request_uri)
        if hit is None:
            hit = self.classify(request_uri)
            if len(self._cache) >= self.cache_size:
                self._cache.clear()
            self._cache[request_uri] = hit
        return hit

    def _site_class(self, request_uri: str, path: str) -> ResourceClass | None:
        rules = self.rules
        if request_uri.startswith(rules.liveweb_prefixes) or path.startswith(rules.liveweb_prefixes):
            return ResourceClass.LIVEWEB
        if path.startswith(rules.static_prefixes):
            return ResourceClass.STATIC_SITE
        return None

    def classify(self, request_uri: str) -> ArchiveUri:
        rules = self.rules
        path = _split_target(request_uri)[1]
        site = self._site_class(request_uri, path)
        m = _ARCHIVE_RE.match(path) if site is None else None
        if m is None:
            rclass = classify_resource(path, rules)
            if site is not None and rclass is ResourceClass.HTML:
                rclass = site
            invalid = "empty URI-R" if _EMPTY_TARGET_RE.match(path) else None
            return ArchiveUri(UriKind.OTHER, request_uri, rclass, chrome=site is not None, invalid=invalid)

        target = m.group("target")
        if m.group("tm") is not None:
            try:
                uri_r = canonicalize(target)
            except CanonicalizeError as exc:
                return ArchiveUri(UriKind.OTHER, request_uri, ResourceClass.HTML, invalid=str(exc))
            prefix = m.group("prefix") or None
            return ArchiveUri(UriKind.TIMEMAP, request_uri, ResourceClass.HTML,
                              uri_r=uri_r, datetime_prefix=prefix)

        rclass = classify_resource(path, rules)
        try:
            when = _memento_datetime(m.group("ts"))
        except ValueError:
            return ArchiveUri(UriKind.OTHER, request_uri, rclass,
                              modifier=m.group("mod"), invalid=f"invalid Memento-Datetime {m.group('ts')}")
        try:
            uri_r = canonicalize(target)
        except CanonicalizeError as exc:
            return ArchiveUri(UriKind.OTHER, request_uri, rclass, modifier=m.group("mod"), invalid=str(exc))
        return ArchiveUri(UriKind.MEMENTO, request_uri, rclass, uri_r=uri_r,
                          memento_datetime=when, modifier=m.group("mod"))


_default_classifier = UriClassifier()


def classify(request_uri: str, rules: ResourceRules | None = None) -> ArchiveUri:
    if rules is None or rules == DEFAULT_RULES:
        return _default_classifier(request_uri)
    return UriClassifier(rules).classify(request_uri)
