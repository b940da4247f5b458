"""Parsing of Wayback Machine access-log lines.

Two layouts are understood:

``full``
    The combined-log variant written by the Wayback Machine front end::

        0.247.222.86 - - [02/Feb/2012:07:03:46 +0000] "GET http://wayback.archive.org/web/*/http://www.aura.vu HTTP/1.1" 200 96433 "http://www.archive.org/web/web.php" "Mozilla/5.0 ..."

``reduced``
    Three whitespace separated columns (client IP, access time, requested
    URI), the shape used when showing short log excerpts. Missing fields
    default to a successful GET with no referrer or agent.
"""

from __future__ import annotations

import calendar
import gzip
import io
import re
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import IO, Iterable, Iterator, Union

MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
_MONTH_NUM = {name: i + 1 for i, name in enumerate(MONTHS)}

FORMATS = ("full", "reduced")

_QUOTED = r'"([^"\\]*(?:\\.[^"\\]*)*)"'
_FULL_RE = re.compile(
    r'\s*(\S+)\s+(\S+)\s+(\S+)\s+\[([^\]]*)\]\s+' + _QUOTED
    + r'\s+(\S+)\s+(\S+)\s+' + _QUOTED + r'\s+' + _QUOTED + r'\s*$'
)
_TIME_RE = re.compile(r'(\d{2})/([A-Z][a-z]{2})/(\d{4}):(\d{2}):(\d{2}):(\d{2})(?: ([+-])(\d{2})(\d{2}))?$')
_UNESCAPE_RE = re.compile(r'\\(.)')


class ParseError(ValueError):
    """A log line that could not be turned into a :class:`LogRecord`."""

    def __init__(self, reason: str, line_no: int | None = None, line: str = ""):
        super().__init__(f"line {line_no}: {reason}" if line_no is not None else reason)
        self.reason = reason
        self.line_no = line_no
        self.line = line

    def __eq__(self, other):
        if not isinstance(other, ParseError):
            return NotImplemented
        return (self.reason, self.line_no, self.line) == (other.reason, other.line_no, other.line)

    def __hash__(self):
        return hash((self.reason, self.line_no))


class StreamError(IOError):
    """The underlying byte stream failed; no further lines can be read."""


@dataclass(frozen=True, slots=True)
class LogRecord:
    client_ip: str
    timestamp: int  # seconds since the epoch, UTC
    method: str
    request_uri: str
    protocol: str = "HTTP/1.1"
    status: int = 200
    bytes_sent: int = 0
    bytes_unknown: bool = False
    referrer: str | None = None
    user_agent: str | None = None
    utc_offset: int = 0  # minutes east of UTC, as written in the source line
    ident: str = "-"
    auth_user: str = "-"

    @property
    def datetime(self) -> datetime:
        return datetime.fromtimestamp(self.timestamp, tz=timezone.utc)


LineResult = Union[LogRecord, ParseError]

_day_cache: dict[str, int] = {}
_stamp_cache: dict[str, tuple[int, int]] = {}


def parse_timestamp(text: str) -> tuple[int, int]:
    """Parse ``dd/Mon/yyyy:HH:MM:SS [+ZZZZ]`` into (UTC epoch seconds, offset minutes).

    A missing offset means UTC.
    """
    m = _TIME_RE.match(text)
    if m is None:
        raise ValueError(f"unparsable timestamp {text!r}")
    day_key = text[:11]
    day_epoch = _day_cache.get(day_key)
    if day_epoch is None:
        day, mon, year = int(m.group(1)), _MONTH_NUM.get(m.group(2)), int(m.group(3))
        if mon is None or not 1 <= day <= calendar.monthrange(year, mon)[1]:
            raise ValueError(f"invalid date {day_key!r}")
        day_epoch = calendar.timegm((year, mon, day, 0, 0, 0))
        if len(_day_cache) < 100_000:
            _day_cache[day_key] = day_epoch
    hh, mm, ss = int(m.group(4)), int(m.group(5)), int(m.group(6))
    if hh > 23 or mm > 59 or ss > 59:
        raise ValueError(f"invalid time of day in {text!r}")
    offset = 0
    if m.group(7) is not None:
        oh, om = int(m.group(8)), int(m.group(9))
        if om > 59:
            raise ValueError(f"invalid UTC offset in {text!r}")
        offset = oh * 60 + om
        if m.group(7) == "-":
            offset = -offset
    return day_epoch + hh * 3600 + mm * 60 + ss - offset * 60, offset


def format_timestamp(epoch: int, utc_offset: int = 0, with_offset: bool = True) -> str:
    local = datetime.fromtimestamp(epoch + utc_offset * 60, tz=timezone.utc)
    text = f"{local.day:02d}/{MONTHS[local.month - 1]}/{local.year:04d}:{local:%H:%M:%S}"
    if with_offset:
        sign = "-" if utc_offset < 0 else "+"
        oh, om = divmod(abs(utc_offset), 60)
        text += f" {sign}{oh:02d}{om:02d}"
    return text


def _unescape(value: str) -> str:
    return _UNESCAPE_RE.sub(r"\1", value) if "\\" in value else value


def _escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"')


def _split_request(request: str) -> tuple[str, str, str]:
    method, _, rest = request.partition(" ")
    uri, sep, protocol = rest.rpartition(" ")
    if not sep or not protocol.startswith("HTTP/"):
        uri, protocol = rest, ""
    return method, uri, protocol


def _diagnose(line: str) -> str:
    quotes = len(re.findall(r'(?<!\\)"', line))
    if quotes % 2:
        return "unclosed quote"
    return "field count"


def _status(text: str) -> int:
    if not text.isdigit():
        raise ValueError(f"non-numeric status {text!r}")
    status = int(text)
    if not 100 <= status <= 599:
        raise ValueError(f"status {status} out of range")
    return status


def parse_line(line: str, line_no: int | None = None, fmt: str = "full") -> LogRecord:
    """Parse one physical log line; raises :class:`ParseError` on malformed input."""
    line = line.rstrip("\r\n")
    if fmt == "reduced":
        return _parse_reduced(line, line_no)
    m = _FULL_RE.match(line)
    if m is None:
        raise ParseError(_diagnose(line), line_no, line)
    ip, ident, auth, when, request, status, size, referrer, agent = m.groups()
    # busy logs repeat each timestamp many times over
    stamp = _stamp_cache.get(when)
    if stamp is None:
        try:
            stamp = parse_timestamp(when)
        except ValueError:
            raise ParseError("timestamp", line_no, line) from None
        if len(_stamp_cache) >= 100_000:
            _stamp_cache.clear()
        _stamp_cache[when] = stamp
    timestamp, offset = stamp
    try:
        status_code = _status(status)
    except ValueError:
        raise ParseError("status", line_no, line) from None
    if size == "-":
        bytes_sent, unknown = 0, True
    elif size.isdigit():
        bytes_sent, unknown = int(size), False
    else:
        raise ParseError("bytes", line_no, line)
    method, uri, protocol = _split_request(_unescape(request))
    if not method or not uri:
        raise ParseError("request", line_no, line)
    return LogRecord(
        client_ip=ip,
        timestamp=timestamp,
        method=method,
        request_uri=uri,
        protocol=protocol,
        status=status_code,
        bytes_sent=bytes_sent,
        bytes_unknown=unknown,
        referrer=None if referrer == "-" else _unescape(referrer),
        user_agent=None if agent == "-" else _unescape(agent),
        utc_offset=offset,
        ident=ident,
        auth_user=auth,
    )


def _parse_reduced(line: str, line_no: int | None) -> LogRecord:
    # table separators ("&", "|") between columns are tolerated
    fields = [f for f in line.split() if f not in ("&", "|")]
    if len(fields) == 4 and re.fullmatch(r"[+-]\d{4}\]?", fields[2]):
        fields = [fields[0], fields[1] + " " + fields[2], fields[3]]
    if len(fields) != 3:
        raise ParseError("field count", line_no, line)
    ip, when, uri = fields
    try:
        timestamp, offset = parse_timestamp(when.strip("[]"))
    except ValueError:
        raise ParseError("timestamp", line_no, line) from None
    return LogRecord(client_ip=ip, timestamp=timestamp, method="GET", request_uri=uri,
                     protocol="HTTP/1.1", status=200, bytes_sent=0, utc_offset=offset)


def format_record(record: LogRecord, fmt: str = "full") -> str:
    """Serialize a record back into a log line (no trailing newline)."""
    if fmt == "reduced":
        return f"{record.client_ip} {format_timestamp(record.timestamp, record.utc_offset, False)} {record.request_uri}"
    request = f"{record.method} {record.request_uri}"
    if record.protocol:
        request += f" {record.protocol}"
    size = "-" if record.bytes_unknown else str(record.bytes_sent)
    referrer = "-" if record.referrer is None else _escape(record.referrer)
    agent = "-" if record.user_agent is None else _escape(record.user_agent)
    return (
        f"{record.client_ip} {record.ident} {record.auth_user} "
        f"[{format_timestamp(record.timestamp, record.utc_offset)}] "
        f'"{_escape(request)}" {record.status} {size} "{referrer}" "{agent}"'
    )


class RecordStream:
    """Iterate over a log source, yielding a record or a ParseError per line.

    ``parsed`` and ``failed`` hold running counts; they are final once the
    iteration is exhausted.
    """

    def __init__(self, source: IO[bytes] | Iterable[str], fmt: str = "full", first_line: int = 1):
        if fmt not in FORMATS:
            raise ValueError(f"unknown log format {fmt!r}")
        self.source = source
        self.fmt = fmt
        self.first_line = first_line
        self.parsed = 0
        self.failed = 0

    @property
    def counts(self) -> dict[str, int]:
        return {"parsed": self.parsed, "failed": self.failed}

    def _lines(self) -> Iterator[str]:
        src = self.source
        if hasattr(src, "read") and not isinstance(src, io.TextIOBase):
            src = io.TextIOWrapper(src, encoding="utf-8", errors="replace", newline="")
        return iter(src)

    def __iter__(self) -> Iterator[LineResult]:
        fmt = self.fmt
        line_no = self.first_line - 1
        try:
            for line in self._lines():
                line_no += 1
                if isinstance(line, bytes):
                    line = line.decode("utf-8", "replace")
                try:
                    record = parse_line(line, line_no, fmt)
                except ParseError as err:
                    self.failed += 1
                    yield err
                else:
                    self.parsed += 1
                    yield record
        except (OSError, EOFError) as exc:
            raise StreamError(f"read failed after line {line_no}: {exc}") from exc


def stream_records(source: IO[bytes] | Iterable[str], fmt: str = "full") -> RecordStream:
    return RecordStream(source, fmt)


def open_log(path: str) -> IO[bytes]:
    """Open a log file (or ``-`` for stdin) as bytes, transparently un-gzipping."""
    raw = sys.stdin.buffer if path == "-" else open(path, "rb")
    buffered = raw if isinstance(raw, io.BufferedReader) else io.BufferedReader(raw)
    if buffered.peek(2)[:2] == b"\x1f\x8b":
        return gzip.GzipFile(fileobj=buffered)
    return buffered
