"""End-to-end analysis: parse, classify, clean, sessionize, detect robots, label patterns."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import islice
from typing import Iterable, Sequence

from .archiveuri import DEFAULT_RULES, ResourceRules, UriClassifier
from .cleaning import CleanReport, Request, clean
from .logmodel import FORMATS, LogRecord, ParseError, RecordStream, StreamError, open_log, parse_line
from .patterns import PatternLabel, classify_pattern
from .robots import DEFAULT_PATTERNS, AgentMatcher, RobotDetector, RobotVerdict, load_patterns
from .sessions import RawEvent, Session, UserKey, build_sessions, identify_users

log = logging.getLogger(__name__)


class PipelineError(Exception):
    pass


@dataclass
class Config:
    session_timeout_s: int = 600
    ua_per_ip_threshold: int = 20
    bs_threshold: float = 0.5
    ih_threshold: float = 0.1
    si_pattern_file: str | None = None
    resource_class_lists: str | None = None
    input_format: str = "full"
    output_dir: str | None = None
    threads: int = 1
    keep_going: bool = False

    def validate(self) -> None:
        for name in ("session_timeout_s", "ua_per_ip_threshold", "bs_threshold", "ih_threshold", "threads"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.input_format not in FORMATS:
            raise ValueError(f"input_format must be one of {FORMATS}")

    @classmethod
    def load(cls, path: str, **overrides) -> "Config":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def effective(self) -> dict:
        """Settings that influence results (threads and output location do not)."""
        data = asdict(self)
        for key in ("output_dir", "threads", "keep_going"):
            data.pop(key)
        return data

    def rules(self) -> ResourceRules:
        return ResourceRules.load(self.resource_class_lists) if self.resource_class_lists else DEFAULT_RULES

    def patterns(self) -> tuple[str, ...]:
        return load_patterns(self.si_pattern_file) if self.si_pattern_file else DEFAULT_PATTERNS


@dataclass(frozen=True)
class LabeledSession:
    session: Session
    verdict: RobotVerdict
    pattern: PatternLabel | None

    @property
    def cohort(self) -> str:
        return self.verdict.cohort


@dataclass
class Analysis:
    config: Config
    inputs: list[str]
    raw: list[Request]
    clean_report: CleanReport
    sessions: list[LabeledSession]
    parsed: int = 0
    failed: int = 0
    parse_errors: list[ParseError] = field(default_factory=list)
    file_errors: list[str] = field(default_factory=list)
    matcher: AgentMatcher = field(default_factory=AgentMatcher)


_CHUNK = 20_000


def _parse_chunk(args: tuple[int, list[str], str]) -> list:
    first, lines, fmt = args
    out = []
    for n, line in enumerate(lines, first):
        try:
            out.append(parse_line(line, n, fmt))
        except ParseError as err:
            out.append(err)
    return out


def _chunks(lines: Iterable[str], fmt: str):
    it = iter(lines)
    first = 1
    while True:
        block = list(islice(it, _CHUNK))
        if not block:
            return
        yield first, block, fmt
        first += len(block)


def read_records(source, fmt: str = "full", threads: int = 1) -> tuple[list[LogRecord], list[ParseError]]:
    """Parse a byte stream; with ``threads`` > 1 line blocks are parsed concurrently."""
    records: list[LogRecord] = []
    errors: list[ParseError] = []
    if threads <= 1:
        for item in RecordStream(source, fmt):
            (errors if isinstance(item, ParseError) else records).append(item)
        return records, errors
    lines = RecordStream(source, fmt)._lines()
    try:
        with ThreadPoolExecutor(threads) as pool:
            for block in pool.map(_parse_chunk, _chunks(lines, fmt)):
                for item in block:
                    (errors if isinstance(item, ParseError) else records).append(item)
    except (OSError, EOFError) as exc:
        raise StreamError(str(exc)) from exc
    return records, errors


def _user_chunks(items: list, n: int) -> list[list]:
    size = max(1, -(-len(items) // n))
    return [items[i:i + size] for i in range(0, len(items), size)]


def analyze_requests(raw: list[Request], config: Config) -> tuple[CleanReport, list[LabeledSession], AgentMatcher]:
    config.validate()
    matcher = AgentMatcher(config.patterns())
    detector = RobotDetector(config.bs_threshold, config.ih_threshold, matcher)
    retained, report = clean(raw)

    # self-identified robots are set aside before users and features are formed
    si_requests = [r for r in retained if matcher(r.record.user_agent)]
    other = [r for r in retained if not matcher(r.record.user_agent)]
    users = identify_users(other, config.ua_per_ip_threshold)
    si_users = identify_users(si_requests, threshold=2 ** 62)
    collapsed = {k.ip for k in users if k.collapsed}

    raw_events: dict[UserKey, list[RawEvent]] = {}
    for req in sorted(raw, key=lambda r: r.timestamp):
        rec = req.record
        if matcher(rec.user_agent) or rec.client_ip not in collapsed:
            key = UserKey(rec.client_ip, rec.user_agent)
        else:
            key = UserKey(rec.client_ip, None, True)
        raw_events.setdefault(key, []).append(
            RawEvent(rec.timestamp, req.target.resource_class, rec.bytes_sent))

    work = [(k, v, False) for k, v in users.items()] + [(k, v, True) for k, v in si_users.items()]
    work.sort(key=lambda item: item[0].sort_key)
    timeout = config.session_timeout_s

    def run(batch: list) -> list[LabeledSession]:
        out = []
        for user, requests, si in batch:
            for s in build_sessions(user, requests, raw_events.get(user, []), timeout, si_pool=si):
                out.append(LabeledSession(s, detector.classify_session(s), classify_pattern(s.requests)))
        return out

    if config.threads > 1 and len(work) > 1:
        with ThreadPoolExecutor(config.threads) as pool:
            parts = list(pool.map(run, _user_chunks(work, config.threads)))
    else:
        parts = [run(work)]
    labeled = [ls for part in parts for ls in part]
    labeled.sort(key=lambda ls: (ls.session.user.sort_key, ls.session.start))
    return report, labeled, matcher


def analyze(paths: Sequence[str], config: Config | None = None) -> Analysis:
    config = config or Config()
    config.validate()
    if "-" in paths and config.input_format != "full":
        raise PipelineError("standard input accepts the full log format only")
    classifier = UriClassifier(config.rules())
    records: list[LogRecord] = []
    errors: list[ParseError] = []
    file_errors: list[str] = []
    for path in paths:
        try:
            source = open_log(path)
            try:
                recs, errs = read_records(source, config.input_format, config.threads)
            finally:
                if path != "-":
                    source.close()
        except (OSError, StreamError) as exc:
            msg = f"{path}: {exc}"
            if not config.keep_going:
                raise PipelineError(msg) from exc
            log.warning("skipping %s", msg)
            file_errors.append(msg)
            continue
        records.extend(recs)
        errors.extend(errs)
    if not records:
        raise PipelineError("no parsable log records in input")
    raw = [Request(r, classifier(r.request_uri)) for r in records]
    report, labeled, matcher = analyze_requests(raw, config)
    return Analysis(config=config, inputs=list(paths), raw=raw, clean_report=report, sessions=labeled,
                    parsed=len(records), failed=len(errors), parse_errors=errors,
                    file_errors=file_errors, matcher=matcher)
