"""Removal of log entries that say nothing about user navigation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .archiveuri import EMBEDDED_CLASSES, ArchiveUri, ResourceClass, UriClassifier
from .logmodel import LogRecord

KEPT_STATUSES = frozenset({200, 404, 503})


@dataclass(frozen=True, slots=True)
class Request:
    """A parsed log record together with the classification of its target."""

    record: LogRecord
    target: ArchiveUri

    @property
    def timestamp(self) -> int:
        return self.record.timestamp


def classify_records(records: Iterable[LogRecord], classifier: UriClassifier | None = None) -> list[Request]:
    classifier = classifier or UriClassifier()
    return [Request(r, classifier(r.request_uri)) for r in records]


def _status_code(req: Request) -> bool:
    return req.record.status not in KEPT_STATUSES


def _embedded(req: Request) -> bool:
    return req.target.resource_class in EMBEDDED_CLASSES


def _static_liveweb(req: Request) -> bool:
    return req.target.chrome or req.target.resource_class in (ResourceClass.STATIC_SITE, ResourceClass.LIVEWEB)


def _invalid(req: Request) -> bool:
    return req.target.invalid is not None


def _head(req: Request) -> bool:
    return req.record.method.upper() == "HEAD"


# each predicate answers "should this request be excluded?"
FILTERS: dict[str, Callable[[Request], bool]] = {
    "status_code": _status_code,
    "embedded": _embedded,
    "static_liveweb": _static_liveweb,
    "invalid": _invalid,
    "head": _head,
}


@dataclass
class CleanReport:
    total_raw: int = 0
    excluded_by: dict[str, int] = field(default_factory=lambda: {name: 0 for name in FILTERS})
    excluded: int = 0

    @property
    def retained(self) -> int:
        return self.total_raw - self.excluded

    def merge(self, other: "CleanReport") -> "CleanReport":
        return CleanReport(
            total_raw=self.total_raw + other.total_raw,
            excluded_by={k: self.excluded_by[k] + other.excluded_by[k] for k in FILTERS},
            excluded=self.excluded + other.excluded,
        )

    def to_dict(self) -> dict:
        raw = self.total_raw or 1
        return {
            "total_raw": self.total_raw,
            "retained": self.retained,
            "excluded": self.excluded,
            "excluded_by": dict(self.excluded_by),
            "pct_excluded_by": {k: round(100.0 * v / raw, 4) for k, v in self.excluded_by.items()},
            "pct_excluded": round(100.0 * self.excluded / raw, 4),
        }


def exclusion_reasons(req: Request) -> list[str]:
    return [name for name, hit in FILTERS.items() if hit(req)]


def clean(requests: Iterable[Request]) -> tuple[list[Request], CleanReport]:
    """Keep requests passing every filter; count each filter over the whole input.

    A request may trip several filters, so the per-filter counts can sum to
    more than the number of excluded requests.
    """
    report = CleanReport()
    counts = report.excluded_by
    retained = []
    for req in requests:
        report.total_raw += 1
        dropped = False
        for name, hit in FILTERS.items():
            if hit(req):
                counts[name] += 1
                dropped = True
        if dropped:
            report.excluded += 1
        else:
            retained.append(req)
    return retained, report
