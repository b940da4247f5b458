"""Session access patterns: Dip, Slide, Dive, Skim, and Slide/Dive composites.

Only TimeMap and memento requests take part. Classification looks at the
sequence of (kind, canonical URI-R) pairs and nothing else.

Decomposition works on consecutive pairs. A pair of requests for different
URI-Rs is a Dive step. A pair for the same URI-R is a Slide step when both are
mementos. A same-URI-R pair that involves a TimeMap is a lookup step: a run of
lookup steps that visits two or more mementos is a Slide through the TimeMap,
otherwise it joins the neighbouring segment (the previous one if any).
"""

from __future__ import annotations

import enum
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .archiveuri import UriKind
from .cleaning import Request


class PatternKind(str, enum.Enum):
    DIP = "Dip"
    SLIDE = "Slide"
    DIVE = "Dive"
    SKIM = "Skim"
    COMPOSITE = "Composite"


SLIDE, DIVE = PatternKind.SLIDE, PatternKind.DIVE
_LOOKUP = "lookup"


@dataclass(frozen=True)
class Segment:
    kind: PatternKind
    start: int  # index of the first request in the segment
    length: int  # requests spanned, boundary request included

    @property
    def stop(self) -> int:
        return self.start + self.length


@dataclass(frozen=True)
class PatternLabel:
    kind: PatternKind
    pattern_length: int
    segments: tuple[Segment, ...] = field(default=())

    @property
    def slide_count(self) -> int:
        return sum(1 for s in self.segments if s.kind is SLIDE)

    @property
    def dive_count(self) -> int:
        return sum(1 for s in self.segments if s.kind is DIVE)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "pattern_length": self.pattern_length,
            "segments": [{"kind": s.kind.value, "start": s.start, "length": s.length} for s in self.segments],
        }


Step = tuple[UriKind, str]


def pattern_steps(requests: Iterable[Request]) -> list[Step]:
    return [(r.target.kind, r.target.uri_r) for r in requests if r.target.is_pattern_eligible]


def _pair_relations(steps: Sequence[Step]) -> list:
    rel = []
    for (k0, r0), (k1, r1) in zip(steps, steps[1:]):
        if r0 != r1:
            rel.append(DIVE)
        elif k0 is UriKind.MEMENTO and k1 is UriKind.MEMENTO:
            rel.append(SLIDE)
        else:
            rel.append(_LOOKUP)
    # resolve runs of lookup steps
    i = 0
    while i < len(rel):
        if rel[i] != _LOOKUP:
            i += 1
            continue
        j = i
        while j < len(rel) and rel[j] == _LOOKUP:
            j += 1
        mementos = sum(1 for k, _ in steps[i:j + 1] if k is UriKind.MEMENTO)
        if mementos >= 2:
            fill = SLIDE
        elif i > 0:
            fill = rel[i - 1]
        elif j < len(rel):
            fill = None  # settled once the following run is known
        else:
            fill = SLIDE
        for x in range(i, j):
            rel[x] = fill
        i = j
    # leading runs without a predecessor take the next settled relation
    nxt = SLIDE
    for x in range(len(rel) - 1, -1, -1):
        if rel[x] is None:
            rel[x] = nxt
        else:
            nxt = rel[x]
    return rel


def decompose_segments(steps: Sequence[Step]) -> list[Segment]:
    """Maximal runs of Slide or Dive steps; adjacent segments share a request."""
    if len(steps) < 2:
        return []
    rel = _pair_relations(steps)
    segments = []
    start = 0
    for x in range(1, len(rel) + 1):
        if x == len(rel) or rel[x] is not rel[start]:
            segments.append(Segment(rel[start], start, x - start + 1))
            start = x
    return segments


def classify_steps(steps: Sequence[Step]) -> PatternLabel | None:
    n = len(steps)
    if n == 0:
        return None
    if n == 1:
        return PatternLabel(PatternKind.DIP, 1)
    if all(k is UriKind.TIMEMAP for k, _ in steps):
        return PatternLabel(PatternKind.SKIM, n)
    if len({r for _, r in steps}) == 1:
        return PatternLabel(PatternKind.SLIDE, n, (Segment(SLIDE, 0, n),))
    segments = tuple(decompose_segments(steps))
    kinds = {s.kind for s in segments}
    if kinds == {SLIDE, DIVE}:
        return PatternLabel(PatternKind.COMPOSITE, n, segments)
    return PatternLabel(kinds.pop(), n, segments)


def classify_pattern(requests: Iterable[Request]) -> PatternLabel | None:
    """Pattern of a session's requests, or None if none is a TimeMap or memento."""
    return classify_steps(pattern_steps(requests))


def _summary(values: list[int]) -> dict | None:
    if not values:
        return None
    return {
        "count": len(values),
        "median": statistics.median(values),
        "mean": statistics.fmean(values),
        "stdev": statistics.pstdev(values),
    }


def pattern_lengths(labels: Iterable[PatternLabel | None]) -> dict[str, list[int]]:
    """Lengths per pattern kind; composites contribute each segment separately."""
    out: dict[str, list[int]] = {k.value: [] for k in PatternKind if k is not PatternKind.COMPOSITE}
    for label in labels:
        if label is None:
            continue
        if label.kind is PatternKind.COMPOSITE:
            for seg in label.segments:
                out[seg.kind.value].append(seg.length)
        else:
            out[label.kind.value].append(label.pattern_length)
    return out


def pattern_stats(labels: Sequence[PatternLabel | None], cohorts: Sequence[str]) -> dict:
    """Median, mean and population stdev of pattern length per cohort and kind."""
    result = {}
    for cohort in sorted(set(cohorts)):
        lengths = pattern_lengths(lab for lab, c in zip(labels, cohorts) if c == cohort)
        result[cohort] = {kind: _summary(vals) for kind, vals in lengths.items()}
    return result
