"""Robot detection heuristics applied per session."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

from .archiveuri import ResourceClass
from .sessions import Session

DEFAULT_BS_THRESHOLD = 0.5
DEFAULT_IH_THRESHOLD = 0.1


class Heuristic(str, enum.Enum):
    SELF_IDENTIFIED = "SelfIdentified"
    UA_PER_IP = "UaPerIp"
    ROBOTS_TXT = "RobotsTxt"
    BROWSING_SPEED = "BrowsingSpeed"
    IMAGE_HTML_RATIO = "ImageHtmlRatio"


HEURISTIC_ORDER = tuple(Heuristic)


@dataclass(frozen=True)
class RobotVerdict:
    triggered: frozenset[Heuristic] = frozenset()

    @property
    def is_robot(self) -> bool:
        return bool(self.triggered)

    @property
    def cohort(self) -> str:
        return "robot" if self.triggered else "human"

    def to_dict(self) -> dict:
        return {"is_robot": self.is_robot,
                "triggered": [h.value for h in HEURISTIC_ORDER if h in self.triggered]}


def load_patterns(path: str | None = None) -> tuple[str, ...]:
    """Read a pattern file: one substring per line, ``#`` starts a comment."""
    if path is None:
        text = resources.files("wayback_patterns").joinpath("data/si_patterns.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    patterns = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            patterns.append(line)
    return tuple(patterns)


DEFAULT_PATTERNS = load_patterns()


class AgentMatcher:
    """Case-insensitive substring matcher with a per-agent memo."""

    def __init__(self, patterns: Sequence[str] = DEFAULT_PATTERNS):
        self.patterns = tuple(p.lower() for p in patterns)
        self._memo: dict[str, bool] = {}

    def __call__(self, user_agent: str | None) -> bool:
        if not user_agent:
            return False
        hit = self._memo.get(user_agent)
        if hit is None:
            lowered = user_agent.lower()
            hit = any(p in lowered for p in self.patterns)
            self._memo[user_agent] = hit
        return hit


def detect_self_identified(user_agent: str | None, ua_patterns: Sequence[str] = DEFAULT_PATTERNS) -> bool:
    if not user_agent:
        return False
    lowered = user_agent.lower()
    return any(p.lower() in lowered for p in ua_patterns)


@dataclass
class RobotDetector:
    bs_threshold: float = DEFAULT_BS_THRESHOLD
    ih_threshold: float = DEFAULT_IH_THRESHOLD
    matcher: AgentMatcher = field(default_factory=AgentMatcher)
    enabled: frozenset[Heuristic] = frozenset(Heuristic)

    def classify_session(self, session: Session) -> RobotVerdict:
        on = self.enabled
        hits = set()
        if Heuristic.SELF_IDENTIFIED in on and any(self.matcher(r.record.user_agent) for r in session.requests):
            hits.add(Heuristic.SELF_IDENTIFIED)
        if Heuristic.UA_PER_IP in on and session.user.collapsed:
            hits.add(Heuristic.UA_PER_IP)
        if Heuristic.ROBOTS_TXT in on and any(
                r.target.resource_class is ResourceClass.ROBOTS_TXT for r in session.requests):
            hits.add(Heuristic.ROBOTS_TXT)
        if Heuristic.BROWSING_SPEED in on and session.bs is not None and session.bs > self.bs_threshold:
            hits.add(Heuristic.BROWSING_SPEED)
        # ih is inf for sessions without HTML; that never trips the ratio rule
        if Heuristic.IMAGE_HTML_RATIO in on and session.ih is not None and session.ih < self.ih_threshold:
            hits.add(Heuristic.IMAGE_HTML_RATIO)
        return RobotVerdict(frozenset(hits))

    def only(self, heuristic: Heuristic) -> "RobotDetector":
        """A detector running a single heuristic, as if the others did not exist."""
        return RobotDetector(self.bs_threshold, self.ih_threshold, self.matcher, frozenset({heuristic}))


def classify_session(session: Session, bs_threshold: float = DEFAULT_BS_THRESHOLD,
                     ih_threshold: float = DEFAULT_IH_THRESHOLD,
                     ua_patterns: Sequence[str] = DEFAULT_PATTERNS) -> RobotVerdict:
    return RobotDetector(bs_threshold, ih_threshold, AgentMatcher(ua_patterns)).classify_session(session)


def heuristic_table(sessions: Sequence[Session], verdicts: Sequence[RobotVerdict]) -> dict:
    """Sessions and requests flagged by each heuristic, plus robot totals.

    Heuristics overlap, so the rows need not add up to the totals.
    """
    rows = {h.value: {"sessions": 0, "requests": 0} for h in HEURISTIC_ORDER}
    total = {"sessions": 0, "requests": 0}
    for s, v in zip(sessions, verdicts):
        for h in v.triggered:
            rows[h.value]["sessions"] += 1
            rows[h.value]["requests"] += s.s_l
        if v.is_robot:
            total["sessions"] += 1
            total["requests"] += s.s_l
    return {
        "heuristics": rows,
        "total_robots": total,
        "all_sessions": len(sessions),
        "all_requests": sum(s.s_l for s in sessions),
    }
