"""User identification, timeout sessionization and per-session features."""

from __future__ import annotations

import bisect
import math
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .archiveuri import ResourceClass
from .cleaning import Request

DEFAULT_TIMEOUT = 600
DEFAULT_UA_THRESHOLD = 20


@dataclass(frozen=True)
class UserKey:
    ip: str
    agent: str | None
    collapsed: bool = False

    @property
    def sort_key(self) -> tuple:
        return (self.ip, self.collapsed, self.agent or "")

    def to_dict(self) -> dict:
        return {"ip": self.ip, "agent": self.agent, "collapsed": self.collapsed}

    @classmethod
    def from_dict(cls, data: dict) -> "UserKey":
        return cls(data["ip"], data.get("agent"), bool(data.get("collapsed", False)))


@dataclass(frozen=True)
class RawEvent:
    """The slice of an uncleaned request that session windows need."""

    timestamp: int
    resource_class: ResourceClass
    bytes_sent: int


@dataclass(frozen=True)
class Session:
    user: UserKey
    index: int
    requests: tuple[Request, ...]
    s_l: int
    s_d: int
    bs: float | None = None
    mean_irt: float | None = None
    stdev_irt: float | None = None
    ih: float | None = None  # math.inf when the window holds no HTML
    image_count: int = 0
    html_count: int = 0
    raw_count: int = 0
    raw_bytes: int = 0
    si_pool: bool = False

    @property
    def start(self) -> int:
        return self.requests[0].timestamp

    @property
    def end(self) -> int:
        return self.requests[-1].timestamp

    @property
    def uri_set(self) -> frozenset:
        return frozenset(r.target.key for r in self.requests if r.target.is_pattern_eligible)

    @property
    def gaps(self) -> list[int]:
        ts = [r.timestamp for r in self.requests]
        return [b - a for a, b in zip(ts, ts[1:])]


def identify_users(requests: Iterable[Request], threshold: int = DEFAULT_UA_THRESHOLD) -> dict[UserKey, list[Request]]:
    """Group requests into users by (IP, User-Agent).

    An IP seen with more than ``threshold`` distinct agents becomes a single
    collapsed user holding every request from that IP.
    """
    ordered = sorted(requests, key=lambda r: (r.record.client_ip, r.timestamp))
    agents: dict[str, set] = defaultdict(set)
    for req in ordered:
        agents[req.record.client_ip].add(req.record.user_agent)
    users: dict[UserKey, list[Request]] = {}
    for req in ordered:
        ip = req.record.client_ip
        if len(agents[ip]) > threshold:
            key = UserKey(ip, None, True)
        else:
            key = UserKey(ip, req.record.user_agent)
        users.setdefault(key, []).append(req)
    return dict(sorted(users.items(), key=lambda kv: kv[0].sort_key))


def collapsed_ips(requests: Iterable[Request], threshold: int = DEFAULT_UA_THRESHOLD) -> set[str]:
    agents: dict[str, set] = defaultdict(set)
    for req in requests:
        agents[req.record.client_ip].add(req.record.user_agent)
    return {ip for ip, uas in agents.items() if len(uas) > threshold}


def timing_features(timestamps: Sequence[int]) -> dict:
    """s_l, s_d, browsing speed and inter-request statistics for one session."""
    s_l = len(timestamps)
    s_d = timestamps[-1] - timestamps[0]
    feats = {"s_l": s_l, "s_d": s_d, "bs": None, "mean_irt": None, "stdev_irt": None}
    if s_d > 0:
        feats["bs"] = s_l / s_d
    if s_l > 1:
        gaps = [b - a for a, b in zip(timestamps, timestamps[1:])]
        mean = sum(gaps) / len(gaps)
        feats["mean_irt"] = mean
        # population deviation so that two-request sessions still get a value
        feats["stdev_irt"] = math.sqrt(sum((g - mean) ** 2 for g in gaps) / len(gaps))
    return feats


def sessionize(user: UserKey, requests: Sequence[Request], timeout: int = DEFAULT_TIMEOUT,
               si_pool: bool = False) -> list[Session]:
    """Split a user's time-ordered requests wherever the gap exceeds ``timeout``."""
    sessions: list[Session] = []
    if not requests:
        return sessions
    current = [requests[0]]
    runs = [current]
    for prev, req in zip(requests, requests[1:]):
        if req.timestamp - prev.timestamp > timeout:
            current = [req]
            runs.append(current)
        else:
            current.append(req)
    for index, run in enumerate(runs):
        feats = timing_features([r.timestamp for r in run])
        sessions.append(Session(user=user, index=index, requests=tuple(run), si_pool=si_pool, **feats))
    return sessions


def image_html_ratio(images: int, html: int) -> float:
    return math.inf if html == 0 else images / html


def session_windows(sessions: Sequence[Session], timeout: int = DEFAULT_TIMEOUT) -> list[tuple[int, int]]:
    """Half-open time windows [start, stop) owning a user's uncleaned requests.

    A window opens at the session's first request and closes ``timeout``
    seconds after its last one, or at the next session's start if sooner.
    """
    windows = []
    for i, s in enumerate(sessions):
        stop = s.end + timeout + 1
        if i + 1 < len(sessions):
            stop = min(stop, sessions[i + 1].start)
        windows.append((s.start, stop))
    return windows


def compute_features(session: Session, raw_events: Sequence[RawEvent] = (),
                     window: tuple[int, int] | None = None) -> Session:
    """Fill the timing features and the image-to-HTML ratio of a session.

    ``raw_events`` are the same user's uncleaned requests sorted by time; only
    those inside ``window`` (default: the session's own span) are counted.
    """
    feats = timing_features([r.timestamp for r in session.requests])
    lo, hi = window if window is not None else (session.start, session.end + 1)
    times = [e.timestamp for e in raw_events]
    inside = raw_events[bisect.bisect_left(times, lo):bisect.bisect_left(times, hi)]
    images = sum(1 for e in inside if e.resource_class is ResourceClass.IMAGE)
    html = sum(1 for e in inside if e.resource_class is ResourceClass.HTML)
    return replace(
        session, **feats,
        ih=image_html_ratio(images, html),
        image_count=images,
        html_count=html,
        raw_count=len(inside),
        raw_bytes=sum(e.bytes_sent for e in inside),
    )


def build_sessions(user: UserKey, requests: Sequence[Request], raw_events: Sequence[RawEvent],
                   timeout: int = DEFAULT_TIMEOUT, si_pool: bool = False) -> list[Session]:
    """Sessionize one user and attach window-based raw counts to each session."""
    sessions = sessionize(user, requests, timeout, si_pool)
    windows = session_windows(sessions, timeout)
    times = [e.timestamp for e in raw_events]
    out = []
    for s, (lo, hi) in zip(sessions, windows):
        part = raw_events[bisect.bisect_left(times, lo):bisect.bisect_left(times, hi)]
        out.append(compute_features(s, part, (lo, hi)))
    return out
