"""Synthetic Wayback access logs with ground truth, for end-to-end checks.

A scenario is a JSON document::

    {
      "seed": 7,
      "timeout": 600,
      "users": [
        {"cohort": "human", "ip": "0.1.2.3", "ua": "Mozilla/5.0 ...",
         "sessions": [
           {"pattern": "Slide", "length": 4, "uri_rs": ["http://google.com/"],
            "start": "2012-02-02T07:04:52Z",
            "irt_model": {"mean": 20, "stdev": 5, "min": 5, "max": 300},
            "embedded_per_html": 2, "status_mix": {"redirect": 0.2}}
         ]}
      ]
    }

User keys: ``cohort``, ``ip``, ``ua``, ``self_identified`` (the agent is a
declared crawler), ``ua_rotation`` (cycle through that many agent variants,
more than the per-IP threshold), ``sessions``.

Session keys: ``pattern`` (Dip, Slide, Dive, Skim, Composite), ``length``,
``uri_rs``, ``start`` (ISO-8601 or epoch seconds; default: after the previous
session), ``irt_model``, ``embedded_per_html``, ``status_mix`` (``redirect``
and ``not_found`` probabilities), ``robots_txt``, ``entry`` (``timemap`` to
open Slides, Dives and Dips on a TimeMap), ``datetimes`` (14-digit
Memento-Datetimes to use in order), ``segments`` (Composite only, e.g.
``[["Slide", 3], ["Dive", 2]]``), and ``requests`` (explicit
``{"time", "uri"}`` rows that replace generation).

The ground truth is JSON lines: one ``{"type": "line"}`` record per log line
and one ``{"type": "session"}`` record per planted session.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .logmodel import LogRecord, format_record

PATTERNS = ("Dip", "Slide", "Dive", "Skim", "Composite")
ARCHIVE = "http://web.archive.org"
TIMEMAP_HOST = "http://wayback.archive.org"
DEFAULT_START = datetime(2012, 2, 2, 6, 0, 0, tzinfo=timezone.utc)
DEFAULT_IRT = {"mean": 20.0, "stdev": 6.0, "min": 5.0, "max": 300.0}
DEFAULT_THRESHOLDS = {"ua_per_ip": 20, "bs": 0.5, "ih": 0.1}

HUMAN_AGENTS = (
    "Mozilla/5.0 (Macintosh; Intel Mac OS X 10_6_8) AppleWebKit/535.7 (KHTML, like Gecko) "
    "Chrome/16.0.912.77 Safari/535.7",
    "Mozilla/5.0 (Windows NT 6.1; WOW64; rv:10.0) Gecko/20100101 Firefox/10.0",
    "Mozilla/5.0 (compatible; MSIE 9.0; Windows NT 6.1; Trident/5.0)",
    "Opera/9.80 (Windows NT 6.1; U; en) Presto/2.10.229 Version/11.61",
)
CRAWLER_AGENTS = (
    "Mozilla/5.0 (compatible; Googlebot/2.1; +http://www.google.com/bot.html)",
    "ia_archiver (+http://www.alexa.com/site/help/webmasters; crawler@alexa.com)",
    "Wget/1.12 (linux-gnu)",
    "Python-requests/0.10.1",
)


class ScenarioError(ValueError):
    """Invalid scenario; ``problems`` lists (path, message) pairs."""

    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = problems
        super().__init__("; ".join(f"{p}: {m}" for p, m in problems))


@dataclass
class GroundTruth:
    lines: list[dict] = field(default_factory=list)
    sessions: list[dict] = field(default_factory=list)

    def to_jsonl(self) -> str:
        rows = [dict(type="session", **s) for s in self.sessions] + [dict(type="line", **ln) for ln in self.lines]
        return "".join(json.dumps(r) + "\n" for r in rows)

    @classmethod
    def from_jsonl(cls, text: str) -> "GroundTruth":
        gt = cls()
        for n, raw in enumerate(text.splitlines(), 1):
            if not raw.strip():
                continue
            row = json.loads(raw)
            kind = row.pop("type", None)
            if kind == "session":
                gt.sessions.append(row)
            elif kind == "line":
                gt.lines.append(row)
            else:
                raise ValueError(f"ground truth row {n}: unknown type {kind!r}")
        return gt


def _parse_time(value, path: str, problems: list) -> int | None:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, str):
        try:
            dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
        except ValueError:
            pass
        else:
            if dt.tzinfo is None:
                dt = dt.replace(tzinfo=timezone.utc)
            return int(dt.timestamp())
    problems.append((path, f"unparsable time {value!r}"))
    return None


def _check_number(obj: dict, key: str, path: str, problems: list, lo: float = 0.0) -> None:
    value = obj.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool) or value < lo:
        problems.append((f"{path}.{key}", f"expected a number >= {lo}"))


def validate(scenario: dict) -> list[tuple[str, str]]:
    """Structural problems in a scenario, as (path, message) pairs."""
    problems: list[tuple[str, str]] = []
    if not isinstance(scenario, dict):
        return [("$", "scenario must be an object")]
    if not isinstance(scenario.get("seed", 0), int):
        problems.append(("$.seed", "expected an integer"))
    users = scenario.get("users")
    if not isinstance(users, list) or not users:
        problems.append(("$.users", "expected a non-empty list"))
        return problems
    thresholds = {**DEFAULT_THRESHOLDS, **scenario.get("thresholds", {})}
    for ui, user in enumerate(users):
        up = f"$.users[{ui}]"
        if not isinstance(user, dict):
            problems.append((up, "expected an object"))
            continue
        if user.get("cohort") not in ("robot", "human"):
            problems.append((f"{up}.cohort", "expected 'robot' or 'human'"))
        if not isinstance(user.get("ip"), str) or not user.get("ip"):
            problems.append((f"{up}.ip", "expected a string"))
        if not isinstance(user.get("ua"), str) or not user.get("ua"):
            problems.append((f"{up}.ua", "expected a string"))
        rotation = user.get("ua_rotation", 0)
        if not isinstance(rotation, int) or (rotation and rotation <= thresholds["ua_per_ip"]):
            problems.append((f"{up}.ua_rotation", f"expected 0 or an integer > {thresholds['ua_per_ip']}"))
        if rotation and user.get("self_identified"):
            problems.append((f"{up}.ua_rotation", "rotating agents cannot be self-identified"))
        sessions = user.get("sessions")
        if not isinstance(sessions, list) or not sessions:
            problems.append((f"{up}.sessions", "expected a non-empty list"))
            continue
        for si, sess in enumerate(sessions):
            sp = f"{up}.sessions[{si}]"
            if not isinstance(sess, dict):
                problems.append((sp, "expected an object"))
                continue
            pattern = sess.get("pattern")
            if pattern not in PATTERNS:
                problems.append((f"{sp}.pattern", f"expected one of {PATTERNS}"))
                continue
            if "requests" in sess:
                rows = sess["requests"]
                if not isinstance(rows, list) or not rows:
                    problems.append((f"{sp}.requests", "expected a non-empty list"))
                else:
                    for ri, row in enumerate(rows):
                        if not isinstance(row, dict) or "uri" not in row or "time" not in row:
                            problems.append((f"{sp}.requests[{ri}]", "expected {time, uri}"))
                        else:
                            _parse_time(row["time"], f"{sp}.requests[{ri}].time", problems)
            else:
                length = sess.get("length", 1 if pattern == "Dip" else None)
                if pattern == "Composite":
                    segs = sess.get("segments")
                    if not isinstance(segs, list) or len(segs) < 2:
                        problems.append((f"{sp}.segments", "expected at least two segments"))
                    else:
                        kinds = [s[0] if isinstance(s, list) and len(s) == 2 else None for s in segs]
                        if any(k not in ("Slide", "Dive") for k in kinds) or \
                                any(isinstance(s, list) and len(s) == 2 and (not isinstance(s[1], int) or s[1] < 2)
                                    for s in segs):
                            problems.append((f"{sp}.segments", "expected [kind, length >= 2] pairs"))
                        elif any(a == b for a, b in zip(kinds, kinds[1:])):
                            problems.append((f"{sp}.segments", "adjacent segments must alternate"))
                elif not isinstance(length, int):
                    problems.append((f"{sp}.length", "expected an integer"))
                elif pattern == "Dip" and length != 1:
                    problems.append((f"{sp}.length", "a Dip has exactly one request"))
                elif pattern != "Dip" and length < 2:
                    problems.append((f"{sp}.length", f"a {pattern} needs at least two requests"))
                uri_rs = sess.get("uri_rs", [])
                if not isinstance(uri_rs, list) or not all(isinstance(u, str) for u in uri_rs):
                    problems.append((f"{sp}.uri_rs", "expected a list of strings"))
                for di, dt in enumerate(sess.get("datetimes", [])):
                    if not (isinstance(dt, str) and len(dt) == 14 and dt.isdigit()):
                        problems.append((f"{sp}.datetimes[{di}]", "expected 14 digits"))
            irt = sess.get("irt_model")
            if irt is not None:
                if not isinstance(irt, dict):
                    problems.append((f"{sp}.irt_model", "expected an object"))
                else:
                    for key in ("mean", "stdev"):
                        _check_number(irt, key, f"{sp}.irt_model", problems)
            emb = sess.get("embedded_per_html", 0)
            if not isinstance(emb, int) or emb < 0:
                problems.append((f"{sp}.embedded_per_html", "expected an integer >= 0"))
            for key, p in sess.get("status_mix", {}).items():
                if key not in ("redirect", "not_found"):
                    problems.append((f"{sp}.status_mix.{key}", "unknown status kind"))
                elif not isinstance(p, (int, float)) or not 0 <= p <= 1:
                    problems.append((f"{sp}.status_mix.{key}", "expected a probability"))
            if "start" in sess:
                _parse_time(sess["start"], f"{sp}.start", problems)
    return problems


def _random_datetime(rng: random.Random) -> str:
    year = rng.randint(1996, 2011)
    return f"{year:04d}{rng.randint(1, 12):02d}{rng.randint(1, 28):02d}" \
           f"{rng.randint(0, 23):02d}{rng.randint(0, 59):02d}{rng.randint(0, 59):02d}"


def _nudge(digits: str, rng: random.Random) -> str:
    """Another datetime on the same day (how a Dive drifts between captures)."""
    return digits[:8] + f"{rng.randint(0, 23):02d}{rng.randint(0, 59):02d}{rng.randint(0, 59):02d}"


class _Planner:
    """Turns one session spec into its ordered page requests: (kind, uri_r, datetime)."""

    def __init__(self, rng: random.Random, spec: dict, tag: str):
        self.rng = rng
        self.spec = spec
        self.tag = tag
        self.datetimes = list(spec.get("datetimes", []))
        self.uri_rs = list(spec.get("uri_rs", []))
        self.fresh = 0

    def datetime(self) -> str:
        return self.datetimes.pop(0) if self.datetimes else _random_datetime(self.rng)

    def uri_r(self) -> str:
        if self.uri_rs:
            return self.uri_rs.pop(0)
        self.fresh += 1
        return f"http://www.{self.tag}.example.org/page{self.fresh}.html"

    def plan(self) -> list[tuple[str, str, str | None]]:
        spec = self.spec
        pattern = spec["pattern"]
        entry_tm = spec.get("entry") == "timemap"
        if pattern == "Dip":
            r = self.uri_r()
            return [("T", r, None)] if entry_tm else [("M", r, self.datetime())]
        if pattern == "Skim":
            return [("T", self.uri_r(), None) for _ in range(spec["length"])]
        if pattern == "Slide":
            r = self.uri_r()
            steps = [("T", r, None)] if entry_tm else []
            seen = set()
            while len(steps) < spec["length"]:
                dt = self.datetime()
                if dt in seen:
                    continue
                seen.add(dt)
                steps.append(("M", r, dt))
            return steps
        if pattern == "Dive":
            first = self.uri_r()
            dt = self.datetime()
            steps = [("T", first, None), ("M", first, dt)] if entry_tm else [("M", first, dt)]
            while len(steps) < spec["length"]:
                dt = _nudge(dt, self.rng)
                steps.append(("M", self.uri_r(), dt))
            return steps
        # Composite: segments share their boundary request
        steps = [("M", self.uri_r(), self.datetime())]
        for kind, length in spec["segments"]:
            for _ in range(length - 1):
                _, r, dt = steps[-1]
                if kind == "Slide":
                    nxt = self.datetime()
                    while nxt == dt:
                        nxt = self.datetime()
                    steps.append(("M", r, nxt))
                else:
                    steps.append(("M", self.uri_r(), _nudge(dt, self.rng)))
        return steps


def _page_uri(kind: str, uri_r: str, dt: str | None) -> str:
    if kind == "T":
        return f"{TIMEMAP_HOST}/web/*/{uri_r}"
    return f"{ARCHIVE}/web/{dt}/{uri_r}"


def _host_of(uri_r: str) -> str:
    rest = uri_r.split("://", 1)[-1]
    return rest.split("/", 1)[0]


def _gap(rng: random.Random, model: dict, cap: int) -> int:
    mean, sd = float(model.get("mean", 20)), float(model.get("stdev", 0))
    lo = float(model.get("min", 0))
    hi = min(float(model.get("max", cap)), cap)
    for _ in range(1000):
        x = rng.gauss(mean, sd) if sd > 0 else mean
        if lo <= x <= hi:
            break
    else:
        x = min(max(mean, lo), hi)
    return int(min(max(round(x), int(-(-lo // 1))), int(hi)))


@dataclass
class _Line:
    t: int
    order: int
    record: LogRecord
    info: dict


def generate(scenario: dict, fmt: str = "full") -> tuple[str, GroundTruth]:
    """Render a scenario into log text plus ground truth.

    Output lines are sorted by time (ties keep generation order), so users
    interleave the way a server log would.
    """
    problems = validate(scenario)
    if problems:
        raise ScenarioError(problems)
    rng = random.Random(scenario.get("seed", 0))
    timeout = int(scenario.get("timeout", 600))
    thr = {**DEFAULT_THRESHOLDS, **scenario.get("thresholds", {})}
    base = _parse_time(scenario.get("start", int(DEFAULT_START.timestamp())), "$.start", problems)
    lines: list[_Line] = []
    truth = GroundTruth()
    order = 0
    ip_agents: dict[str, set] = {}

    for ui, user in enumerate(scenario["users"]):
        up = f"$.users[{ui}]"
        ip, ua = user["ip"], user["ua"]
        rotation = user.get("ua_rotation", 0)
        si = bool(user.get("self_identified", False))
        if rotation:
            user_key = {"ip": ip, "agent": None, "collapsed": True}
        else:
            user_key = {"ip": ip, "agent": ua, "collapsed": False}
        agent_n = 0
        cursor = base + rng.randint(0, 3600)
        prev_end = None
        for si_idx, spec in enumerate(user["sessions"]):
            sp = f"{up}.sessions[{si_idx}]"
            if "start" in spec:
                start = _parse_time(spec["start"], f"{sp}.start", problems)
            else:
                start = cursor if prev_end is None else prev_end + timeout + rng.randint(60, 1800)
            if prev_end is not None and start - prev_end <= timeout:
                problems.append((f"{sp}.start", f"must be more than {timeout}s after the previous session"))
            emb = spec.get("embedded_per_html", 0)
            mix = spec.get("status_mix", {})
            irt = {**DEFAULT_IRT, **spec.get("irt_model", {})}
            tag = f"u{ui}s{si_idx}"

            if "requests" in spec:
                pages = []
                for row in spec["requests"]:
                    pages.append((_parse_time(row["time"], sp, problems), row["uri"], None, None))
            else:
                steps = _Planner(rng, spec, tag).plan()
                pages = []
                t = start
                for i, (kind, uri_r, dt) in enumerate(steps):
                    if i:
                        t += _gap(rng, irt, timeout)
                    pages.append((t, _page_uri(kind, uri_r, dt), kind, dt))

            def agent() -> str:
                nonlocal agent_n
                if not rotation:
                    return ua
                agent_n += 1
                return f"{ua} r{agent_n % rotation}"

            s_lines: list[tuple[int, LogRecord, str]] = []
            if spec.get("robots_txt"):
                s_lines.append((pages[0][0], LogRecord(ip, pages[0][0], "GET", f"{ARCHIVE}/robots.txt",
                                                       status=200, bytes_sent=1200, user_agent=agent()), "robots_txt"))
            referrer = None
            for t, uri, kind, dt in pages:
                if kind == "M" and mix.get("redirect", 0) and rng.random() < mix["redirect"]:
                    near = dt[:8] + "000000"
                    s_lines.append((t, LogRecord(ip, t, "GET", uri.replace(f"/web/{dt}/", f"/web/{near}/"),
                                                 status=302, bytes_sent=0, referrer=referrer,
                                                 user_agent=agent()), "redirect"))
                status = 404 if mix.get("not_found", 0) and rng.random() < mix["not_found"] else 200
                s_lines.append((t, LogRecord(ip, t, "GET", uri, status=status,
                                             bytes_sent=rng.randint(2_000, 120_000),
                                             referrer=referrer, user_agent=agent()), "page"))
                for j in range(emb):
                    if kind == "T" or kind is None:
                        img = f"{ARCHIVE}/static/images/toolbar/wm_{j}.png"
                    else:
                        img = f"{ARCHIVE}/web/{dt}im_/http://{_host_of(uri.split('/web/', 1)[1].split('/', 1)[1])}/img/{j}.gif"
                    s_lines.append((t, LogRecord(ip, t, "GET", img, status=200,
                                                 bytes_sent=rng.randint(500, 40_000),
                                                 referrer=uri, user_agent=agent()), "image"))
                referrer = uri

            ip_agents.setdefault(ip, set()).update(
                rec.user_agent for _, rec, role in s_lines if role in ("page", "robots_txt"))
            retained = [t for t, _, role in s_lines if role in ("page", "robots_txt")]
            images = sum(1 for _, _, role in s_lines if role == "image")
            html = sum(1 for _, _, role in s_lines if role in ("page", "redirect"))
            s_l, s_d = len(retained), retained[-1] - retained[0]
            triggers = []
            if si:
                triggers.append("SelfIdentified")
            if rotation:
                triggers.append("UaPerIp")
            if spec.get("robots_txt"):
                triggers.append("RobotsTxt")
            if s_d > 0 and s_l / s_d > thr["bs"]:
                triggers.append("BrowsingSpeed")
            if html and images / html < thr["ih"]:
                triggers.append("ImageHtmlRatio")
            expected_cohort = "robot" if triggers else "human"
            if expected_cohort != user["cohort"]:
                problems.append((sp, f"planted traffic makes a {expected_cohort}, declared {user['cohort']} "
                                     f"(triggers: {triggers or 'none'})"))
            segments = [list(s) for s in spec.get("segments", [])] if spec["pattern"] == "Composite" else []
            truth.sessions.append({
                "user": user_key, "session": si_idx, "cohort": user["cohort"], "pattern": spec["pattern"],
                "segments": segments, "triggers": triggers, "pages": s_l,
                "start": retained[0], "end": retained[-1],
                "mementos": [[p[1], p[3]] for p in pages if p[2] == "M"],
            })
            for t, rec, role in s_lines:
                lines.append(_Line(t, order, rec, {"user": user_key, "session": si_idx, "role": role,
                                                   "cohort": user["cohort"], "pattern": spec["pattern"]}))
                order += 1
            prev_end = max(t for t, _, _ in s_lines)

    for ip, agents in ip_agents.items():
        rotating = any(u.get("ua_rotation") for u in scenario["users"] if u["ip"] == ip)
        non_si = [u for u in scenario["users"] if u["ip"] == ip and not u.get("self_identified")]
        if not rotating and len({u["ua"] for u in non_si}) > thr["ua_per_ip"]:
            problems.append((f"$.users[ip={ip}]", "too many agents share this IP"))
        if rotating and len(scenario_users_for(scenario, ip)) > 1:
            problems.append((f"$.users[ip={ip}]", "a rotating-agent robot needs an IP of its own"))
        if rotating and len(agents) <= thr["ua_per_ip"]:
            problems.append((f"$.users[ip={ip}]", "too few requests to exceed the agent threshold"))
    if problems:
        raise ScenarioError(problems)

    lines.sort(key=lambda ln: (ln.t, ln.order))
    out = []
    for n, ln in enumerate(lines, 1):
        out.append(format_record(ln.record, fmt))
        truth.lines.append({"line": n, **ln.info})
    return "".join(s + "\n" for s in out), truth


def scenario_users_for(scenario: dict, ip: str) -> list[dict]:
    return [u for u in scenario["users"] if u["ip"] == ip]


def load_scenario(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# --- verification -------------------------------------------------------------

def _user_tuple(user: dict) -> tuple:
    return (user["ip"], user.get("agent"), bool(user.get("collapsed", False)))


def verify(truth: GroundTruth | list[dict], observed: list[dict]) -> dict:
    """Compare planted sessions with a pipeline session dump.

    Sessions are matched on (user, session index). Cohort, pattern kind,
    composite segment kinds and triggered heuristics are compared per match;
    unmatched or resized sessions are structural differences.
    """
    expected = truth.sessions if isinstance(truth, GroundTruth) else truth
    want = {(_user_tuple(s["user"]), s["session"]): s for s in expected}
    got = {(_user_tuple(s["user"]), s["session_index"]): s for s in observed}
    mismatches, structural = [], []
    for key in sorted(want.keys() - got.keys(), key=repr):
        structural.append({"key": list(key), "problem": "missing from pipeline output"})
    for key in sorted(got.keys() - want.keys(), key=repr):
        structural.append({"key": list(key), "problem": "not in ground truth"})
    matched = 0
    for key in sorted(want.keys() & got.keys(), key=repr):
        w, g = want[key], got[key]
        if w.get("pages") is not None and w["pages"] != g.get("s_l"):
            structural.append({"key": list(key), "problem": f"{w['pages']} requests planted, {g.get('s_l')} found"})
            continue
        matched += 1
        g_pattern = (g.get("pattern") or {}).get("kind")
        diffs = {}
        if w["cohort"] != g.get("cohort"):
            diffs["cohort"] = [w["cohort"], g.get("cohort")]
        if w["pattern"] != g_pattern:
            diffs["pattern"] = [w["pattern"], g_pattern]
        if w.get("segments"):
            g_segs = [[s["kind"], s["length"]] for s in (g.get("pattern") or {}).get("segments", [])]
            if [list(s) for s in w["segments"]] != g_segs:
                diffs["segments"] = [w["segments"], g_segs]
        if "triggers" in w:
            g_trig = sorted((g.get("verdict") or {}).get("triggered", []))
            if sorted(w["triggers"]) != g_trig:
                diffs["triggers"] = [sorted(w["triggers"]), g_trig]
        if diffs:
            mismatches.append({"key": list(key), **diffs})
    return {
        "expected_sessions": len(want),
        "observed_sessions": len(got),
        "matched": matched,
        "mismatches": mismatches,
        "structural": structural,
        "ok": not mismatches and not structural,
    }


# --- stock scenarios --------------------------------------------------------------

def _ip(n: int) -> str:
    return f"0.{(n >> 16) & 255}.{(n >> 8) & 255}.{n & 255}"


HUMAN_SESSION_KINDS = (
    {"pattern": "Dip"},
    {"pattern": "Dip", "entry": "timemap"},
    {"pattern": "Slide", "length": 4},
    {"pattern": "Slide", "length": 3, "entry": "timemap"},
    {"pattern": "Dive", "length": 5},
    {"pattern": "Dive", "length": 4, "entry": "timemap"},
    {"pattern": "Skim", "length": 3},
    {"pattern": "Composite", "segments": [["Slide", 3], ["Dive", 2]]},
    {"pattern": "Composite", "segments": [["Dive", 3], ["Slide", 2]]},
    {"pattern": "Composite", "segments": [["Slide", 2], ["Dive", 3], ["Slide", 2]]},
)


def corpus_scenario(n_users: int = 1200, seed: int = 2012) -> dict:
    """A mixed corpus exercising every pattern and every robot heuristic."""
    rng = random.Random(seed)
    users = []
    human_irt = {"mean": 25, "stdev": 10, "min": 5, "max": 300}
    slow_irt = {"mean": 40, "stdev": 15, "min": 8, "max": 400}
    fast_irt = {"mean": 1.0, "stdev": 0.4, "min": 0, "max": 2}
    robot_kinds = ("si", "fast", "fast_images", "robots_txt", "rotating", "no_images")
    for n in range(n_users):
        ip = _ip(n + 1)
        if n % 5 in (0, 1):
            sessions = []
            for _ in range(1 + (rng.random() < 0.3)):
                spec = dict(HUMAN_SESSION_KINDS[rng.randrange(len(HUMAN_SESSION_KINDS))])
                spec.update(irt_model=human_irt, embedded_per_html=rng.randint(1, 3),
                            status_mix={"redirect": 0.25, "not_found": 0.05})
                sessions.append(spec)
            users.append({"cohort": "human", "ip": ip, "ua": rng.choice(HUMAN_AGENTS), "sessions": sessions})
            continue
        kind = robot_kinds[n % len(robot_kinds)]
        user = {"cohort": "robot", "ip": ip, "ua": rng.choice(HUMAN_AGENTS)}
        if kind == "si":
            user.update(ua=rng.choice(CRAWLER_AGENTS), self_identified=True)
            user["sessions"] = [{"pattern": rng.choice(("Dip", "Skim")), "length": rng.randint(2, 8),
                                 "entry": "timemap", "irt_model": slow_irt}]
            if user["sessions"][0]["pattern"] == "Dip":
                user["sessions"][0]["length"] = 1
        elif kind == "fast":
            user["sessions"] = [{"pattern": "Skim", "length": rng.randint(20, 60), "irt_model": fast_irt}]
        elif kind == "fast_images":
            user["sessions"] = [{"pattern": "Dive", "length": rng.randint(10, 30), "irt_model": fast_irt,
                                 "embedded_per_html": 1}]
        elif kind == "robots_txt":
            user["sessions"] = [{"pattern": rng.choice(("Slide", "Dive")), "length": rng.randint(3, 6),
                                 "robots_txt": True, "irt_model": slow_irt, "embedded_per_html": 2}]
        elif kind == "rotating":
            user.update(ua_rotation=25)
            user["sessions"] = [{"pattern": "Skim", "length": 30, "irt_model": slow_irt, "embedded_per_html": 1}]
        else:
            spec = dict(HUMAN_SESSION_KINDS[rng.randrange(len(HUMAN_SESSION_KINDS))])
            spec.update(irt_model=slow_irt)
            user["sessions"] = [spec]
        users.append(user)
    return {"seed": seed, "users": users}


def temporal_scenario(years=range(2000, 2012), per_year: int = 5, repeat_year: int = 2011,
                      repeats: int = 4, seed: int = 11) -> dict:
    """Human Dips over distinct mementos, with extra repeat requests in one year.

    Every year gets ``per_year`` distinct mementos; each memento in
    ``repeat_year`` is additionally requested by ``repeats`` more users.
    """
    users = []
    n = 0
    for year in years:
        for k in range(per_year):
            dt = f"{year}0{1 + k % 9}15120000"
            uri = f"http://www.news{k}.example.com/"
            copies = 1 + (repeats if year == repeat_year else 0)
            for _ in range(copies):
                n += 1
                users.append({"cohort": "human", "ip": _ip(n), "ua": HUMAN_AGENTS[n % len(HUMAN_AGENTS)],
                              "sessions": [{"pattern": "Dip", "uri_rs": [uri], "datetimes": [dt],
                                            "embedded_per_html": 2}]})
    return {"seed": seed, "users": users}
