"""Aggregate reports over an analysed log sample, and their file exports."""

from __future__ import annotations

import csv
import json
import math
import os
import statistics
from collections import Counter, defaultdict
from typing import Iterable, Sequence

from .archiveuri import EMBEDDED_CLASSES, UriKind
from .cleaning import CleanReport, Request
from .patterns import PatternKind, pattern_stats
from .pipeline import Analysis, LabeledSession
from .robots import HEURISTIC_ORDER, heuristic_table

COHORTS = ("robot", "human")
DURATION_BUCKETS = (
    ("<1min", 0, 60),
    ("1-5min", 60, 300),
    ("5-10min", 300, 600),
    ("10-30min", 600, 1800),
    ("30-60min", 1800, 3600),
    (">60min", 3600, math.inf),
)
SPARSE_BEFORE_YEAR = 2001


def _pct(part: int, whole: int) -> float:
    return round(100.0 * part / whole, 4) if whole else 0.0


def hms(seconds: int) -> str:
    h, rem = divmod(int(seconds), 3600)
    m, s = divmod(rem, 60)
    return f"{h:02d}:{m:02d}:{s:02d}"


def sample_features(raw: Sequence[Request], clean_report: CleanReport, sessions: Sequence[LabeledSession],
                    is_self_identified) -> dict:
    """Table-1 style description of one log sample, percentages over raw requests."""
    n = len(raw)
    if n == 0:
        raise ValueError("sample_features needs at least one request")
    times = [r.timestamp for r in raw]
    status = Counter(r.record.status // 100 for r in raw)
    return {
        "duration": hms(max(times) - min(times)),
        "requests": n,
        "pct_get": _pct(sum(1 for r in raw if r.record.method.upper() == "GET"), n),
        "pct_embedded": _pct(sum(1 for r in raw if r.target.resource_class in EMBEDDED_CLASSES), n),
        "pct_si_robots": _pct(sum(1 for r in raw if is_self_identified(r.record.user_agent)), n),
        "pct_nullref": _pct(sum(1 for r in raw if r.record.referrer is None), n),
        "pct_s2xx": _pct(status[2], n),
        "pct_s3xx": _pct(status[3], n),
        "pct_s4xx": _pct(status[4], n),
        "pct_s5xx": _pct(status[5], n),
        "pct_cleaned": _pct(clean_report.retained, n),
        "sessions": len(sessions),
    }


def _eligible_counts(session) -> tuple[int, int]:
    t = m = 0
    for r in session.requests:
        if r.target.kind is UriKind.TIMEMAP:
            t += 1
        elif r.target.kind is UriKind.MEMENTO:
            m += 1
    return t, m


def cohort_summary(sessions: Iterable[LabeledSession], total_raw: int | None = None) -> dict:
    """Table-4 style traffic per cohort.

    Raw requests are attributed through each session's time window; whatever
    no session owns is reported as ``unattributed_raw``.
    """
    rows = {c: {"requests_filtered": 0, "requests_raw": 0, "sessions": 0, "bytes": 0,
                "uri_t_count": 0, "uri_m_count": 0} for c in COHORTS}
    for ls in sessions:
        row = rows[ls.cohort]
        s = ls.session
        row["sessions"] += 1
        row["requests_filtered"] += s.s_l
        row["requests_raw"] += s.raw_count
        row["bytes"] += s.raw_bytes
        t, m = _eligible_counts(s)
        row["uri_t_count"] += t
        row["uri_m_count"] += m
    all_sessions = sum(r["sessions"] for r in rows.values())
    all_filtered = sum(r["requests_filtered"] for r in rows.values())
    for row in rows.values():
        eligible = row["uri_t_count"] + row["uri_m_count"]
        row["megabytes"] = round(row["bytes"] / 1_000_000, 6)
        row["mb_per_session"] = round(row["megabytes"] / row["sessions"], 6) if row["sessions"] else None
        row["pct_sessions"] = _pct(row["sessions"], all_sessions)
        row["pct_requests_filtered"] = _pct(row["requests_filtered"], all_filtered)
        row["pct_uri_t"] = _pct(row["uri_t_count"], eligible)
        row["pct_uri_m"] = _pct(row["uri_m_count"], eligible)
        if total_raw is not None:
            row["pct_requests_raw"] = _pct(row["requests_raw"], total_raw)
    out = {"robots": rows["robot"], "humans": rows["human"]}
    humans = rows["human"]["sessions"]
    out["robot_to_human_sessions"] = round(rows["robot"]["sessions"] / humans, 6) if humans else None
    if total_raw is not None:
        out["unattributed_raw"] = total_raw - rows["robot"]["requests_raw"] - rows["human"]["requests_raw"]
    return out


def temporal_histogram(sessions: Iterable[LabeledSession]) -> dict[int, dict]:
    """Per Memento-Datetime year: distinct mementos and total memento requests by humans."""
    unique: dict[int, set] = defaultdict(set)
    total: Counter = Counter()
    for ls in sessions:
        if ls.verdict.is_robot or ls.session.si_pool:
            continue
        for r in ls.session.requests:
            if r.target.kind is UriKind.MEMENTO:
                year = r.target.memento_datetime.year
                unique[year].add((r.target.uri_r, r.target.memento_datetime))
                total[year] += 1
    return {
        year: {"unique_mementos": len(unique[year]), "total_requests": total[year],
               "sparse": year < SPARSE_BEFORE_YEAR}
        for year in sorted(total)
    }


def _median(values: list) -> float | None:
    return statistics.median(values) if values else None


def session_distributions(sessions: Iterable[LabeledSession]) -> dict:
    """Length histogram, duration buckets and inter-request medians per cohort.

    Durations and inter-request times use multi-request sessions only;
    self-identified robots are left out of these comparisons.
    """
    out = {}
    groups = defaultdict(list)
    for ls in sessions:
        if not ls.session.si_pool:
            groups[ls.cohort].append(ls.session)
    for cohort in COHORTS:
        group = groups.get(cohort, [])
        multi = [s for s in group if s.s_l > 1]
        lengths = Counter(s.s_l for s in group)
        buckets = {name: 0 for name, _, _ in DURATION_BUCKETS}
        for s in multi:
            for name, lo, hi in DURATION_BUCKETS:
                if lo <= s.s_d < hi:
                    buckets[name] += 1
                    break
        out[cohort] = {
            "sessions": len(group),
            "multi_request_sessions": len(multi),
            "length_histogram": {str(k): lengths[k] for k in sorted(lengths)},
            "mean_length": round(statistics.fmean(s.s_l for s in group), 6) if group else None,
            "duration_buckets": buckets,
            "pct_duration_buckets": {k: _pct(v, len(multi)) for k, v in buckets.items()},
            "mean_duration_s": round(statistics.fmean(s.s_d for s in multi), 6) if multi else None,
            "median_mean_irt_s": _median([s.mean_irt for s in multi]),
            "median_stdev_irt_s": _median([s.stdev_irt for s in multi]),
        }
    return out


def pattern_distribution(sessions: Iterable[LabeledSession]) -> dict:
    """Per cohort: share of sessions per pattern and TimeMap/memento split per pattern."""
    counts = {c: Counter() for c in COHORTS}
    tm = {c: Counter() for c in COHORTS}
    mem = {c: Counter() for c in COHORTS}
    no_pattern = Counter()
    for ls in sessions:
        if ls.pattern is None:
            no_pattern[ls.cohort] += 1
            continue
        kind = ls.pattern.kind.value
        counts[ls.cohort][kind] += 1
        t, m = _eligible_counts(ls.session)
        tm[ls.cohort][kind] += t
        mem[ls.cohort][kind] += m
    out = {}
    for c in COHORTS:
        total = sum(counts[c].values())
        rows = {}
        for kind in PatternKind:
            k = kind.value
            eligible = tm[c][k] + mem[c][k]
            rows[k] = {
                "sessions": counts[c][k],
                "pct_sessions": _pct(counts[c][k], total),
                "uri_t": tm[c][k],
                "uri_m": mem[c][k],
                "pct_uri_t": _pct(tm[c][k], eligible),
                "pct_uri_m": _pct(mem[c][k], eligible),
            }
        out[c] = {"classified_sessions": total, "no_pattern_sessions": no_pattern[c], "patterns": rows}
    return out


def segment_tallies(sessions: Iterable[LabeledSession]) -> dict:
    """Slide and Dive segment counts inside composite sessions, per cohort."""
    out = {c: {"composite_sessions": 0, "slides": 0, "dives": 0} for c in COHORTS}
    for ls in sessions:
        if ls.pattern is not None and ls.pattern.kind is PatternKind.COMPOSITE:
            row = out[ls.cohort]
            row["composite_sessions"] += 1
            row["slides"] += ls.pattern.slide_count
            row["dives"] += ls.pattern.dive_count
    return out


def pattern_length_stats(sessions: Sequence[LabeledSession]) -> dict:
    return pattern_stats([ls.pattern for ls in sessions], [ls.cohort for ls in sessions])


def _jsonable(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return value
    return value


def session_record(ls: LabeledSession) -> dict:
    s = ls.session
    return {
        "user": s.user.to_dict(),
        "session_index": s.index,
        "start": s.start,
        "end": s.end,
        "si_pool": s.si_pool,
        "s_l": s.s_l,
        "s_d": s.s_d,
        "bs": s.bs,
        "mean_irt": s.mean_irt,
        "stdev_irt": s.stdev_irt,
        "ih": _jsonable(s.ih),
        "images": s.image_count,
        "html": s.html_count,
        "raw_requests": s.raw_count,
        "raw_bytes": s.raw_bytes,
        "cohort": ls.cohort,
        "verdict": ls.verdict.to_dict(),
        "pattern": ls.pattern.to_dict() if ls.pattern else None,
        "requests": [
            {"t": r.timestamp, "uri": r.record.request_uri, "kind": r.target.kind.value,
             "uri_r": r.target.uri_r, "status": r.record.status}
            for r in s.requests
        ],
    }


def build_report(analysis: Analysis) -> dict:
    sessions = analysis.sessions
    detector_table = heuristic_table([ls.session for ls in sessions], [ls.verdict for ls in sessions])
    return {
        "config": analysis.config.effective(),
        "inputs": analysis.inputs,
        "lines": {"parsed": analysis.parsed, "failed": analysis.failed,
                  "file_errors": analysis.file_errors},
        "sample_features": sample_features(analysis.raw, analysis.clean_report, sessions, analysis.matcher),
        "cleaning": analysis.clean_report.to_dict(),
        "robot_heuristics": detector_table,
        "cohorts": cohort_summary(sessions, len(analysis.raw)),
        "patterns": pattern_distribution(sessions),
        "composite_segments": segment_tallies(sessions),
        "pattern_lengths": pattern_length_stats(sessions),
        "session_distributions": session_distributions(sessions),
        "temporal": {str(y): row for y, row in temporal_histogram(sessions).items()},
    }


def _write_csv(path: str, header: list[str], rows: Iterable[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_report(analysis: Analysis, out_dir: str) -> dict:
    """Write report.json, the per-table CSV files and sessions.jsonl into ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    report = build_report(analysis)
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")

    t1 = report["sample_features"]
    _write_csv(os.path.join(out_dir, "table1.csv"), ["feature", "value"], [[k, v] for k, v in t1.items()])

    cl = report["cleaning"]
    _write_csv(os.path.join(out_dir, "table3.csv"), ["filter", "excluded", "pct_excluded"],
               [[k, cl["excluded_by"][k], cl["pct_excluded_by"][k]] for k in cl["excluded_by"]]
               + [["all_filters", cl["excluded"], cl["pct_excluded"]]])

    t2 = report["robot_heuristics"]
    _write_csv(os.path.join(out_dir, "table2.csv"), ["heuristic", "sessions", "requests"],
               [[h.value, t2["heuristics"][h.value]["sessions"], t2["heuristics"][h.value]["requests"]]
                for h in HEURISTIC_ORDER]
               + [["total_robots", t2["total_robots"]["sessions"], t2["total_robots"]["requests"]]])

    cols = ["requests_filtered", "requests_raw", "sessions", "megabytes", "uri_t_count", "uri_m_count",
            "pct_uri_t", "pct_uri_m", "mb_per_session"]
    co = report["cohorts"]
    _write_csv(os.path.join(out_dir, "table4.csv"), ["cohort"] + cols,
               [[name] + [co[name][c] for c in cols] for name in ("robots", "humans")]
               + [["unattributed_raw", "", co["unattributed_raw"]] + [""] * (len(cols) - 2)])

    rows = []
    for cohort, kinds in report["pattern_lengths"].items():
        for kind, st in kinds.items():
            if st is not None:
                rows.append([cohort, kind, st["count"], st["median"], st["mean"], st["stdev"]])
    _write_csv(os.path.join(out_dir, "table5.csv"), ["cohort", "pattern", "count", "median", "mean", "stdev"], rows)

    rows = []
    for cohort, block in report["patterns"].items():
        for kind, r in block["patterns"].items():
            rows.append([cohort, kind, r["sessions"], r["pct_sessions"], r["uri_t"], r["uri_m"],
                         r["pct_uri_t"], r["pct_uri_m"]])
    _write_csv(os.path.join(out_dir, "fig6_patterns.csv"),
               ["cohort", "pattern", "sessions", "pct_sessions", "uri_t", "uri_m", "pct_uri_t", "pct_uri_m"], rows)

    _write_csv(os.path.join(out_dir, "fig7_temporal.csv"), ["year", "unique_mementos", "total_requests", "sparse"],
               [[y, r["unique_mementos"], r["total_requests"], r["sparse"]] for y, r in report["temporal"].items()])

    with open(os.path.join(out_dir, "sessions.jsonl"), "w", encoding="utf-8") as fh:
        for ls in analysis.sessions:
            fh.write(json.dumps(session_record(ls)) + "\n")
    return report
