"""Command-line entry point: ``wayback-patterns analyze|generate|verify``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import __version__, synth
from .logmodel import FORMATS
from .patterns import PatternKind
from .pipeline import Config, PipelineError, analyze
from .report import write_report

log = logging.getLogger("wayback_patterns")

EXIT_OK, EXIT_MISMATCH, EXIT_ERROR = 0, 1, 2


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wayback-patterns",
                                     description="Access-pattern analysis of web archive request logs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="analyze access logs and write reports")
    an.add_argument("inputs", nargs="+", help="log files (gzip ok); '-' reads standard input")
    an.add_argument("-o", "--output-dir", default=None, help="report directory (default: ./report)")
    an.add_argument("--config", help="JSON file with Config fields; flags override it")
    an.add_argument("--format", dest="input_format", choices=FORMATS, default=None)
    an.add_argument("--session-timeout", dest="session_timeout_s", type=_positive_int, default=None,
                    help="seconds of inactivity that end a session (default 600)")
    an.add_argument("--ua-per-ip", dest="ua_per_ip_threshold", type=_positive_int, default=None,
                    help="an IP with more distinct agents than this is one robot (default 20)")
    an.add_argument("--bs-threshold", type=_positive_float, default=None,
                    help="requests per second above which a session is a robot (default 0.5)")
    an.add_argument("--ih-threshold", type=_positive_float, default=None,
                    help="image-to-HTML ratio below which a session is a robot (default 0.1)")
    an.add_argument("--si-patterns", dest="si_pattern_file", default=None,
                    help="file of self-identified robot agent substrings")
    an.add_argument("--resource-classes", dest="resource_class_lists", default=None,
                    help="JSON file overriding the resource classification lists")
    an.add_argument("--threads", type=_positive_int, default=None, help="parallel workers (default 1)")
    an.add_argument("--keep-going", action="store_true", default=None,
                    help="skip unreadable inputs instead of failing")
    an.set_defaults(func=cmd_analyze)

    gen = sub.add_parser("generate", help="render a synthetic scenario into a log and ground truth")
    gen.add_argument("scenario", help="scenario JSON file, or 'corpus:N' / 'temporal' for stock scenarios")
    gen.add_argument("out", help="log file to write; ground truth goes to OUT.truth.jsonl")
    gen.add_argument("--format", dest="input_format", choices=FORMATS, default="full")
    gen.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    gen.set_defaults(func=cmd_generate)

    ver = sub.add_parser("verify", help="compare ground truth with an analyze sessions dump")
    ver.add_argument("truth", help="ground-truth JSON lines from 'generate'")
    ver.add_argument("sessions", help="sessions.jsonl written by 'analyze'")
    ver.set_defaults(func=cmd_verify)
    return parser


_CONFIG_FLAGS = ("session_timeout_s", "ua_per_ip_threshold", "bs_threshold", "ih_threshold",
                 "si_pattern_file", "resource_class_lists", "input_format", "output_dir", "threads",
                 "keep_going")


def config_from_args(args: argparse.Namespace) -> Config:
    overrides = {k: getattr(args, k) for k in _CONFIG_FLAGS if getattr(args, k, None) is not None}
    if args.config:
        return Config.load(args.config, **overrides)
    return Config(**overrides)


def format_summary(report: dict) -> str:
    co = report["cohorts"]
    robots, humans = co["robots"]["sessions"], co["humans"]["sessions"]
    ratio = co["robot_to_human_sessions"]
    lines = [
        f"lines parsed: {report['lines']['parsed']} (failed: {report['lines']['failed']})",
        f"sessions: {robots + humans} (robot: {robots}, human: {humans})",
        f"robot:human session ratio: {'n/a' if ratio is None else f'{ratio:.3f}:1'}",
        "patterns:",
    ]
    for cohort, block in report["patterns"].items():
        counts = ", ".join(f"{k.value} {block['patterns'][k.value]['sessions']}" for k in PatternKind)
        lines.append(f"  {cohort}: {counts}")
    return "\n".join(lines)


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        config = config_from_args(args)
        config.validate()
    except (OSError, ValueError, TypeError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        analysis = analyze(args.inputs, config)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for msg in analysis.file_errors:
        print(f"warning: skipped {msg}", file=sys.stderr)
    if analysis.failed:
        print(f"warning: {analysis.failed} unparsable line(s) skipped", file=sys.stderr)
    out_dir = config.output_dir or "report"
    report = write_report(analysis, out_dir)
    print(format_summary(report))
    print(f"reports written to {out_dir}")
    return EXIT_OK


def _load_scenario(spec: str) -> dict:
    if spec.startswith("corpus:"):
        return synth.corpus_scenario(int(spec.split(":", 1)[1]))
    if spec == "temporal":
        return synth.temporal_scenario()
    return synth.load_scenario(spec)


def cmd_generate(args: argparse.Namespace) -> int:
    try:
        scenario = _load_scenario(args.scenario)
        if args.seed is not None:
            scenario["seed"] = args.seed
        text, truth = synth.generate(scenario, args.input_format)
    except synth.ScenarioError as exc:
        for path, msg in exc.problems:
            print(f"error: {path}: {msg}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    parent = os.path.dirname(args.out)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    truth_path = args.out + ".truth.jsonl"
    with open(truth_path, "w", encoding="utf-8") as fh:
        fh.write(truth.to_jsonl())
    print(f"{len(truth.lines)} lines, {len(truth.sessions)} sessions -> {args.out}, {truth_path}")
    return EXIT_OK


_SESSION_KEYS = ("user", "session_index", "cohort", "pattern", "verdict", "s_l")


def _read_sessions(path: str) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip():
                continue
            row = json.loads(line)
            missing = [k for k in _SESSION_KEYS if k not in row]
            if missing:
                raise ValueError(f"{path}:{n}: missing keys {missing}")
            rows.append(row)
    return rows


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        with open(args.truth, encoding="utf-8") as fh:
            truth = synth.GroundTruth.from_jsonl(fh.read())
        for n, s in enumerate(truth.sessions, 1):
            if not {"user", "session", "cohort", "pattern"} <= s.keys():
                raise ValueError(f"{args.truth}: session record {n} lacks user/session/cohort/pattern")
        observed = _read_sessions(args.sessions)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: schema mismatch: {exc}", file=sys.stderr)
        return EXIT_ERROR
    diff = synth.verify(truth, observed)
    print(json.dumps(diff, indent=2))
    return EXIT_OK if diff["ok"] else EXIT_MISMATCH


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
