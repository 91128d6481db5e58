"""Command-line interface: run, calibrate, review, report, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .dataset import load_dataset
from .evaluate import MetricsRow, ReportFormat, emit_report
from .models import ModelError, RejectReason, RejectReasonKind, ResolutionLabel
from .normalize import default_profile
from .pipeline import (
    ConfigError,
    RunDirectory,
    apply_review_decision,
    calibrate_thresholds,
    load_run_config,
    reprocess_case,
    run_pipeline,
)
from .similarity import VectorizerConfig, score_pair
from .stores import StoreError

PROG = "entitymatch"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Resolve declared company names against official registers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_cmd = sub.add_parser("run", help="execute a resolution run from a config file")
    run_cmd.add_argument("--config", required=True, help="YAML run configuration")
    run_cmd.add_argument("--input", help="override the dataset path")
    run_cmd.add_argument("--out-dir", help="override the output directory")
    run_cmd.add_argument("--backend", help="override the deciding backend (or 'ensemble')")
    run_cmd.add_argument("--seed", type=int, help="override the run seed")

    cal_cmd = sub.add_parser("calibrate", help="sweep accept thresholds for one metric")
    cal_cmd.add_argument("--input", required=True, help="labeled dataset to sweep over")
    cal_cmd.add_argument(
        "--metric",
        default="levenshtein",
        choices=("levenshtein", "cosine", "jaccard"),
        help="which similarity score to threshold",
    )

    review_cmd = sub.add_parser("review", help="work the review queue of a finished run")
    review_sub = review_cmd.add_subparsers(dest="review_command", required=True)

    list_cmd = review_sub.add_parser("list", help="list queued cases")
    list_cmd.add_argument("--run-dir", required=True)
    list_cmd.add_argument("--status", default="pending", choices=("pending", "resolved", "all"))

    decide_cmd = review_sub.add_parser("decide", help="record a decision on a pending case")
    decide_cmd.add_argument("--run-dir", required=True)
    decide_cmd.add_argument("--case", required=True, help="case id")
    decide_cmd.add_argument("--decision", required=True, choices=("Accepted", "Rejected"))
    decide_cmd.add_argument("--reviewer", required=True)
    decide_cmd.add_argument(
        "--reason",
        help="reject reason, KIND or KIND:detail (e.g. NameMismatch, 'Other:left register')",
    )

    reprocess_cmd = review_sub.add_parser("reprocess", help="send a resolved case back to pending")
    reprocess_cmd.add_argument("--run-dir", required=True)
    reprocess_cmd.add_argument("--case", required=True, help="case id")
    reprocess_cmd.add_argument("--reviewer", default="")

    report_cmd = sub.add_parser("report", help="print a run's metrics table")
    report_cmd.add_argument("--run-dir", required=True)
    report_cmd.add_argument("--format", default="delimited", choices=("delimited", "markdown"))

    serve_cmd = sub.add_parser("serve", help="serve the review API for a run")
    serve_cmd.add_argument("--run-dir", required=True)
    serve_cmd.add_argument("--bind", default="127.0.0.1", help="bind address (loopback by default)")
    serve_cmd.add_argument("--port", type=int, default=8720)

    return parser


def _parse_reason_arg(raw: Optional[str]) -> Optional[RejectReason]:
    if raw is None:
        return None
    kind_text, _, detail = raw.partition(":")
    try:
        kind = RejectReasonKind(kind_text.strip())
    except ValueError:
        valid = ", ".join(k.value for k in RejectReasonKind)
        raise ModelError(f"unknown reject reason {kind_text!r}; valid kinds: {valid}") from None
    return RejectReason(kind, detail.strip())


def _cmd_run(args: argparse.Namespace) -> int:
    config = load_run_config(
        args.config,
        input_override=args.input,
        out_dir_override=args.out_dir,
        decider_override=args.backend,
        seed_override=args.seed,
    )
    report = run_pipeline(config)
    print(f"cases:         {report.total_cases}")
    print(f"accepted:      {report.accepted}")
    print(f"rejected:      {report.rejected}")
    print(f"doubtful:      {report.doubtful} (enqueued: {report.enqueued})")
    print(f"registry hits: {report.registry_hits}")
    if report.errors:
        print(f"errors:        {len(report.errors)} (see report.json)")
    print(f"artifacts:     {report.out_dir}")
    return 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    cases = load_dataset(args.input)
    profile = default_profile()
    vectorizer = VectorizerConfig()
    for case in cases:
        if case.reference.official_name is not None:
            case.scores = score_pair(
                case.record.company_name,
                case.reference.official_name,
                profile,
                vectorizer,
            ).as_dict()
    rows = calibrate_thresholds(cases, args.metric)
    print(f"threshold sweep for {args.metric} ({len(cases)} cases)")
    print("threshold,accuracy,fpr")
    for row in rows:
        print(f"{row['threshold']:.2f},{row['accuracy']:.2f},{row['fpr']:.2f}")
    return 0


def _cmd_review(args: argparse.Namespace) -> int:
    run_dir = RunDirectory(args.run_dir)
    if args.review_command == "list":
        if args.status == "pending":
            entries = run_dir.queue.pending()
        elif args.status == "resolved":
            entries = run_dir.queue.resolved()
        else:
            entries = run_dir.queue.all_entries()
        for entry in entries:
            case = entry.case
            resolution = case.resolution.value if case.resolution else "-"
            print(
                f"{case.case_id}  {entry.status.value:8}  {resolution:8}  "
                f"{case.record.company_name}"
            )
        print(f"{len(entries)} case(s)")
        return 0
    if args.review_command == "decide":
        case = apply_review_decision(
            run_dir,
            args.case,
            ResolutionLabel(args.decision),
            args.reviewer,
            _parse_reason_arg(args.reason),
        )
        code = f" code={case.assigned_code}" if case.assigned_code else ""
        print(f"{case.case_id} -> {case.resolution.value}{code}")
        return 0
    # reprocess
    case = reprocess_case(run_dir, args.case, args.reviewer)
    print(f"{case.case_id} -> pending")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    metrics_file = Path(args.run_dir) / "metrics.json"
    if not metrics_file.exists():
        print(f"error: no metrics in {args.run_dir} (run had no labeled cases?)", file=sys.stderr)
        return 1
    data = json.loads(metrics_file.read_text(encoding="utf-8"))
    rows = [MetricsRow.from_dict(row) for row in data.get("rows", [])]
    fmt = ReportFormat.MARKDOWN if args.format == "markdown" else ReportFormat.DELIMITED
    print(emit_report(rows, fmt), end="")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .review_api import serve

    serve(args.run_dir, bind=args.bind, port=args.port)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "calibrate":
            return _cmd_calibrate(args)
        if args.command == "review":
            return _cmd_review(args)
        if args.command == "report":
            return _cmd_report(args)
        if args.command == "serve":
            return _cmd_serve(args)
    except (ConfigError, ModelError, StoreError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
