"""Command line entry points: the session server, offline trace analysis,
and the scripted demo fixture writer."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import (
    duration_csv,
    frequency_csv,
    load_corpus,
    load_trace,
    progress_csv,
    retention_csv,
)
from .llm import build_backend, load_provider_profile


def _write_out(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import SessionService, build_app

    profile = load_provider_profile(args.provider_profile) if args.provider_profile else None
    backend = build_backend(args.replay, args.record, profile)
    service = SessionService(args.data_dir, backend=backend)
    uvicorn.run(build_app(service), host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_fixtures(args) -> int:
    from .scenarios import record_fixtures

    manifest = record_fixtures(args.out)
    print(manifest)
    return 0


def _cmd_analyze(args) -> int:
    if args.report == "freq":
        corpus = load_corpus(args.corpus)
        _write_out(frequency_csv(corpus, args.kind, args.threshold), args.out)
    elif args.report == "progress":
        import json

        events = []
        with open(args.log, encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    events.append(json.loads(line))
        _write_out(progress_csv(events), args.out)
    elif args.report == "retention":
        trace = load_trace(args.session)
        _write_out(retention_csv(trace.events, trace.model), args.out)
    else:
        corpus = load_corpus(args.corpus)
        _write_out(duration_csv(corpus, args.sample), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="draftsmith",
        description="Specification drafting workbench: session server and trace analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the session HTTP service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--data-dir", default="./sessions")
    serve.add_argument("--replay", default=None, metavar="MANIFEST",
                       help="serve completions from this replay manifest")
    serve.add_argument("--record", action="store_true",
                       help="record live completions into the replay manifest")
    serve.add_argument("--provider-profile", default=None, metavar="FILE",
                       help="JSON provider profile; the credential itself "
                            "always comes from the environment")
    serve.set_defaults(fn=_cmd_serve)

    fixtures = sub.add_parser("fixtures", help="write the scripted demo replay fixtures")
    fixtures.add_argument("--out", required=True, metavar="DIR")
    fixtures.set_defaults(fn=_cmd_fixtures)

    analyze = sub.add_parser("analyze", help="compute CSV reports over session traces")
    reports = analyze.add_subparsers(dest="report", required=True)

    freq = reports.add_parser("freq", help="per-name occurrence fractions per group")
    freq.add_argument("--corpus", required=True)
    freq.add_argument("--kind", choices=("objects", "fields"), default="objects")
    freq.add_argument("--threshold", type=float, default=0.5)
    freq.add_argument("--out", default="-")
    freq.set_defaults(fn=_cmd_analyze)

    progress = reports.add_parser("progress", help="component count over time for one log")
    progress.add_argument("--log", required=True)
    progress.add_argument("--out", default="-")
    progress.set_defaults(fn=_cmd_analyze)

    retention = reports.add_parser("retention", help="synthesized component retention")
    retention.add_argument("--session", required=True,
                           help="session directory holding model.json and events.jsonl")
    retention.add_argument("--out", default="-")
    retention.set_defaults(fn=_cmd_analyze)

    duration = reports.add_parser("duration", help="session durations per group")
    duration.add_argument("--corpus", required=True)
    duration.add_argument("--sample", action="store_true",
                          help="sample standard deviation instead of population")
    duration.add_argument("--out", default="-")
    duration.set_defaults(fn=_cmd_analyze)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
