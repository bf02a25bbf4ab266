"""Command-line client: interactive REPL, DDD validation, conformance, server."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .ddd import SchemaError, XmlSyntaxError, parse_ddd_path, validate
from .engine import InvalidDomain
from .kb import FixtureFormatError
from .service import DEFAULT_DDD, DEFAULT_FIXTURE, SessionStore, data_dir
from .scripts import ScriptFormatError, load_script, run_script


def _cmd_repl(args: argparse.Namespace) -> int:
    store = SessionStore()
    try:
        session = store.create_session(args.ddd, args.fixture)
    except (InvalidDomain, SchemaError, XmlSyntaxError, FixtureFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"S: {session.greeting}")
    print("(/state shows the information state, /quit exits)")
    while True:
        try:
            line = input("U: ")
        except (EOFError, KeyboardInterrupt):
            print()
            return 0
        line = line.strip()
        if not line:
            continue
        if line == "/quit":
            return 0
        if line == "/state":
            print(json.dumps(store.summary(session.id), indent=2, ensure_ascii=False))
            continue
        try:
            system_text, _ = store.post_utterance(session.id, line)
        except Exception as exc:  # diagnostics, never a crash
            print(f"error: {exc}", file=sys.stderr)
            continue
        print(f"S: {system_text}")
        if store.get(session.id).state.ended:
            return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        domain = parse_ddd_path(args.ddd)
    except (XmlSyntaxError, SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}")
        return 1
    diagnostics = validate(domain)
    for diagnostic in diagnostics:
        print(str(diagnostic))
    if diagnostics:
        return 1
    print(f"{args.ddd}: OK ({len(domain.goals)} goals, {len(domain.parameters)} parameters)")
    return 0


def _cmd_conformance(args: argparse.Namespace) -> int:
    scripts_dir = Path(args.scripts) if args.scripts else data_dir() / "scripts"
    paths = sorted(scripts_dir.glob("*.script"))
    if not paths:
        print(f"error: no *.script files in {scripts_dir}", file=sys.stderr)
        return 1
    all_passed = True
    for path in paths:
        try:
            report = run_script(load_script(path), args.ddd)
        except (ScriptFormatError, FixtureFormatError, FileNotFoundError) as exc:
            print(f"error in {path.name}: {exc}", file=sys.stderr)
            all_passed = False
            continue
        print(report.render())
        all_passed = all_passed and report.passed
    return 0 if all_passed else 1


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(default_ddd=args.ddd, default_fixture=args.fixture)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="negotia-dm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    repl = sub.add_parser("repl", help="interactive dialogue in the terminal")
    repl.add_argument("--ddd", default=DEFAULT_DDD, help="DDD XML file or packaged name")
    repl.add_argument("--fixture", default=DEFAULT_FIXTURE, help="fixture file or packaged name")
    repl.set_defaults(func=_cmd_repl)

    val = sub.add_parser("validate", help="parse and validate a DDD file")
    val.add_argument("--ddd", required=True)
    val.set_defaults(func=_cmd_validate)

    conf = sub.add_parser("conformance", help="replay transcript scripts and diff the output")
    conf.add_argument("--scripts", default=None, help="directory of *.script files (default: packaged)")
    conf.add_argument("--ddd", default=DEFAULT_DDD)
    conf.set_defaults(func=_cmd_conformance)

    serve = sub.add_parser("serve", help="run the HTTP chat API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--ddd", default=DEFAULT_DDD)
    serve.add_argument("--fixture", default=DEFAULT_FIXTURE)
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
