"""Command-line surface: validate, compile, explain, run, render, init and
serve. All file outputs are byte-deterministic."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import fixtures
from .compiler import compile_document, explain_document, explain_json, explain_markdown
from .model import Document, parse_document, validate_document
from .runtime import CompileFailure, EventScript, dispatch_event, initial_state, render_svg, run_script

EXIT_OK = 0
EXIT_COMPILE = 1
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3

_PAYLOADS = {
    "validate": "diagnostics", "compile": "report", "explain": "report",
    "run": "trace", "render": "svg", "init": "diagnostics", "serve": "protocol",
}


@dataclass(frozen=True)
class CommandOutcome:
    """Exit code plus what kind of payload went to stdout; the code is 0
    iff no error-severity diagnostics were produced."""

    exit_code: int
    payload_kind: str


def _read(path: str) -> str:
    p = Path(path)
    if not p.exists():
        print(f"file not found: {path}", file=sys.stderr)
        raise SystemExit(EXIT_NOT_FOUND)
    return p.read_text(encoding="utf-8")


def _load_document(path: str) -> Document | None:
    parsed = parse_document(_read(path), base=Path(path).parent)
    if isinstance(parsed, list):
        for d in parsed:
            print(d.to_json())
        return None
    return parsed


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    doc = _load_document(args.path)
    if doc is None:
        return EXIT_COMPILE
    diags = validate_document(doc)
    for d in diags:
        print(d.to_json())
    return EXIT_COMPILE if any(d.severity == "error" for d in diags) else EXIT_OK


def cmd_compile(args) -> int:
    doc = _load_document(args.path)
    if doc is None:
        return EXIT_COMPILE
    compiled, diags = compile_document(doc)
    for d in diags:
        print(d.to_json(), file=sys.stderr)
    payload = json.dumps([c.to_dict() for c in compiled], indent=2) + "\n"
    _emit(payload, args.out)
    return EXIT_COMPILE if any(d.severity == "error" for d in diags) else EXIT_OK


def cmd_explain(args) -> int:
    doc = _load_document(args.path)
    if doc is None:
        return EXIT_COMPILE
    reports, diags = explain_document(doc)
    for d in diags:
        print(d.to_json(), file=sys.stderr)
    if args.format == "md":
        _emit(explain_markdown(reports), args.out)
    else:
        _emit(json.dumps(explain_json(reports), indent=2) + "\n", args.out)
    return EXIT_COMPILE if any(d.severity == "error" for d in diags) else EXIT_OK


def cmd_run(args) -> int:
    doc = _load_document(args.path)
    if doc is None:
        return EXIT_COMPILE
    script = EventScript.from_dict(json.loads(_read(args.script)))
    try:
        trace, _ = run_script(doc, script)
    except CompileFailure as exc:
        for d in exc.diagnostics:
            print(d.to_json(), file=sys.stderr)
        return EXIT_COMPILE
    _emit(trace.to_jsonl(), args.out)
    return EXIT_OK


def cmd_render(args) -> int:
    doc = _load_document(args.path)
    if doc is None:
        return EXIT_COMPILE
    compiled, diags = compile_document(doc)
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        for d in errors:
            print(d.to_json(), file=sys.stderr)
        return EXIT_COMPILE
    state = initial_state(doc, compiled)
    if args.script:
        script = EventScript.from_dict(json.loads(_read(args.script)))
        for e in script.events:
            if args.tick is not None and e.tick > args.tick:
                break
            dispatch_event(state, compiled, e)
    scene = args.scene or (doc.scenes[0].name if doc.scenes else None)
    if scene is None:
        print("document has no scenes", file=sys.stderr)
        return EXIT_COMPILE
    _emit(render_svg(state, scene) + "\n", args.out)
    return EXIT_OK


def cmd_init(args) -> int:
    name = args.example
    if name not in fixtures.FIXTURES:
        print(f"unknown example {name!r}; available: {', '.join(sorted(fixtures.FIXTURES))}",
              file=sys.stderr)
        return EXIT_USAGE
    outdir = Path(args.dir or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    doc_path = outdir / f"{name}.json"
    script_path = outdir / f"{name}.script.json"
    doc_path.write_text(fixtures.fixture_text(name), encoding="utf-8")
    script_path.write_text(fixtures.script_text(name), encoding="utf-8")
    print(f"wrote {doc_path} and {script_path}")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import serve_forever

    serve_forever(host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vizact",
                                     description="interaction grammar compiler and headless runtime")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="structural diagnostics for a document")
    p.add_argument("path")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("compile", help="compile interaction units to component graphs")
    p.add_argument("path")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("explain", help="classify units and print the analysis table")
    p.add_argument("path")
    p.add_argument("--format", choices=("json", "md"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_explain)

    p = sub.add_parser("run", help="replay a script and emit the trace")
    p.add_argument("path")
    p.add_argument("script")
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("render", help="SVG snapshot of a scene")
    p.add_argument("path")
    p.add_argument("--script", default=None)
    p.add_argument("--tick", type=int, default=None)
    p.add_argument("--scene", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("init", help="write a fixture document and script pair")
    p.add_argument("example")
    p.add_argument("--dir", default=None)
    p.set_defaults(fn=cmd_init)

    p = sub.add_parser("serve", help="start the playground protocol endpoint")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.set_defaults(fn=cmd_serve)

    return parser


def run_command(argv: list[str]) -> CommandOutcome:
    parser = build_parser()
    args = parser.parse_args(argv)
    return CommandOutcome(exit_code=args.fn(args), payload_kind=_PAYLOADS[args.command])


def main() -> None:
    raise SystemExit(run_command(sys.argv[1:]).exit_code)


if __name__ == "__main__":
    main()
