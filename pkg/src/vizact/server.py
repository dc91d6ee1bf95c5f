"""Playground protocol endpoint: JSON messages over a WebSocket.

client -> server: {"op": "load", "doc": <document or spec text>}
                  {"op": "event", "event": <event record>}
                  {"op": "inspect", "unit": <name>}
server -> client: {"op": "scene", "svg": ...}
                  {"op": "trace", "entry": ...}
                  {"op": "report", "report": ...}
                  {"op": "diagnostics", "diagnostics": [...]}

One session per connection; messages are handled strictly in arrival order.
"""

from __future__ import annotations

import asyncio
import json

from .compiler import classify_compiled, compile_document, check_signature
from .graph import graph_to_dict
from .model import Document, parse_document, validate_document
from .registry import default_registry
from .runtime import RuntimeState, dispatch_event, initial_state, render_svg
from .interaction import Event
from .scene import _fmt


class Session:
    """Protocol state for one connection."""

    def __init__(self):
        self.doc: Document | None = None
        self.compiled = []
        self.state: RuntimeState | None = None
        self.last_entry: dict | None = None

    def handle(self, message: str) -> list[dict]:
        try:
            raw = json.loads(message)
        except json.JSONDecodeError as exc:
            return [_diag_msg([("error", "E000_MALFORMED", "/", f"bad message: {exc}")])]
        op = raw.get("op")
        if op == "load":
            return self._load(raw.get("doc"))
        if op == "event":
            return self._event(raw.get("event"))
        if op == "inspect":
            return self._inspect(raw.get("unit"))
        return [_diag_msg([("error", "E002_UNKNOWN_KEY", "/op", f"unknown op {op!r}")])]

    def _load(self, doc_raw) -> list[dict]:
        text = doc_raw if isinstance(doc_raw, str) else json.dumps(doc_raw)
        parsed = parse_document(text)
        if isinstance(parsed, list):
            return [_diag_msg([(d.severity, d.code, d.path, d.message) for d in parsed])]
        diags = validate_document(parsed)
        errors = [d for d in diags if d.severity == "error"]
        if errors:
            return [_diag_msg([(d.severity, d.code, d.path, d.message) for d in errors])]
        compiled, cdiags = compile_document(parsed)
        cerrors = [d for d in cdiags if d.severity == "error"]
        if cerrors:
            return [_diag_msg([(d.severity, d.code, d.path, d.message) for d in cerrors])]
        self.doc = parsed
        self.compiled = compiled
        self.state = initial_state(parsed, compiled)
        self.last_entry = None
        return [{"op": "scene", "svg": self._svg()}]

    def _event(self, event_raw) -> list[dict]:
        if self.state is None:
            return [_diag_msg([("error", "E001_UNRESOLVED_NAME", "/", "no document loaded")])]
        try:
            event = Event.from_dict(event_raw)
            entry = dispatch_event(self.state, self.compiled, event)
        except Exception as exc:  # protocol surface: report, do not drop the session
            return [_diag_msg([("error", "E000_MALFORMED", "/event", str(exc))])]
        entry_dict = json.loads(entry.to_json())
        self.last_entry = entry_dict
        return [{"op": "trace", "entry": entry_dict},
                {"op": "scene", "svg": self._svg()}]

    def _inspect(self, unit_name) -> list[dict]:
        if self.doc is None:
            return [_diag_msg([("error", "E001_UNRESOLVED_NAME", "/", "no document loaded")])]
        unit = next((c for c in self.compiled if c.unit_name == unit_name), None)
        if unit is None:
            return [_diag_msg([("error", "E001_UNRESOLVED_NAME", "/unit",
                                f"unknown unit {unit_name!r}")])]
        registry = default_registry()
        report = classify_compiled(unit, self.doc, registry)
        sig = registry.signature_of(unit.technique) if unit.technique != "unclassified" else None
        sig_report = (check_signature(unit.graph, unit.technique, self.doc, unit.target, registry)
                      if sig is not None else None)
        terms = []
        if sig is not None:
            for term in sig.terms:
                if term.kind == "one_of":
                    label = " | ".join("+".join(b) for b in term.branches)
                elif term.evaluator_kind:
                    label = f"{term.component}:{term.evaluator_kind}"
                else:
                    label = term.component
                satisfied = sig_report is None or label not in sig_report.missing
                terms.append({"term": label, "kind": term.kind, "satisfied": satisfied})
        variables = {}
        if self.state is not None:
            for v in unit.graph.state_variables:
                live = self.state.variables.get(v.name, v)
                variables[v.name] = live.snapshot()
        return [{"op": "report", "report": {
            "unit": unit.unit_name,
            "technique": unit.technique,
            "userIntents": list(unit.user_intents),
            "authoringIntents": list(unit.authoring_intents),
            "provenance": unit.provenance,
            "classification": report.to_dict(),
            "signature": terms,
            "variables": variables,
            "graph": graph_to_dict(unit.graph),
            "lastEntry": self.last_entry,
        }}]

    def _svg(self) -> str:
        """One composite document embedding every scene at its canvas slot."""
        assert self.state is not None and self.doc is not None
        width = max((s.x + s.width for s in self.doc.scenes), default=400)
        height = max((s.y + s.height for s in self.doc.scenes), default=300)
        parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
                 f'height="{_fmt(height)}" viewBox="0.000 0.000 {_fmt(width)} {_fmt(height)}">']
        for s in self.doc.scenes:
            obj = self.state.graph.get(s.name)
            hidden = ' display="none"' if not obj.visible else ""
            inner = render_svg(self.state, s.name)
            inner = inner.replace("<svg ", f'<svg x="{_fmt(s.x)}" y="{_fmt(s.y)}" ', 1)
            parts.append(f'<g id="slot:{s.name}"{hidden}>{inner}</g>')
        parts.append("</svg>")
        return "".join(parts)


def _diag_msg(items) -> dict:
    return {"op": "diagnostics",
            "diagnostics": [{"severity": s, "code": c, "path": p, "message": m}
                            for s, c, p, m in items]}


async def _serve(host: str, port: int, ready=None, announce: bool = False):
    from websockets.asyncio.server import serve

    async def handler(ws):
        session = Session()
        async for message in ws:
            for reply in session.handle(message):
                await ws.send(json.dumps(reply))

    async with serve(handler, host, port) as server:
        if announce:  # printed only once the socket is bound
            print(f"vizact serve listening on ws://{host}:{port}", flush=True)
        if ready is not None:
            ready.set_result(True)
        await server.serve_forever()


def serve_forever(host: str = "127.0.0.1", port: int = 8765) -> None:
    asyncio.run(_serve(host, port, announce=True))
