"""Serve protocol: session semantics plus a live WebSocket smoke test."""

import asyncio
import json
import socket
import threading

import pytest

from vizact.fixtures import fixture_document, fixture_script
from vizact.server import Session


def msgs(replies):
    return [r["op"] for r in replies]


def test_load_then_event_then_inspect():
    session = Session()
    replies = session.handle(json.dumps({"op": "load", "doc": fixture_document("bars")}))
    assert msgs(replies) == ["scene"]
    assert replies[0]["svg"].startswith("<svg")

    event = {"tick": 1, "kind": "click", "x": 70, "y": 200}
    replies = session.handle(json.dumps({"op": "event", "event": event}))
    assert msgs(replies) == ["trace", "scene"]
    entry = replies[0]["entry"]
    assert entry["hit"] == "bars/USA"

    replies = session.handle(json.dumps({"op": "inspect", "unit": "highlight"}))
    assert msgs(replies) == ["report"]
    report = replies[0]["report"]
    assert report["technique"] == "point_select"
    assert report["variables"]["sel"]["operand"] == "USA"
    labels = [t["term"] for t in report["signature"]]
    assert labels == ["hit_object | predicate", "evaluator", "evaluation_scale"]
    assert all(t["satisfied"] for t in report["signature"])


def test_load_bad_document_reports_diagnostics():
    session = Session()
    replies = session.handle(json.dumps({"op": "load", "doc": {"name": "x", "banana": 1}}))
    assert msgs(replies) == ["diagnostics"]
    codes = [d["code"] for d in replies[0]["diagnostics"]]
    assert "E002_UNKNOWN_KEY" in codes


def test_event_before_load():
    session = Session()
    replies = session.handle(json.dumps({"op": "event", "event": {"tick": 1, "kind": "click"}}))
    assert msgs(replies) == ["diagnostics"]


def test_inspect_unknown_unit():
    session = Session()
    session.handle(json.dumps({"op": "load", "doc": fixture_document("bars")}))
    replies = session.handle(json.dumps({"op": "inspect", "unit": "ghost"}))
    assert msgs(replies) == ["diagnostics"]


def test_unknown_op():
    session = Session()
    replies = session.handle(json.dumps({"op": "fly"}))
    assert msgs(replies) == ["diagnostics"]


def test_session_trace_matches_headless_run():
    from vizact.model import parse_document
    from vizact.runtime import EventScript, run_script

    session = Session()
    session.handle(json.dumps({"op": "load", "doc": fixture_document("bars")}))
    script = fixture_script("bars")
    live_entries = []
    for event in script["events"]:
        replies = session.handle(json.dumps({"op": "event", "event": event}))
        live_entries.append(replies[0]["entry"])

    doc = parse_document(json.dumps(fixture_document("bars")))
    trace, _ = run_script(doc, EventScript.from_dict(script))
    headless = [json.loads(e.to_json()) for e in trace.entries]
    assert live_entries == headless


def test_websocket_end_to_end():
    websockets = pytest.importorskip("websockets")
    from websockets.asyncio.client import connect
    from vizact.server import _serve

    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]

    async def scenario():
        loop = asyncio.get_running_loop()
        ready = loop.create_future()
        server_task = asyncio.create_task(_serve("127.0.0.1", port, ready))
        await ready
        try:
            async with connect(f"ws://127.0.0.1:{port}") as ws:
                await ws.send(json.dumps({"op": "load", "doc": fixture_document("bars")}))
                scene = json.loads(await ws.recv())
                assert scene["op"] == "scene"
                await ws.send(json.dumps({"op": "event",
                                          "event": {"tick": 1, "kind": "click", "x": 70, "y": 200}}))
                trace = json.loads(await ws.recv())
                scene2 = json.loads(await ws.recv())
                assert trace["op"] == "trace" and trace["entry"]["hit"] == "bars/USA"
                assert scene2["op"] == "scene" and 'stroke="#000"' in scene2["svg"]
        finally:
            server_task.cancel()

    asyncio.run(scenario())
