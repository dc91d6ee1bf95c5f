"""Acceptance criteria, one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
report.
"""

import json
import math
import random
from pathlib import Path

import pytest

from contexts import roundtrip_contexts
from vizact.compiler import classify_interaction, compile_document, explain_document, explain_rows, instantiate_technique
from vizact.fixtures import GOLDEN_FIXTURES, fixture_document, fixture_script, fixture_text
from vizact.interaction import (
    Camera,
    camera_pan,
    camera_zoom,
    distance_targets,
    evaluate_targets,
    eval_predicate,
    hit_test,
)
from vizact.model import Document, Predicate, parse_document
from vizact.registry import default_registry
from vizact.runtime import EventScript, dispatch_event, initial_state, run_script, visible_mark_keys
from vizact.scene import ChannelSet, VisualObject, build_scene_graph
from vizact.interaction import Event, default_camera

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def report(name: str) -> None:
    print(f"ACCEPTANCE {name}: PASS")


def load(name: str) -> Document:
    doc = parse_document(fixture_text(name))
    assert isinstance(doc, Document)
    return doc


# --- criterion: registry fidelity -------------------------------------------


def _term_string(term) -> str:
    if term.kind == "one_of":
        return "(" + "|".join("+".join(b) for b in term.branches) + ")"
    if term.kind == "optional":
        return f"[{term.component}]"
    if term.evaluator_kind:
        return f"{term.component}:{term.evaluator_kind}"
    return term.component


def test_registry_fidelity():
    reg = default_registry()
    fixture = json.loads((DATA / "signature_fixture.json").read_text(encoding="utf-8"))

    assert {a.id: list(a.user_intents) for a in reg.authoring_intents} == fixture["authoringIntents"]
    assert [u.id for u in reg.user_intents] == fixture["userIntents"]
    assert len(reg.user_intents) == 9 and len(reg.authoring_intents) == 4

    catalog = {t.id: t for t in reg.techniques if t.source == "catalog"}
    assert len(catalog) == 27
    assert set(catalog) == set(fixture["signatures"])
    for tid, expected in fixture["signatures"].items():
        sig = catalog[tid]
        assert list(sig.user_intents) == expected["intents"], tid
        assert sig.scope == expected["scope"], tid
        assert [_term_string(t) for t in sig.terms] == expected["terms"], tid
    report("registry-fidelity")


# --- criterion: round-trip taxonomy ------------------------------------------


def test_roundtrip_taxonomy():
    reg = default_registry()
    contexts = roundtrip_contexts()
    catalog = [t.id for t in reg.techniques if t.source == "catalog"]
    assert len(catalog) == 27
    failures = []
    for tid in catalog:
        doc, unit = contexts[tid]
        compiled = instantiate_technique(unit, doc, technique=tid)
        result = classify_interaction("u", compiled.graph, doc, target=unit.target)
        if result.technique != tid:
            failures.append((tid, result.technique))
    assert failures == [], failures
    report("round-trip-taxonomy (27/27)")


# --- criterion: case-study reproduction ---------------------------------------


def norm(cell: str) -> str:
    return " ".join(cell.lower().split())


DNM_TABLE = [
    ["Add Magnet", "enter", "add mark", "choose field", "dropdown menu",
     "none", "new magnet", "target data"],
    ["Move Magnet", "reconfigure", "reposition", "click + drag", "canvas",
     "magnet", "all dust particles", "component references, target evaluator"],
]

ONSET_TABLE = [
    ["Add Matrix", "enter", "add collection", "choose set", "set list",
     "none", "new matrix", "target data"],
    ["Move Matrix", "select", "point select", "click + drag", "canvas",
     "matrix", "all matrices", "predicate, target evaluator, evaluation scale"],
    ["Compare Matrices", "abstract", "move up a hierarchy", "drag end", "canvas",
     "matrix", "all matrices", "target data"],
    ["Change Operator", "derive", "change aggregator", "click", "canvas",
     "operator mark", "matrix", "state variable (logical operator), target data"],
]


def test_case_study_reproduction():
    for name, expected in (("dnm", DNM_TABLE), ("onset", ONSET_TABLE)):
        reports, diags = explain_document(load(name))
        assert not [d for d in diags if d.severity == "error"]
        got = [[norm(c) for c in row] for row in explain_rows(reports)]
        want = [[norm(c) for c in row] for row in expected]
        assert got == want, name
    report("case-study-reproduction (DnM 2/2 rows, OnSet 4/4 rows)")


# --- criterion: golden traces ---------------------------------------------------


def test_golden_traces():
    for name in GOLDEN_FIXTURES:
        golden = (GOLDEN / f"{name}.trace.jsonl").read_text(encoding="utf-8")
        first, _ = run_script(load(name), EventScript.from_dict(fixture_script(name)))
        second, _ = run_script(load(name), EventScript.from_dict(fixture_script(name)))
        assert first.to_jsonl() == second.to_jsonl(), name
        assert first.to_jsonl() == golden, name
    report(f"golden-traces ({len(GOLDEN_FIXTURES)} fixtures, byte-identical)")


def test_golden_svg():
    from vizact.runtime import render_svg

    doc = load("bars")
    compiled, _ = compile_document(doc)
    state = initial_state(doc, compiled)
    assert render_svg(state, "main") + "\n" == (GOLDEN / "bars_initial.svg").read_text(encoding="utf-8")
    dispatch_event(state, compiled, Event(tick=1, kind="click", x=70, y=200))
    assert render_svg(state, "main") + "\n" == (GOLDEN / "bars_selected.svg").read_text(encoding="utf-8")
    report("golden-svg (bars initial + selected)")


# --- criterion: predicate/evaluator suite ----------------------------------------


def test_predicate_evaluator_suite():
    graph = build_scene_graph(load("bars"))
    bars = [graph.get(c) for c in graph.get("bars").children]

    assert evaluate_targets(bars, Predicate("country", "eq", "USA")) == [True, False, False]
    assert evaluate_targets(bars, Predicate("country", "in", ["USA", "Canada", "Mexico"])) == [True, True, True]

    probe = VisualObject(id="p", kind="mark", decl_name="p", channels=ChannelSet(x=25))
    between = Predicate("@x", "between", [25, 50])
    assert eval_predicate(between, probe) is True
    probe.channels.x = 50
    assert eval_predicate(between, probe) is True
    probe.channels.x = 24.999
    assert eval_predicate(between, probe) is False
    probe.channels.x = 50.001
    assert eval_predicate(between, probe) is False

    targets = [VisualObject(id=f"t{i}", kind="mark", decl_name="t") for i in range(5)]
    assert distance_targets(graph, targets, "index", "t2") == [2, 1, 0, 1, 2]
    report("predicate-evaluator-suite")


# --- criterion: camera properties -------------------------------------------------


def test_camera_properties():
    rng = random.Random(20240817)
    for _ in range(1000):
        cam = Camera(focus_x=rng.uniform(-500, 500), focus_y=rng.uniform(-500, 500),
                     zoom=rng.uniform(0.5, 8), rotation=0.0,
                     viewport_w=rng.uniform(100, 800), viewport_h=rng.uniform(100, 800))
        start = cam
        ops = []
        for _ in range(rng.randint(1, 6)):
            if rng.random() < 0.5:
                dx, dy = rng.uniform(-200, 200), rng.uniform(-200, 200)
                ops.append(("pan", dx, dy))
                cam = camera_pan(cam, dx, dy)
            else:
                factor = rng.uniform(0.6, 1.6)
                ax, ay = rng.uniform(0, cam.viewport_w), rng.uniform(0, cam.viewport_h)
                before = cam.to_world(ax, ay)
                zoomed = camera_zoom(cam, factor, ax, ay)
                if zoomed.zoom == cam.zoom * factor:  # not clamped
                    after = zoomed.to_world(ax, ay)
                    assert math.isclose(after[0], before[0], abs_tol=1e-9 * max(1.0, abs(before[0])))
                    assert math.isclose(after[1], before[1], abs_tol=1e-9 * max(1.0, abs(before[1])))
                    ops.append(("zoom", factor, ax, ay))
                    cam = zoomed
                assert zoomed.zoom > 0
            if ops and ops[-1][0] == "pan":
                assert cam.zoom == (camera_pan(start, 0, 0).zoom if len(ops) == 0 else cam.zoom)
        # undo everything in reverse: must come back within 1e-9
        for op in reversed(ops):
            if op[0] == "pan":
                cam = camera_pan(cam, -op[1], -op[2])
            else:
                cam = camera_zoom(cam, 1 / op[1], op[2], op[3])
        assert math.isclose(cam.focus_x, start.focus_x, abs_tol=1e-9 * max(1.0, abs(start.focus_x)))
        assert math.isclose(cam.focus_y, start.focus_y, abs_tol=1e-9 * max(1.0, abs(start.focus_y)))
        assert math.isclose(cam.zoom, start.zoom, abs_tol=1e-9 * start.zoom)

    # select-family script: zero camera and data diffs
    trace, _ = run_script(load("bars"), EventScript.from_dict(fixture_script("bars")))
    assert all(e.camera == [] and e.data == [] for e in trace.entries)

    # camera-family script: zero channel and data diffs
    raw = json.loads(fixture_text("heatmap"))
    raw["interactions"] = [
        {"name": "zoom", "level": "technique", "technique": "geometric_zoom",
         "on": {"event": "wheel", "listener": "heat"}, "target": {"scene": "heat"}},
        {"name": "drag", "level": "technique", "technique": "pan",
         "on": {"event": "drag_move", "listener": "heat"}, "target": {"scene": "heat"}},
    ]
    doc = parse_document(json.dumps(raw))
    script = EventScript(name="cam", events=[
        Event(tick=1, kind="wheel", x=120, y=90, delta=-1),
        Event(tick=2, kind="drag_start", x=50, y=50),
        Event(tick=3, kind="drag_move", x=90, y=70, dx=40, dy=20),
        Event(tick=4, kind="wheel", x=200, y=150, delta=1),
    ])
    trace, _ = run_script(doc, script)
    assert all(e.channels == [] and e.data == [] for e in trace.entries)
    assert any(e.camera for e in trace.entries)
    report("camera-properties (1000 randomized sequences at 1e-9)")


# --- criterion: dynamic-queries path equivalence ------------------------------------


def _dq_pair(fixture: str, collection: str, field: str, domain):
    raw = json.loads(fixture_text(fixture))
    raw["scenes"][0].setdefault("controls", []).append(
        {"name": "q", "kind": "slider", "domain": list(domain)})
    raw["interactions"] = [{
        "name": "filter", "level": "technique", "technique": "dynamic_queries",
        "on": {"event": "ui_change", "listener": "q"},
        "target": {"collection": collection},
        "bindings": {"field": field, "op": "lte"},
    }]
    doc_eval = parse_document(json.dumps(raw))
    raw2 = json.loads(json.dumps(raw))
    raw2["interactions"][0]["bindings"]["path"] = "target_data"
    doc_data = parse_document(json.dumps(raw2))
    return doc_eval, doc_data


def test_dynamic_queries_path_equivalence():
    rng = random.Random(7)
    for fixture, collection, field, domain in (
            ("bars", "bars", "pop", (0, 400)),
            ("scatter", "dots", "value", (0, 30))):
        doc_eval, doc_data = _dq_pair(fixture, collection, field, domain)
        c1, d1 = compile_document(doc_eval)
        c2, d2 = compile_document(doc_data)
        assert not [d for d in d1 if d.severity == "error"]
        assert not [d for d in d2 if d.severity == "error"]
        s1 = initial_state(doc_eval, c1)
        s2 = initial_state(doc_data, c2)
        for tick in range(1, 51):
            value = rng.uniform(domain[0] - 5, domain[1] + 5)
            e = Event(tick=tick, kind="ui_change", control="q", value=value)
            dispatch_event(s1, c1, e)
            dispatch_event(s2, c2, e)
            assert visible_mark_keys(s1, collection) == visible_mark_keys(s2, collection), (fixture, tick)
    report("dynamic-queries-path-equivalence (bars + scatter, 50 events each)")


# --- criterion: hit-test oracle --------------------------------------------------


def _random_scene(rng: random.Random, n_objects: int) -> dict:
    objects = []
    for i in range(n_objects):
        shape = rng.choice(["rect", "circle", "line"])
        if shape == "rect":
            channels = {"x": rng.uniform(0, 160), "y": rng.uniform(0, 160),
                        "width": rng.uniform(5, 60), "height": rng.uniform(5, 60)}
        elif shape == "circle":
            channels = {"x": rng.uniform(10, 190), "y": rng.uniform(10, 190),
                        "radius": rng.uniform(3, 25)}
        else:
            channels = {"x": rng.uniform(0, 160), "y": rng.uniform(0, 160),
                        "width": rng.uniform(-50, 50), "height": rng.uniform(-50, 50)}
        objects.append({"name": f"o{i}", "kind": "mark", "markShape": shape,
                        "channels": {k: round(v, 3) for k, v in channels.items()}})
    return {"name": "rand", "data": [], "scales": [],
            "scenes": [{"name": "s", "width": 200, "height": 200, "objects": objects}],
            "interactions": []}


def _oracle_hit(graph, x: float, y: float):
    """Independent containment scan: document order, last containing wins."""
    best = None
    for obj in graph.walk():
        if obj.kind != "mark":
            continue
        ch = obj.channels
        if obj.mark_shape == "rect":
            inside = ch.x <= x <= ch.x + ch.width and ch.y <= y <= ch.y + ch.height
        elif obj.mark_shape == "circle":
            inside = (x - ch.x) ** 2 + (y - ch.y) ** 2 <= ch.radius ** 2
        else:  # line: distance to the segment, 3 px tolerance
            x0, y0, x1, y1 = ch.x, ch.y, ch.x + ch.width, ch.y + ch.height
            vx, vy = x1 - x0, y1 - y0
            l2 = vx * vx + vy * vy
            t = 0.0 if l2 == 0 else max(0.0, min(1.0, ((x - x0) * vx + (y - y0) * vy) / l2))
            inside = math.hypot(x - (x0 + t * vx), y - (y0 + t * vy)) <= 3.0
        if inside:
            best = obj.id
    return best


def test_hit_test_oracle():
    rng = random.Random(99)
    probes = 0
    for _ in range(20):
        raw = _random_scene(rng, rng.randint(3, 12))
        doc = parse_document(json.dumps(raw))
        assert isinstance(doc, Document)
        graph = build_scene_graph(doc)
        cam = default_camera(200, 200)
        for _ in range(50):
            x, y = rng.uniform(0, 200), rng.uniform(0, 200)
            got = hit_test(graph, cam, x, y)
            expected = _oracle_hit(graph, x, y)
            assert (got.object_id if got else None) == expected, (x, y)
            probes += 1
    assert probes == 1000
    report("hit-test-oracle (1000 probes, 20 scenes)")


# --- criterion: parser robustness ---------------------------------------------------


def _mutate(rng: random.Random, text: str) -> str:
    kind = rng.randrange(6)
    if not text:
        return text
    i = rng.randrange(len(text))
    if kind == 0:
        return text[:i] + text[i + 1:]
    if kind == 1:
        return text[:i] + chr(rng.randrange(32, 127)) + text[i:]
    if kind == 2:
        return text[:i] + chr(rng.randrange(32, 127)) + text[i + 1:]
    if kind == 3:
        return text[:i]
    if kind == 4:
        j = rng.randrange(len(text))
        lo, hi = min(i, j), max(i, j)
        return text[:lo] + text[hi:]
    return text[i:] + text[:i]


def test_parser_robustness():
    rng = random.Random(1234)
    seeds = [fixture_text(n) for n in ("bars", "scatter", "dashboard", "onset")]
    seeds.append('{"name":"x"}')
    count = 0
    for _ in range(10000):
        base = rng.choice(seeds)
        mutant = base
        for _ in range(rng.randint(1, 4)):
            mutant = _mutate(rng, mutant)
        result = parse_document(mutant)
        assert isinstance(result, (Document, list))
        if isinstance(result, list):
            assert result, "failure must carry at least one diagnostic"
            assert all(d.severity == "error" for d in result)
        else:
            from vizact.model import validate_document

            assert isinstance(validate_document(result), list)
        count += 1
    assert count == 10000
    report("parser-robustness (10000 mutated inputs, zero crashes)")
