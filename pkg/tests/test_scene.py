"""Scene graph: expansion, scales, encodings, data updates, queries."""

import json

import pytest

from vizact.fixtures import fixture_text
from vizact.model import Document, OpError, parse_document
from vizact.scene import (
    Scale,
    apply_encodings,
    build_scene_graph,
    query_objects,
    update_object_data,
)


def load(name: str) -> Document:
    doc = parse_document(fixture_text(name))
    assert isinstance(doc, Document)
    return doc


def load_raw(raw: dict) -> Document:
    doc = parse_document(json.dumps(raw))
    assert isinstance(doc, Document), doc
    return doc


def test_expansion_cardinality():
    graph = build_scene_graph(load("bars"))
    assert graph.get("bars").children == ["bars/USA", "bars/Canada", "bars/Mexico"]


def test_empty_table_keeps_collection():
    raw = json.loads(fixture_text("bars"))
    raw["data"][0]["rows"] = []
    graph = build_scene_graph(load_raw(raw))
    assert graph.get("bars").children == []


def test_expansion_determinism():
    from vizact.runtime import initial_state, render_svg

    doc1, doc2 = load("bars"), load("bars")
    g1, g2 = build_scene_graph(doc1), build_scene_graph(doc2)
    assert [o.id for o in g1.walk()] == [o.id for o in g2.walk()]
    s1 = render_svg(initial_state(doc1, []), "main")
    s2 = render_svg(initial_state(doc2, []), "main")
    assert s1 == s2


NESTED = {
    "name": "smallmult",
    "data": [
        {"name": "years", "key": "year",
         "fields": [{"name": "year", "kind": "number"}],
         "rows": [{"year": 2000}, {"year": 2010}]},
        {"name": "pops", "key": "pid",
         "fields": [{"name": "pid", "kind": "string"}, {"name": "year", "kind": "number"},
                    {"name": "country", "kind": "string"}, {"name": "pop", "kind": "number"}],
         "rows": [
             {"pid": "a", "year": 2000, "country": "USA", "pop": 280},
             {"pid": "b", "year": 2000, "country": "Canada", "pop": 31},
             {"pid": "c", "year": 2010, "country": "USA", "pop": 310},
             {"pid": "d", "year": 2010, "country": "Canada", "pop": 34},
             {"pid": "e", "year": 2010, "country": "Mexico", "pop": 114},
         ]},
    ],
    "scales": [
        {"id": "yx", "kind": "band", "domain": {"table": "years", "field": "year"}, "range": [0, 400]},
        {"id": "h", "kind": "linear", "domain": [0, 400], "range": [0, 100]},
    ],
    "scenes": [{"name": "grid", "width": 400, "height": 300, "objects": [
        {"name": "panels", "kind": "collection", "sourceTable": "years",
         "template": {"name": "percountry", "kind": "collection", "sourceTable": "pops",
                      "template": {"name": "cell", "kind": "mark", "markShape": "rect",
                                   "channels": {"width": 20}}}},
    ], "encodings": [
        {"id": "n_x", "target": "panels", "field": "year", "channel": "x", "scale": "yx"},
        {"id": "n_h", "target": "percountry", "field": "pop", "channel": "height", "scale": "h"},
    ]}],
    "interactions": [],
}


def test_nested_collection_group_by_oracle():
    doc = load_raw(NESTED)
    graph = build_scene_graph(doc)
    # oracle: group sizes computed straight off the rows
    rows = doc.table("pops").rows
    for year in (2000, 2010):
        expected = [r["pid"] for r in rows if r["year"] == year]
        panel = graph.get(f"panels/{year}")
        assert [graph.get(c).row_key for c in panel.children] == expected
    assert len(graph.get("panels").children) == 2


def test_band_scale_arithmetic():
    s = Scale(id="x", kind="band", domain=["A", "B", "C", "D"], range=[0, 400])
    # oracle: step = span/n, offset = step*padding/2
    assert s.bandwidth == 100
    assert s("B") == 100
    assert s("A") == 0
    padded = Scale(id="x", kind="band", domain=["A", "B"], range=[0, 100], band_padding=0.5)
    assert padded("A") == 12.5 and padded.bandwidth == 25


def test_linear_scale_midpoint():
    s = Scale(id="y", kind="linear", domain=[0, 100], range=[0, 200])
    assert s(50) == 100
    assert s.invert(100) == 50


def test_linear_scale_rejects_non_numeric():
    s = Scale(id="y", kind="linear", domain=[0, 100], range=[0, 200])
    with pytest.raises(OpError) as err:
        s("ten")
    assert err.value.code == "E022_NON_NUMERIC"


def test_ordinal_scale_outside_domain():
    s = Scale(id="c", kind="ordinal", domain=["a", "b"], range=["#111", "#222"])
    assert s("b") == "#222"
    with pytest.raises(OpError) as err:
        s("zz")
    assert err.value.code == "E021_OUTSIDE_ORDINAL_DOMAIN"


def test_date_scale_roundtrip():
    s = Scale(id="t", kind="linear", domain=["2020-03-01", "2020-09-01"], range=[0, 184])
    assert s("2020-03-01") == 0
    assert s("2020-09-01") == 184
    assert s.invert(0) == "2020-03-01"


def test_apply_encodings_idempotent():
    graph = build_scene_graph(load("bars"))
    assert apply_encodings(graph) == []
    assert apply_encodings(graph) == []


def test_encoding_unknown_field():
    raw = json.loads(fixture_text("bars"))
    raw["scenes"][0]["encodings"][0]["field"] = "nope"
    doc = parse_document(json.dumps(raw))
    assert isinstance(doc, list) or True
    # structurally invalid already; build from a hand-tweaked valid doc instead
    doc = load("bars")
    doc.scenes[0].encodings[0].field = "nope"
    with pytest.raises(OpError) as err:
        build_scene_graph(doc)
    assert err.value.code == "E020_UNKNOWN_FIELD"


def test_update_filter_rows():
    graph = build_scene_graph(load("bars"))
    rows = graph.doc.table("countries").rows
    structural, diffs = update_object_data(graph, "bars", [r for r in rows if r["pop"] > 100])
    assert structural.removed == ["bars/Canada"] and structural.added == []
    assert len(graph.get("bars").children) == 2


def test_update_append_row():
    # the click-to-add case: a new row lands at its encoded position
    graph = build_scene_graph(load("scatter"))
    rows = list(graph.doc.table("stations").rows) + [{"name": "new", "x": 50, "y": 50, "value": 1}]
    structural, diffs = update_object_data(graph, "dots", rows)
    assert structural.added == ["dots/new"] and structural.removed == []
    assert len(graph.get("dots").children) == 5
    added = graph.get("dots/new")
    assert added.channels.x == graph.scales["sx"](50)
    assert added.channels.y == graph.scales["sy"](50)


def test_update_replace_values_only():
    graph = build_scene_graph(load("bigmac"))
    rows = [dict(r) for r in graph.doc.table("burgernomics").rows]
    base = next(r["price"] for r in rows if r["currency"] == "CHF")
    # oracle: recompute the index column by hand against the CHF baseline
    for r in rows:
        r["index"] = r["price"] / base * 100.0
    structural, diffs = update_object_data(graph, "lollis", rows)
    assert structural.added == [] and structural.removed == []
    heights = [d for d in diffs if d[1] == "height"]
    assert len(heights) == len(rows)
    for oid, _chan, _old, new in heights:
        key = oid.split("/")[1]
        expected = next(r["index"] for r in rows if r["currency"] == key)
        assert new == pytest.approx(expected)  # ih scale is identity over [0,200]


def test_update_conservation():
    graph = build_scene_graph(load("bars"))
    rows = graph.doc.table("countries").rows
    structural, _ = update_object_data(graph, "bars", rows[:1])
    assert set(structural.added).isdisjoint(structural.removed)
    assert len(graph.get("bars").children) == 1


def test_update_schema_mismatch():
    graph = build_scene_graph(load("bars"))
    with pytest.raises(OpError) as err:
        update_object_data(graph, "bars", [{"country": "X"}])
    assert err.value.code == "E023_SCHEMA_MISMATCH"


def test_query_by_kind_and_membership():
    graph = build_scene_graph(load("bars"))
    marks = query_objects(graph, {"kind": "mark"})
    assert marks == ["bars/USA", "bars/Canada", "bars/Mexico"]
    assert query_objects(graph, {"collection": "bars"}) == marks
    assert query_objects(graph, "bars") == ["bars"]


def test_query_empty_document():
    doc = load_raw({"name": "e", "data": [], "scales": [], "scenes": [], "interactions": []})
    graph = build_scene_graph(doc)
    assert query_objects(graph, {"kind": "mark"}) == []


def test_query_unresolved_name():
    graph = build_scene_graph(load("bars"))
    with pytest.raises(OpError) as err:
        query_objects(graph, "missing")
    assert err.value.code == "E001_UNRESOLVED_NAME"
