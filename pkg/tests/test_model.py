"""Parser front end: parse, validate, serialize, diagnostics."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vizact.model import (
    Document,
    Predicate,
    parse_document,
    predicate_matches,
    serialize_document,
    validate_document,
)

MINIMAL = '{"name":"empty","data":[],"scales":[],"scenes":[],"interactions":[]}'


def parse_ok(text, base=None) -> Document:
    doc = parse_document(text, base=base)
    assert isinstance(doc, Document), doc
    return doc


def test_parse_empty_document():
    doc = parse_ok(MINIMAL)
    assert doc.name == "empty"
    assert doc.data == [] and doc.scales == [] and doc.scenes == [] and doc.interactions == []


def test_parse_bar_collection_structure():
    from vizact.model import DataTable, EncodingDecl, ObjectDecl, ScaleDef, SceneSpec

    doc = parse_ok(json.dumps({
        "name": "t",
        "data": [{"name": "countries",
                  "fields": [{"name": "country", "kind": "string"}, {"name": "pop", "kind": "number"}],
                  "rows": [{"country": "USA", "pop": 330}]}],
        "scales": [{"id": "h", "kind": "linear", "domain": [0, 400], "range": [0, 240]}],
        "scenes": [{"name": "main", "objects": [
            {"name": "bars", "kind": "collection", "sourceTable": "countries",
             "template": {"kind": "mark", "markShape": "rect"}}],
            "encodings": [{"id": "e1", "target": "bars", "field": "pop",
                           "channel": "height", "scale": "h"}]}],
        "interactions": [],
    }))
    # hand-constructed expected tree, defaults filled
    expected = Document(
        name="t",
        data=[DataTable(name="countries",
                        fields=[("country", "string"), ("pop", "number")],
                        rows=[{"country": "USA", "pop": 330}])],
        scales=[ScaleDef(id="h", kind="linear", domain=[0, 400], range=[0, 240])],
        scenes=[SceneSpec(
            name="main", width=400.0, height=300.0, x=0.0, y=0.0,
            objects=[ObjectDecl(
                name="bars", kind="collection", source_table="countries",
                template=ObjectDecl(
                    name="", kind="mark", mark_shape="rect",
                    channels={"fill": "#4682b4", "opacity": 1.0, "strokeWidth": 1}))],
            encodings=[EncodingDecl(id="e1", target="bars", field="pop",
                                    channel="height", scale="h")])],
        interactions=[],
    )
    assert doc == expected


def test_missing_technique_is_E010():
    bad = json.dumps({
        "name": "t", "data": [], "scales": [],
        "scenes": [{"name": "s", "objects": []}],
        "interactions": [{"name": "u", "level": "technique",
                          "on": {"event": "click", "listener": "s"}, "target": "s"}],
    })
    diags = parse_document(bad)
    assert isinstance(diags, list)
    assert any(d.code == "E010_MISSING_TECHNIQUE" and d.path == "/interactions/0" for d in diags)


def test_unknown_top_level_key_is_error():
    diags = parse_document('{"name":"x","banana":1}')
    assert isinstance(diags, list)
    assert any(d.code == "E002_UNKNOWN_KEY" and d.path == "/banana" for d in diags)


def test_malformed_json_is_E000():
    diags = parse_document("{nope")
    assert isinstance(diags, list) and diags[0].code == "E000_MALFORMED"


def test_level_inference():
    doc = parse_ok(json.dumps({
        "name": "t", "data": [], "scales": [],
        "scenes": [{"name": "s", "objects": []}],
        "interactions": [
            {"name": "a", "on": {"event": "click", "listener": "s"}, "target": "s",
             "technique": "point_select"},
            {"name": "b", "on": {"event": "click", "listener": "s"}, "target": "s",
             "intent": "select"},
        ],
    }))
    assert doc.interactions[0].level == "technique"
    assert doc.interactions[1].level == "intent"


def test_validate_clean_document():
    from vizact.fixtures import fixture_text

    doc = parse_ok(fixture_text("bars"))
    assert validate_document(doc) == []


def test_validate_unresolved_target():
    doc = parse_ok(json.dumps({
        "name": "t", "data": [], "scales": [],
        "scenes": [{"name": "s", "objects": []}],
        "interactions": [{"name": "u", "level": "intent", "intent": "select",
                          "on": {"event": "click", "listener": "s"},
                          "target": "sceneX"}],
    }))
    diags = validate_document(doc)
    assert [d.code for d in diags] == ["E001_UNRESOLVED_NAME"]
    assert diags[0].path == "/interactions/0/target"


def test_validate_duplicate_table_name():
    doc = parse_ok(json.dumps({
        "name": "t",
        "data": [{"name": "t", "fields": [{"name": "a", "kind": "number"}], "rows": []},
                 {"name": "t", "fields": [{"name": "a", "kind": "number"}], "rows": []}],
        "scales": [], "scenes": [], "interactions": [],
    }))
    diags = validate_document(doc)
    assert any(d.code == "E004_DUPLICATE_NAME" and d.path == "/data/1/name" for d in diags)


def test_row_kind_mismatch():
    diags = parse_document(json.dumps({
        "name": "t",
        "data": [{"name": "x", "fields": [{"name": "n", "kind": "number"}],
                  "rows": [{"n": "oops"}]}],
        "scales": [], "scenes": [], "interactions": [],
    }))
    assert isinstance(diags, list)
    assert any(d.code == "E003_WRONG_KIND" and d.path == "/data/0/rows/0/n" for d in diags)


def test_date_fields_are_iso():
    doc = parse_ok(json.dumps({
        "name": "t",
        "data": [{"name": "d", "fields": [{"name": "when", "kind": "date"}],
                  "rows": [{"when": "2020-03-20"}]}],
        "scales": [], "scenes": [], "interactions": [],
    }))
    assert doc.data[0].rows[0]["when"] == "2020-03-20"
    bad = parse_document(json.dumps({
        "name": "t",
        "data": [{"name": "d", "fields": [{"name": "when", "kind": "date"}],
                  "rows": [{"when": "20/03/2020"}]}],
        "scales": [], "scenes": [], "interactions": [],
    }))
    assert isinstance(bad, list)


def test_csv_ingestion(tmp_path):
    (tmp_path / "rows.csv").write_text('name,pop\n"São, P",12\nRio,6.5\n', encoding="utf-8")
    doc = parse_ok(json.dumps({
        "name": "t",
        "data": [{"name": "cities", "rows": {"csv": "rows.csv"}}],
        "scales": [], "scenes": [], "interactions": [],
    }), base=tmp_path)
    table = doc.data[0]
    assert table.fields == [("name", "string"), ("pop", "number")]
    assert table.rows[0] == {"name": "São, P", "pop": 12}
    assert table.rows[1]["pop"] == 6.5


def test_csv_missing_file(tmp_path):
    diags = parse_document(json.dumps({
        "name": "t", "data": [{"name": "x", "rows": {"csv": "absent.csv"}}],
        "scales": [], "scenes": [], "interactions": [],
    }), base=tmp_path)
    assert isinstance(diags, list)
    assert diags[0].code == "E005_CSV_UNREADABLE"


def test_serialize_roundtrip_fixture():
    from vizact.fixtures import FIXTURES, fixture_text

    for name in FIXTURES:
        doc = parse_ok(fixture_text(name))
        again = parse_ok(serialize_document(doc))
        assert doc == again, name


def test_unknown_nested_key_warns_only():
    doc = parse_document(json.dumps({
        "name": "t", "data": [], "scales": [],
        "scenes": [{"name": "s", "objects": [], "wobble": True}],
        "interactions": [],
    }))
    assert isinstance(doc, Document)  # warning, not failure


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=120))
def test_parse_total_over_arbitrary_text(text):
    result = parse_document(text)
    assert isinstance(result, (Document, list))


@settings(max_examples=150, deadline=None)
@given(st.binary(max_size=80))
def test_parse_total_over_bytes(blob):
    result = parse_document(blob.decode("utf-8", errors="replace"))
    assert isinstance(result, (Document, list))


def test_predicate_null_operand_matches_nothing():
    for op in ("eq", "neq", "lt", "in", "not_in", "between"):
        p = Predicate("a", op, None)
        assert predicate_matches(p, lambda v: 5) is False


def test_predicate_conjunction():
    p = Predicate("a", "gt", 1, conjuncts=[Predicate("b", "lt", 10)])
    assert predicate_matches(p, {"a": 5, "b": 5}.get) is True
    assert predicate_matches(p, {"a": 5, "b": 50}.get) is False


def test_csv_declared_kinds_override_inference(tmp_path):
    (tmp_path / "rows.csv").write_text("code,flag\n007,true\n042,false\n", encoding="utf-8")
    doc = parse_ok(json.dumps({
        "name": "t",
        "data": [{"name": "codes",
                  "fields": [{"name": "code", "kind": "string"},
                             {"name": "flag", "kind": "boolean"}],
                  "rows": {"csv": "rows.csv"}}],
        "scales": [], "scenes": [], "interactions": [],
    }), base=tmp_path)
    table = doc.data[0]
    assert table.rows[0] == {"code": "007", "flag": True}  # kept as string, not 7
