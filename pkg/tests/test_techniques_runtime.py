"""Execution coverage: every technique recipe drives real state change.

Golden traces already exercise the select/annotate/filter/derive fixtures;
these tests run the remaining recipes (and alternative branches) through
dispatch and assert their characteristic effect.
"""

import json

import pytest

from contexts import doc_of, roundtrip_contexts, unit
from vizact.compiler import instantiate_technique
from vizact.fixtures import fixture_text
from vizact.interaction import Event
from vizact.model import parse_document
from vizact.runtime import dispatch_event, initial_state


def boot_unit(doc, u, technique):
    compiled = instantiate_technique(u, doc, technique=technique)
    state = initial_state(doc, [compiled])
    return state, [compiled]


def test_organize_views_grid_swap():
    doc = doc_of("dashboard")
    u = unit("drag_end", "left", {"kind": "scene"})
    state, compiled = boot_unit(doc, u, "organize_views")
    dispatch_event(state, compiled, Event(tick=1, kind="drag_start", x=150, y=150))
    dispatch_event(state, compiled, Event(tick=2, kind="drag_move", x=450, y=150, dx=300, dy=0))
    entry = dispatch_event(state, compiled, Event(tick=3, kind="drag_end", x=450, y=150))
    assert ("left", "x", 0.0, 300.0) in entry.channels
    assert ("right", "x", 300.0, 0.0) in entry.channels
    assert state.graph.get("left").channels.x == 300.0


def test_toggle_views_state_variable_branch():
    def add_tab(raw):
        raw["scenes"][0]["controls"] = [
            {"name": "viewTab", "kind": "tab", "options": ["intro", "detail"]}]
    doc = doc_of("scrolly", add_tab)
    u = unit("ui_change", "viewTab", ["intro", "detail"])
    state, compiled = boot_unit(doc, u, "toggle_views")
    entry = dispatch_event(state, compiled,
                           Event(tick=1, kind="ui_change", control="viewTab", value="detail"))
    assert ("intro", "visible", True, False) in entry.channels
    assert state.graph.get("detail").visible


def test_navigate_breadcrumb_branch():
    def add_crumbs(raw):
        raw["scenes"][0]["controls"] = [
            {"name": "crumbs", "kind": "breadcrumb", "options": ["intro", "detail"]}]
    doc = doc_of("scrolly", add_crumbs)
    u = unit("ui_change", "crumbs", ["intro", "detail"], {"var": "current"})
    state, compiled = boot_unit(doc, u, "navigate_scene_section")
    entry = dispatch_event(state, compiled,
                           Event(tick=1, kind="ui_change", control="crumbs", value="detail"))
    assert ("current", "intro", "detail") in entry.state
    assert not state.graph.get("intro").visible


def _bars_with_second_field():
    raw = json.loads(fixture_text("bars"))
    table = raw["data"][0]
    table["fields"].append({"name": "area", "kind": "number"})
    for row, area in zip(table["rows"], (98, 100, 196)):
        row["area"] = area
    raw["scenes"][0]["controls"] = [
        {"name": "fMenu", "kind": "dropdown", "options": ["pop", "area"], "valueLabel": "field"},
        {"name": "tMenu", "kind": "button", "options": ["population", "landmass"]},
    ]
    return parse_document(json.dumps(raw))


def test_change_field_in_encoding_rescales():
    doc = _bars_with_second_field()
    u = unit("ui_change", "fMenu", {"collection": "bars"}, {"encoding": "e_y"})
    state, compiled = boot_unit(doc, u, "change_field_in_encoding")
    before = state.graph.get("bars/USA").channels.y
    entry = dispatch_event(state, compiled,
                           Event(tick=1, kind="ui_change", control="fMenu", value="area"))
    after = state.graph.get("bars/USA").channels.y
    assert before != after
    assert after == pytest.approx(260 - 98 * 240 / 400)  # y scale of the area value
    assert any(d[1] == "y" for d in entry.channels)


def test_change_chart_type_switches_encodings():
    doc = _bars_with_second_field()
    u = unit("ui_change", "tMenu", {"collection": "bars"},
             {"variants": {"population": {"e_y": "pop", "e_h": "pop"},
                           "landmass": {"e_y": "area", "e_h": "area"}},
              "initial": "population"})
    state, compiled = boot_unit(doc, u, "change_chart_type")
    entry = dispatch_event(state, compiled,
                           Event(tick=1, kind="ui_change", control="tMenu", value="landmass"))
    assert ("u.chartType", "population", "landmass") in entry.state
    assert state.graph.get("bars/Mexico").channels.height == pytest.approx(196 * 240 / 400)
    assert any(d[1] == "height" for d in entry.channels)


def test_cross_filter_evaluator_branch():
    doc = doc_of("dashboard")
    u = unit("drag_move", "left", {"collection": "daybars"}, {"field": "month"})
    state, compiled = boot_unit(doc, u, "cross_filter")
    dispatch_event(state, compiled, Event(tick=1, kind="drag_start", x=35, y=150))
    entry = dispatch_event(state, compiled, Event(tick=2, kind="drag_move", x=100, y=150))
    hidden = [d for d in entry.channels if d[1] == "visible" and d[3] is False]
    assert hidden and all(d[0].startswith("daybars/") for d in hidden)
    assert state.graph.get("daybars/Jan-a").visible          # inside the brush
    assert not state.graph.get("daybars/Jun-a").visible      # outside
    assert entry.data == []  # evaluator path never touches the data


def test_move_up_down_hierarchy_slider():
    contexts = roundtrip_contexts()
    doc, u = contexts["move_up_down_hierarchy"]
    state, compiled = boot_unit(doc, u, "move_up_down_hierarchy")
    entry = dispatch_event(state, compiled,
                           Event(tick=1, kind="ui_change", control="lvl", value=1))
    assert ("nodemarks", [], ["b"]) in entry.data  # depth-2 node leaves (row keys)
    entry = dispatch_event(state, compiled,
                           Event(tick=2, kind="ui_change", control="lvl", value=2))
    assert ("nodemarks", ["b"], []) in entry.data  # and returns


def test_drill_down_roll_up_changes_grouping():
    contexts = roundtrip_contexts()
    doc, u = contexts["drill_down_roll_up"]
    state, compiled = boot_unit(doc, u, "drill_down_roll_up")
    entry = dispatch_event(state, compiled,
                           Event(tick=1, kind="ui_change", control="dims", value="region,product"))
    added = next(d for d in entry.data if d[0] == "groupbars")
    assert sorted(added[1]) == ["N / x", "N / y", "S / x"]
    assert sorted(added[2]) == ["N", "S"]
    rows = state.graph.rows["groupbars"]
    assert [r["value"] for r in rows] == [5.0, 7.0, 3.0]  # per-product sums


def test_change_aggregator_switches_function():
    contexts = roundtrip_contexts()
    doc, u = contexts["change_aggregator"]
    state, compiled = boot_unit(doc, u, "change_aggregator")
    entry = dispatch_event(state, compiled,
                           Event(tick=1, kind="ui_change", control="aggMenu", value="mean"))
    rows = state.graph.rows["groupbars"]
    assert [r["value"] for r in rows] == [6.0, 3.0]  # N: mean(5,7), S: mean(3)
    assert ("u.agg", "sum", "mean") in entry.state


def test_geometric_zoom_double_click_branch():
    doc = doc_of("heatmap")
    u = unit("double_click", "heat", {"scene": "heat"})
    state, compiled = boot_unit(doc, u, "geometric_zoom")
    entry = dispatch_event(state, compiled, Event(tick=1, kind="double_click", x=100, y=100))
    assert ("heat", "zoom", 1.0, 2.0) in entry.camera


def test_pan_moves_focus_only():
    doc = doc_of("heatmap")
    u = unit("drag_move", "heat", {"scene": "heat"})
    state, compiled = boot_unit(doc, u, "pan")
    dispatch_event(state, compiled, Event(tick=1, kind="drag_start", x=100, y=100))
    entry = dispatch_event(state, compiled, Event(tick=2, kind="drag_move", x=110, y=100, dx=10, dy=0))
    assert ("heat", "focusX", 200.0, 190.0) in entry.camera
    assert all(d[1] != "zoom" for d in entry.camera)


def test_reposition_preset_positions_branch():
    def add_menu(raw):
        raw["scenes"][0]["controls"] = [
            {"name": "layoutMenu", "kind": "dropdown", "options": ["spread", "stack"]}]
    doc = doc_of("scrolly", add_menu)
    presets = {
        "stack": {"mark": [10, 10]},  # every spot collapses onto one slot
    }
    u = unit("ui_change", "layoutMenu", {"collection": "spots"},
             {"branch": "state_variable", "positions": presets})
    state, compiled = boot_unit(doc, u, "reposition")
    entry = dispatch_event(state, compiled,
                           Event(tick=1, kind="ui_change", control="layoutMenu", value="stack"))
    moved = {d[0] for d in entry.channels if d[1] in ("x", "y")}
    assert moved == {"spots/d1", "spots/d2", "spots/d3"}
    assert state.graph.get("spots/d2").channels.x == 10.0
