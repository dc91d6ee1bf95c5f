"""Canonical instantiation contexts: for every registered technique, a
document and a unit spec under which the technique is satisfiable. Shared by
the compiler tests and the acceptance suite."""

from __future__ import annotations

import json

from vizact.fixtures import fixture_document
from vizact.model import Document, EventBinding, InteractionSpec, Selector, parse_document


def doc_of(name: str, mutate=None) -> Document:
    raw = fixture_document(name)
    if mutate:
        mutate(raw)
    doc = parse_document(json.dumps(raw))
    assert isinstance(doc, Document), doc
    return doc


def unit(event: str, listener: str, target, bindings: dict | None = None) -> InteractionSpec:
    return InteractionSpec(name="u", level="technique",
                           on=EventBinding(event=event, listener=listener),
                           target=Selector.from_raw(target), bindings=bindings or {})


def _bars_with_controls(raw: dict) -> None:
    raw["scenes"][0]["controls"] = [
        {"name": "sortMenu", "kind": "dropdown", "options": ["pop", "country"], "valueLabel": "field"},
        {"name": "qSlider", "kind": "slider", "domain": [0, 400]},
        {"name": "fMenu", "kind": "dropdown", "options": ["pop"], "valueLabel": "field"},
        {"name": "tMenu", "kind": "button", "options": ["a", "b"]},
    ]


def _scrolly_with_tab(raw: dict) -> None:
    raw["scenes"][0]["controls"] = [
        {"name": "viewTab", "kind": "tab", "options": ["intro", "detail"]},
    ]


def _dashboard_with_camera(raw: dict) -> None:
    raw["scenes"][1]["cameraEnabled"] = True


_TREE = {
    "name": "tree",
    "data": [{"name": "nodes", "key": "id",
              "fields": [{"name": "id", "kind": "string"}, {"name": "depth", "kind": "number"},
                         {"name": "v", "kind": "number"}],
              "rows": [{"id": "r", "depth": 0, "v": 1}, {"id": "a", "depth": 1, "v": 2},
                       {"id": "b", "depth": 2, "v": 3}]}],
    "scales": [{"id": "nx", "kind": "band", "domain": {"table": "nodes", "field": "id"},
                "range": [0, 300]}],
    "scenes": [{"name": "tv", "width": 400, "height": 300,
                "objects": [{"name": "nodemarks", "kind": "collection", "sourceTable": "nodes",
                             "template": {"kind": "mark", "markShape": "rect",
                                          "channels": {"width": 20, "height": 20}}}],
                "encodings": [{"id": "t_x", "target": "nodemarks", "field": "id",
                               "channel": "x", "scale": "nx"}],
                "controls": [{"name": "lvl", "kind": "slider", "domain": [0, 3]}]}],
    "interactions": [],
}

_PIVOT = {
    "name": "pivot",
    "data": [
        {"name": "detail", "key": "rid",
         "fields": [{"name": "rid", "kind": "string"}, {"name": "region", "kind": "string"},
                    {"name": "product", "kind": "string"}, {"name": "amount", "kind": "number"}],
         "rows": [{"rid": "1", "region": "N", "product": "x", "amount": 5},
                  {"rid": "2", "region": "N", "product": "y", "amount": 7},
                  {"rid": "3", "region": "S", "product": "x", "amount": 3}]},
        {"name": "agg", "key": "group",
         "fields": [{"name": "group", "kind": "string"}, {"name": "value", "kind": "number"}],
         "rows": [{"group": "N", "value": 12}, {"group": "S", "value": 3}]},
    ],
    "scales": [{"id": "ax", "kind": "band", "domain": ["N", "S", "N / x", "N / y", "S / x"],
                "range": [0, 300]}],
    "scenes": [{"name": "pv", "width": 400, "height": 300,
                "objects": [{"name": "groupbars", "kind": "collection", "sourceTable": "agg",
                             "template": {"kind": "mark", "markShape": "rect",
                                          "channels": {"width": 20, "height": 30}}}],
                "encodings": [{"id": "a_x", "target": "groupbars", "field": "group",
                               "channel": "x", "scale": "ax"}],
                "controls": [{"name": "dims", "kind": "dropdown",
                              "options": ["region", "region,product"], "valueLabel": "dimension"},
                             {"name": "aggMenu", "kind": "dropdown", "options": ["sum", "mean"],
                              "valueLabel": "aggregator"}]}],
    "interactions": [],
}


def roundtrip_contexts() -> dict[str, tuple[Document, InteractionSpec]]:
    """technique id -> (document, unit) that instantiates and classifies back."""
    bars = doc_of("bars")
    bars2 = doc_of("bars", _bars_with_controls)
    dates = doc_of("dateseries")
    sun = doc_of("sunburst")
    dash = doc_of("dashboard")
    dash_cam = doc_of("dashboard", _dashboard_with_camera)
    scatter = doc_of("scatter")
    heat = doc_of("heatmap")
    scrolly = doc_of("scrolly")
    scrolly_tab = doc_of("scrolly", _scrolly_with_tab)
    dnm = doc_of("dnm")
    bigmac = doc_of("bigmac")
    tree = parse_document(json.dumps(_TREE))
    pivot = parse_document(json.dumps(_PIVOT))

    return {
        "point_select": (bars, unit("click", "main", {"collection": "bars"})),
        "multi_select": (bars, unit("click", "main", {"collection": "bars"})),
        "range_select": (dates, unit("drag_move", "series", {"collection": "marks"})),
        "generalized_select": (sun, unit("pointer_move", "sun", {"collection": "arcs"},
                                         {"expansion": {"mode": "ancestors", "field": "parent"}})),
        "linked_select": (dash, unit("drag_move", "left", {"collection": "daybars"},
                                     {"field": "month"})),
        "deselect": (bars, unit("click", "main", {"collection": "bars"})),
        "show_hide_reference_lines": (dates, unit("pointer_move", "series", "dateline")),
        "show_hide_tooltip_container": (scatter, unit("pointer_move", "plot", "tooltip",
                                                      {"within": "dots"})),
        "reposition": (scrolly, unit("drag_move", "intro", {"collection": "spots"})),
        "sort": (bars2, unit("ui_change", "sortMenu", {"collection": "bars"})),
        "organize_views": (dash, unit("drag_end", "left", {"kind": "scene"})),
        "geometric_zoom": (heat, unit("wheel", "heat", {"scene": "heat"})),
        "pan": (heat, unit("drag_move", "heat", {"scene": "heat"})),
        "toggle_views": (scrolly_tab, unit("ui_change", "viewTab", ["intro", "detail"])),
        "navigate_scene_section": (scrolly, unit("scroll", "intro", ["intro", "detail"])),
        "change_field_in_encoding": (bars2, unit("ui_change", "fMenu", {"collection": "bars"},
                                                 {"encoding": "e_y"})),
        "change_chart_type": (bars2, unit("ui_change", "tMenu", {"collection": "bars"},
                                          {"variants": {"a": {"e_y": "pop"}, "b": {"e_y": "pop"}}})),
        "click_to_add_data_points": (scatter, unit("click", "plot", {"collection": "dots"})),
        "add_object": (dnm, unit("ui_change", "fieldMenu", {"collection": "magnets"},
                                 {"field": "field"})),
        "dynamic_queries": (bars2, unit("ui_change", "qSlider", {"collection": "bars"},
                                        {"field": "pop", "op": "lte"})),
        "details_on_demand": (scatter, unit("pointer_move", "plot", "tooltip",
                                            {"collection": "dots"})),
        "cross_filter": (dash, unit("drag_move", "left", {"collection": "daybars"},
                                    {"field": "month", "path": "target_data"})),
        "move_up_down_hierarchy": (tree, unit("ui_change", "lvl", {"collection": "nodemarks"},
                                              {"depthField": "depth"})),
        "drill_down_roll_up": (pivot, unit("ui_change", "dims", {"collection": "groupbars"},
                                           {"sourceTable": "detail", "measure": "amount",
                                            "initial": "region", "outField": "value"})),
        "recompute_field_new_baseline": (bigmac, unit("ui_change", "baseMenu",
                                                      {"collection": "lollis"},
                                                      {"keyField": "currency", "valueField": "price",
                                                       "outField": "index", "initial": "USD"})),
        "change_aggregator": (pivot, unit("ui_change", "aggMenu", {"collection": "groupbars"},
                                          {"sourceTable": "detail", "groupField": "region",
                                           "valueField": "amount", "outField": "value"})),
        "semantic_zoom": (heat, unit("wheel", "heat", {"collection": "cells"},
                                     {"pointsTable": "points", "xField": "x", "yField": "y"})),
        "direct_walk": (dash_cam, unit("click", "left", {"collection": "daybars"},
                                       {"field": "month", "within": "monthbars"})),
    }
