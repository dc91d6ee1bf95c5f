"""Built-in fixture corpus: small documents and scripts covering every
technique family, written out by ``vizact init``. Each fixture pairs a
document with a script so the scenario replays deterministically.
"""

from __future__ import annotations

import json


def _bars() -> dict:
    return {
        "name": "bars",
        "data": [{
            "name": "countries", "key": "country",
            "fields": [{"name": "country", "kind": "string"}, {"name": "pop", "kind": "number"}],
            "rows": [{"country": "USA", "pop": 330}, {"country": "Canada", "pop": 38},
                     {"country": "Mexico", "pop": 126}],
        }],
        "scales": [
            {"id": "x", "kind": "band", "domain": {"table": "countries", "field": "country"},
             "range": [40, 360], "bandPadding": 0.1},
            {"id": "y", "kind": "linear", "domain": [0, 400], "range": [260, 20]},
            {"id": "h", "kind": "linear", "domain": [0, 400], "range": [0, 240]},
        ],
        "scenes": [{
            "name": "main", "width": 400, "height": 300,
            "objects": [
                {"name": "bars", "kind": "collection", "sourceTable": "countries",
                 "label": "bar", "labelPlural": "bars",
                 "template": {"kind": "mark", "markShape": "rect",
                              "channels": {"width": 60, "y": 260}}},
                {"name": "xaxis", "kind": "axis", "scale": "x", "orient": "bottom",
                 "channels": {"y": 260}},
                {"name": "yaxis", "kind": "axis", "scale": "y", "orient": "left",
                 "channels": {"x": 40}},
            ],
            "encodings": [
                {"id": "e_x", "target": "bars", "field": "country", "channel": "x", "scale": "x"},
                {"id": "e_y", "target": "bars", "field": "pop", "channel": "y", "scale": "y"},
                {"id": "e_h", "target": "bars", "field": "pop", "channel": "height", "scale": "h"},
            ],
        }],
        "interactions": [
            {"name": "highlight", "level": "technique", "technique": "point_select",
             "on": {"event": "click", "listener": "main"},
             "target": {"collection": "bars"},
             "bindings": {"var": "sel", "trueProps": {"stroke": "#000", "opacity": 1.0},
                          "falseProps": {"stroke": "none", "opacity": 0.3}}},
            {"name": "clear", "level": "technique", "technique": "deselect",
             "on": {"event": "click", "listener": "main"},
             "target": {"collection": "bars"},
             "bindings": {"var": "sel",
                          "falseProps": {"stroke": "none", "opacity": 1.0}}},
        ],
    }


def _bars_script() -> dict:
    # band step (360-40)/3 = 106.67, pad offset 5.33: USA x=45.3, Canada x=152, Mexico x=258.7
    return {"name": "point_select", "events": [
        {"tick": 1, "kind": "click", "x": 70, "y": 200},
        {"tick": 2, "kind": "click", "x": 170, "y": 250},
        {"tick": 3, "kind": "click", "x": 30, "y": 30},
    ]}


def _scatter() -> dict:
    return {
        "name": "scatter",
        "data": [{
            "name": "stations",
            "fields": [{"name": "name", "kind": "string"}, {"name": "x", "kind": "number"},
                       {"name": "y", "kind": "number"}, {"name": "value", "kind": "number"}],
            "rows": [{"name": "north", "x": 20, "y": 80, "value": 14},
                     {"name": "east", "x": 70, "y": 60, "value": 9},
                     {"name": "south", "x": 40, "y": 20, "value": 22},
                     {"name": "west", "x": 85, "y": 35, "value": 5}],
        }],
        "scales": [
            {"id": "sx", "kind": "linear", "domain": [0, 100], "range": [20, 380]},
            {"id": "sy", "kind": "linear", "domain": [0, 100], "range": [280, 20]},
        ],
        "scenes": [{
            "name": "plot", "width": 400, "height": 300,
            "objects": [
                {"name": "dots", "kind": "collection", "sourceTable": "stations",
                 "label": "circle", "labelPlural": "circles",
                 "template": {"kind": "mark", "markShape": "circle", "channels": {"radius": 6}}},
                {"name": "tooltip", "kind": "annotation", "markShape": "text",
                 "channels": {"visible": False, "fill": "#222"}},
            ],
            "encodings": [
                {"id": "p_x", "target": "dots", "field": "x", "channel": "x", "scale": "sx"},
                {"id": "p_y", "target": "dots", "field": "y", "channel": "y", "scale": "sy"},
            ],
        }],
        "interactions": [
            {"name": "hover_tip", "level": "technique", "technique": "show_hide_tooltip_container",
             "on": {"event": "pointer_move", "listener": "plot"},
             "target": "tooltip", "bindings": {"within": "dots"}},
            {"name": "tip_detail", "level": "technique", "technique": "details_on_demand",
             "on": {"event": "pointer_move", "listener": "plot"},
             "target": "tooltip",
             "bindings": {"collection": "dots", "textTemplate": "{name}: {value}"}},
            {"name": "add_point", "level": "technique", "technique": "click_to_add_data_points",
             "on": {"event": "click", "listener": "plot"},
             "target": {"collection": "dots"}, "bindings": {}},
        ],
    }


def _scatter_script() -> dict:
    # north dot sits at (92, 72); background at (200, 150)
    return {"name": "tooltip", "events": [
        {"tick": 1, "kind": "pointer_move", "x": 92, "y": 72},
        {"tick": 2, "kind": "pointer_move", "x": 200, "y": 150},
        {"tick": 3, "kind": "click", "x": 200, "y": 150},
    ]}


def _dateseries() -> dict:
    return {
        "name": "dateseries",
        "data": [{
            "name": "daily", "key": "date",
            "fields": [{"name": "date", "kind": "date"}, {"name": "price", "kind": "number"}],
            "rows": [{"date": "2020-03-01", "price": 30}, {"date": "2020-03-20", "price": 44},
                     {"date": "2020-04-15", "price": 62}, {"date": "2020-05-10", "price": 51},
                     {"date": "2020-08-06", "price": 77}, {"date": "2020-09-01", "price": 70}],
        }],
        "scales": [
            {"id": "t", "kind": "linear", "domain": ["2020-03-01", "2020-09-01"], "range": [40, 360]},
            {"id": "v", "kind": "linear", "domain": [0, 100], "range": [260, 20]},
        ],
        "scenes": [{
            "name": "series", "width": 400, "height": 300,
            "objects": [
                {"name": "marks", "kind": "collection", "sourceTable": "daily",
                 "label": "mark", "labelPlural": "marks",
                 "template": {"kind": "mark", "markShape": "circle", "channels": {"radius": 5}}},
                {"name": "dateline", "kind": "annotation", "markShape": "line",
                 "channels": {"visible": False, "y": 20, "height": 240, "stroke": "#888"}},
                {"name": "taxis", "kind": "axis", "scale": "t", "orient": "bottom",
                 "channels": {"y": 260}},
            ],
            "encodings": [
                {"id": "d_x", "target": "marks", "field": "date", "channel": "x", "scale": "t"},
                {"id": "d_y", "target": "marks", "field": "price", "channel": "y", "scale": "v"},
            ],
        }],
        "interactions": [
            {"name": "brush", "level": "technique", "technique": "range_select",
             "on": {"event": "drag_move", "listener": "series"},
             "target": {"collection": "marks"},
             "bindings": {"axis": "x", "trueProps": {"fill": "#4682b4"},
                          "falseProps": {"fill": "#bbbbbb"}}},
            {"name": "track", "level": "technique", "technique": "show_hide_reference_lines",
             "on": {"event": "pointer_move", "listener": "series"},
             "target": "dateline", "bindings": {"axis": "x"}},
        ],
    }


def _dateseries_script() -> dict:
    return {"name": "range_select", "events": [
        {"tick": 1, "kind": "pointer_move", "x": 120, "y": 150},
        {"tick": 2, "kind": "pointer_down", "x": 70, "y": 150},
        {"tick": 3, "kind": "pointer_move", "x": 150, "y": 150},
        {"tick": 4, "kind": "pointer_move", "x": 320, "y": 150},
        {"tick": 5, "kind": "pointer_up", "x": 320, "y": 150},
    ]}


def _sunburst() -> dict:
    tau = 6.283185307179586
    rows = [
        {"id": "A", "parent": "", "a0": 0.0, "a1": tau / 2, "r0": 40, "r1": 70},
        {"id": "B", "parent": "", "a0": tau / 2, "a1": tau, "r0": 40, "r1": 70},
        {"id": "A1", "parent": "A", "a0": 0.0, "a1": tau / 4, "r0": 70, "r1": 100},
        {"id": "A2", "parent": "A", "a0": tau / 4, "a1": tau / 2, "r0": 70, "r1": 100},
        {"id": "B1", "parent": "B", "a0": tau / 2, "a1": tau, "r0": 70, "r1": 100},
    ]
    return {
        "name": "sunburst",
        "data": [{
            "name": "seq",
            "fields": [{"name": "id", "kind": "string"}, {"name": "parent", "kind": "string"},
                       {"name": "a0", "kind": "number"}, {"name": "a1", "kind": "number"},
                       {"name": "r0", "kind": "number"}, {"name": "r1", "kind": "number"}],
            "rows": rows,
        }],
        "scales": [
            {"id": "ident_a", "kind": "linear", "domain": [0, tau], "range": [0, tau]},
            {"id": "ident_r", "kind": "linear", "domain": [0, 100], "range": [0, 100]},
        ],
        "scenes": [{
            "name": "sun", "width": 400, "height": 300,
            "objects": [
                {"name": "arcs", "kind": "collection", "sourceTable": "seq",
                 "label": "arc", "labelPlural": "arcs",
                 "template": {"kind": "mark", "markShape": "arc",
                              "channels": {"x": 200, "y": 150}}},
            ],
            "encodings": [
                {"id": "s_a0", "target": "arcs", "field": "a0", "channel": "startAngle", "scale": "ident_a"},
                {"id": "s_a1", "target": "arcs", "field": "a1", "channel": "endAngle", "scale": "ident_a"},
                {"id": "s_r0", "target": "arcs", "field": "r0", "channel": "innerRadius", "scale": "ident_r"},
                {"id": "s_r1", "target": "arcs", "field": "r1", "channel": "radius", "scale": "ident_r"},
            ],
        }],
        "interactions": [
            {"name": "hover_path", "level": "technique", "technique": "generalized_select",
             "on": {"event": "pointer_move", "listener": "sun"},
             "target": {"collection": "arcs"},
             "bindings": {"expansion": {"mode": "ancestors", "field": "parent"},
                          "trueProps": {"opacity": 1.0}, "falseProps": {"opacity": 0.3}}},
        ],
    }


def _sunburst_script() -> dict:
    # inside A1: angle tau/8 at radius 85 from center (200,150)
    return {"name": "generalized_select", "events": [
        {"tick": 1, "kind": "pointer_move", "x": 260.0, "y": 210.0},
        {"tick": 2, "kind": "pointer_move", "x": 140.0, "y": 150.0},
    ]}


def _dashboard() -> dict:
    months = ["Jan", "Feb", "Mar", "Apr", "May", "Jun"]
    sales = [{"month": m, "total": t} for m, t in zip(months, [120, 90, 150, 80, 110, 140])]
    details = []
    for i, m in enumerate(months):
        details.append({"id": f"{m}-a", "month": m, "amount": 30 + i * 5})
        details.append({"id": f"{m}-b", "month": m, "amount": 22 + i * 3})
    return {
        "name": "dashboard",
        "data": [
            {"name": "sales", "key": "month",
             "fields": [{"name": "month", "kind": "string"}, {"name": "total", "kind": "number"}],
             "rows": sales},
            {"name": "details", "key": "id",
             "fields": [{"name": "id", "kind": "string"}, {"name": "month", "kind": "string"},
                        {"name": "amount", "kind": "number"}],
             "rows": details},
        ],
        "scales": [
            {"id": "mx", "kind": "band", "domain": {"table": "sales", "field": "month"},
             "range": [30, 270], "bandPadding": 0.1},
            {"id": "my", "kind": "linear", "domain": [0, 200], "range": [260, 40]},
            {"id": "mh", "kind": "linear", "domain": [0, 200], "range": [0, 220]},
            {"id": "dx", "kind": "band", "domain": {"table": "details", "field": "id"},
             "range": [20, 280], "bandPadding": 0.1},
            {"id": "dy", "kind": "linear", "domain": [0, 60], "range": [260, 40]},
            {"id": "dh", "kind": "linear", "domain": [0, 60], "range": [0, 220]},
        ],
        "scenes": [
            {"name": "left", "width": 300, "height": 300, "x": 0, "y": 0,
             "objects": [
                 {"name": "monthbars", "kind": "collection", "sourceTable": "sales",
                  "label": "month bar", "labelPlural": "month bars",
                  "template": {"kind": "mark", "markShape": "rect",
                               "channels": {"width": 32, "y": 260}}},
             ],
             "encodings": [
                 {"id": "l_x", "target": "monthbars", "field": "month", "channel": "x", "scale": "mx"},
                 {"id": "l_y", "target": "monthbars", "field": "total", "channel": "y", "scale": "my"},
                 {"id": "l_h", "target": "monthbars", "field": "total", "channel": "height", "scale": "mh"},
             ]},
            {"name": "right", "width": 300, "height": 300, "x": 300, "y": 0,
             "objects": [
                 {"name": "daybars", "kind": "collection", "sourceTable": "details",
                  "label": "day bar", "labelPlural": "day bars",
                  "template": {"kind": "mark", "markShape": "rect",
                               "channels": {"width": 16, "y": 260}}},
             ],
             "encodings": [
                 {"id": "r_x", "target": "daybars", "field": "id", "channel": "x", "scale": "dx"},
                 {"id": "r_y", "target": "daybars", "field": "amount", "channel": "y", "scale": "dy"},
                 {"id": "r_h", "target": "daybars", "field": "amount", "channel": "height", "scale": "dh"},
             ]},
        ],
        "interactions": [
            {"name": "link", "level": "technique", "technique": "linked_select",
             "on": {"event": "click", "listener": "left"},
             "target": {"collection": "daybars"},
             "bindings": {"field": "month", "within": "monthbars",
                          "trueProps": {"stroke": "#000"}, "falseProps": {"opacity": 0.35}}},
            {"name": "xfilter", "level": "technique", "technique": "cross_filter",
             "on": {"event": "drag_move", "listener": "left"},
             "target": {"collection": "daybars"},
             "bindings": {"path": "target_data", "field": "month", "axis": "x"}},
        ],
    }


def _dashboard_script() -> dict:
    # Jun bar sits near x=234 in the left scene; brush covers Jan..Mar
    return {"name": "linked", "events": [
        {"tick": 1, "kind": "click", "x": 240, "y": 250},
        {"tick": 2, "kind": "pointer_down", "x": 35, "y": 150},
        {"tick": 3, "kind": "pointer_move", "x": 100, "y": 150},
        {"tick": 4, "kind": "pointer_move", "x": 140, "y": 150},
        {"tick": 5, "kind": "pointer_up", "x": 140, "y": 150},
    ]}


def _scrolly() -> dict:
    return {
        "name": "scrolly",
        "data": [{
            "name": "dots", "key": "id",
            "fields": [{"name": "id", "kind": "string"}, {"name": "px", "kind": "number"},
                       {"name": "py", "kind": "number"}],
            "rows": [{"id": "d1", "px": 60, "py": 60}, {"id": "d2", "px": 120, "py": 90},
                     {"id": "d3", "px": 180, "py": 120}],
        }],
        "scales": [
            {"id": "ix", "kind": "linear", "domain": [0, 400], "range": [0, 400]},
            {"id": "iy", "kind": "linear", "domain": [0, 300], "range": [0, 300]},
        ],
        "scenes": [
            {"name": "intro", "width": 400, "height": 300, "scrollThreshold": 0,
             "objects": [
                 {"name": "spots", "kind": "collection", "sourceTable": "dots",
                  "label": "spot", "labelPlural": "spots",
                  "template": {"kind": "mark", "markShape": "circle", "channels": {"radius": 8}}},
             ],
             "encodings": [
                 {"id": "i_x", "target": "spots", "field": "px", "channel": "x", "scale": "ix"},
                 {"id": "i_y", "target": "spots", "field": "py", "channel": "y", "scale": "iy"},
             ]},
            {"name": "detail", "width": 400, "height": 300, "scrollThreshold": 300,
             "objects": [
                 {"name": "note", "kind": "annotation", "markShape": "text",
                  "channels": {"x": 40, "y": 40, "text": "detail view", "fill": "#333"}},
             ],
             "encodings": []},
        ],
        "interactions": [
            {"name": "nav", "level": "technique", "technique": "navigate_scene_section",
             "on": {"event": "scroll", "listener": "intro"},
             "target": ["intro", "detail"], "bindings": {"var": "currentScene"}},
            {"name": "parallax", "level": "technique", "technique": "reposition",
             "on": {"event": "scroll", "listener": "intro"},
             "target": {"collection": "spots"}, "bindings": {}},
        ],
    }


def _scrolly_script() -> dict:
    return {"name": "scrolly", "events": [
        {"tick": 1, "kind": "scroll", "delta": 150},
        {"tick": 2, "kind": "scroll", "delta": 150},
        {"tick": 3, "kind": "scroll", "delta": 150},
    ]}


def _bigmac() -> dict:
    prices = [("USD", 5.66), ("CHF", 6.5), ("SEK", 5.0), ("GBP", 4.4), ("JPY", 3.5)]
    base = 5.66
    rows = [{"currency": c, "price": p, "index": p / base * 100.0} for c, p in prices]
    return {
        "name": "bigmac",
        "data": [{
            "name": "burgernomics", "key": "currency",
            "fields": [{"name": "currency", "kind": "string"}, {"name": "price", "kind": "number"},
                       {"name": "index", "kind": "number"}],
            "rows": rows,
        }],
        "scales": [
            {"id": "cx", "kind": "band", "domain": {"table": "burgernomics", "field": "currency"},
             "range": [40, 360], "bandPadding": 0.2},
            {"id": "iy", "kind": "linear", "domain": [0, 200], "range": [260, 60]},
            {"id": "ih", "kind": "linear", "domain": [0, 200], "range": [0, 200]},
        ],
        "scenes": [{
            "name": "chart", "width": 400, "height": 300,
            "objects": [
                {"name": "lollis", "kind": "collection", "sourceTable": "burgernomics",
                 "label": "lollipop", "labelPlural": "lollipops",
                 "template": {"name": "pop", "kind": "glyph", "children": [
                     {"name": "stem", "kind": "mark", "markShape": "line",
                      "channels": {"stroke": "#888", "strokeWidth": 2}},
                     {"name": "head", "kind": "mark", "markShape": "circle",
                      "channels": {"radius": 7}},
                 ]}},
            ],
            "encodings": [
                {"id": "b_x", "target": "lollis", "field": "currency", "channel": "x", "scale": "cx"},
                {"id": "b_sy", "target": "stem", "field": "index", "channel": "y", "scale": "iy"},
                {"id": "b_h", "target": "stem", "field": "index", "channel": "height", "scale": "ih"},
                {"id": "b_y", "target": "head", "field": "index", "channel": "y", "scale": "iy"},
            ],
        }],
        "interactions": [
            {"name": "rebase", "level": "technique", "technique": "recompute_field_new_baseline",
             "on": {"event": "ui_change", "listener": "baseMenu"},
             "target": {"collection": "lollis"},
             "bindings": {"keyField": "currency", "valueField": "price", "outField": "index",
                          "initial": "USD", "var": "base", "label": "baseline"}},
        ],
    }


def _bigmac_doc_with_control(doc: dict) -> dict:
    doc["scenes"][0]["controls"] = [{
        "name": "baseMenu", "kind": "dropdown",
        "options": ["USD", "CHF", "SEK", "GBP", "JPY"],
        "valueLabel": "baseline",
    }]
    return doc


def _bigmac_script() -> dict:
    return {"name": "rebase", "events": [
        {"tick": 1, "kind": "ui_change", "control": "baseMenu", "value": "CHF"},
        {"tick": 2, "kind": "ui_change", "control": "baseMenu", "value": "GBP"},
    ]}


def _bin_rows(points: list[dict], size: float) -> list[dict]:
    bins: dict[tuple, int] = {}
    for r in points:
        bx = int(r["x"] // size)
        by = int(r["y"] // size)
        bins[(bx, by)] = bins.get((bx, by), 0) + 1
    return [{"id": f"{bx * size:g}:{by * size:g}", "bx": bx * size, "by": by * size,
             "count": float(n), "size": size}
            for (bx, by), n in sorted(bins.items())]


def _heatmap() -> dict:
    points = [{"id": f"p{i}", "x": x, "y": y} for i, (x, y) in enumerate([
        (5, 5), (12, 8), (30, 22), (42, 47), (55, 12), (61, 38),
        (66, 68), (72, 80), (81, 85), (90, 92), (18, 72), (35, 88),
    ])]
    return {
        "name": "heatmap",
        "data": [
            {"name": "points",
             "fields": [{"name": "id", "kind": "string"}, {"name": "x", "kind": "number"},
                        {"name": "y", "kind": "number"}],
             "rows": points},
            {"name": "bins", "key": "id",
             "fields": [{"name": "id", "kind": "string"}, {"name": "bx", "kind": "number"},
                        {"name": "by", "kind": "number"}, {"name": "count", "kind": "number"},
                        {"name": "size", "kind": "number"}],
             "rows": _bin_rows(points, 50.0)},
        ],
        "scales": [
            {"id": "hx", "kind": "linear", "domain": [0, 100], "range": [40, 240]},
            {"id": "hy", "kind": "linear", "domain": [0, 100], "range": [240, 40]},
            {"id": "hs", "kind": "linear", "domain": [0, 100], "range": [0, 200]},
            {"id": "hop", "kind": "linear", "domain": [0, 12], "range": [0.15, 1.0]},
        ],
        "scenes": [{
            "name": "heat", "width": 400, "height": 300, "cameraEnabled": True,
            "objects": [
                {"name": "cells", "kind": "collection", "sourceTable": "bins",
                 "label": "cell", "labelPlural": "cells",
                 "template": {"kind": "mark", "markShape": "rect", "channels": {}}},
            ],
            "encodings": [
                {"id": "h_x", "target": "cells", "field": "bx", "channel": "x", "scale": "hx"},
                {"id": "h_y", "target": "cells", "field": "by", "channel": "y", "scale": "hy"},
                {"id": "h_w", "target": "cells", "field": "size", "channel": "width", "scale": "hs"},
                {"id": "h_h", "target": "cells", "field": "size", "channel": "height", "scale": "hs"},
                {"id": "h_o", "target": "cells", "field": "count", "channel": "opacity", "scale": "hop"},
            ],
        }],
        "interactions": [
            {"name": "szoom", "level": "technique", "technique": "semantic_zoom",
             "on": {"event": "wheel", "listener": "heat"},
             "target": {"collection": "cells"},
             "bindings": {"pointsTable": "points", "xField": "x", "yField": "y",
                          "binSizes": [50.0, 25.0], "thresholds": [2.0],
                          "initial": 0, "label": "bin size", "var": "binLevel"}},
        ],
    }


def _heatmap_script() -> dict:
    return {"name": "semantic_zoom", "events": [
        {"tick": 1, "kind": "wheel", "x": 200, "y": 150, "delta": -1},
        {"tick": 2, "kind": "wheel", "x": 200, "y": 150, "delta": -1},
        {"tick": 3, "kind": "wheel", "x": 200, "y": 150, "delta": -1},
        {"tick": 4, "kind": "wheel", "x": 200, "y": 150, "delta": -1},
    ]}


def _dnm() -> dict:
    dust_rows = [
        {"name": "ant", "speed": 40, "power": 60, "px": 80, "py": 90},
        {"name": "bee", "speed": 90, "power": 30, "px": 140, "py": 120},
        {"name": "cat", "speed": 60, "power": 80, "px": 200, "py": 150},
        {"name": "dog", "speed": 30, "power": 90, "px": 260, "py": 180},
        {"name": "elk", "speed": 75, "power": 45, "px": 320, "py": 210},
        {"name": "fox", "speed": 55, "power": 70, "px": 100, "py": 220},
    ]
    return {
        "name": "dnm",
        "data": [
            {"name": "magnet_fields", "key": "field",
             "fields": [{"name": "field", "kind": "string"}], "rows": []},
            {"name": "dust", "key": "name",
             "fields": [{"name": "name", "kind": "string"}, {"name": "speed", "kind": "number"},
                        {"name": "power", "kind": "number"}, {"name": "px", "kind": "number"},
                        {"name": "py", "kind": "number"}],
             "rows": dust_rows},
        ],
        "scales": [
            {"id": "dpx", "kind": "linear", "domain": [0, 400], "range": [0, 400]},
            {"id": "dpy", "kind": "linear", "domain": [0, 300], "range": [0, 300]},
        ],
        "scenes": [{
            "name": "board", "width": 400, "height": 300,
            "objects": [
                {"name": "dustmarks", "kind": "collection", "sourceTable": "dust",
                 "label": "dust particle", "labelPlural": "dust particles",
                 "template": {"kind": "mark", "markShape": "circle", "channels": {"radius": 4}}},
                {"name": "magnets", "kind": "collection", "sourceTable": "magnet_fields",
                 "label": "magnet", "labelPlural": "magnets",
                 "template": {"kind": "mark", "markShape": "circle",
                              "channels": {"x": 60, "y": 40, "radius": 12, "fill": "#e49444"}}},
            ],
            "encodings": [
                {"id": "m_x", "target": "dustmarks", "field": "px", "channel": "x", "scale": "dpx"},
                {"id": "m_y", "target": "dustmarks", "field": "py", "channel": "y", "scale": "dpy"},
            ],
            "controls": [
                {"name": "fieldMenu", "kind": "dropdown", "options": ["speed", "power"],
                 "valueLabel": "field"},
            ],
        }],
        "interactions": [
            {"name": "Add Magnet", "level": "component",
             "on": {"event": "ui_change", "listener": "fieldMenu"},
             "target": {"collection": "magnets"},
             "components": {
                 "rules": [
                     {"rule": "data_update", "target": "magnets", "update": "append_row",
                      "rowFields": {"field": {"kind": "event_value"}}},
                 ],
             }},
            {"name": "Move Magnet", "level": "component",
             "on": {"event": "drag_move", "listener": "board"},
             "target": {"collection": "dustmarks"},
             "components": {
                 "hit": {"within": "magnets"},
                 "stateVariables": [
                     {"name": "magnetRefs", "kind": "component_reference", "value": "magnets"},
                 ],
                 "rules": [
                     {"rule": "position", "targets": None,
                      "x": {"kind": "event_x"}, "y": {"kind": "event_y"},
                      "when": "hit_present"},
                     {"rule": "run_evaluator", "id": "pull",
                      "evaluator": {"kind": "layout", "policy": "magnet_attraction"},
                      "targets": {"collection": "dustmarks"}, "when": "hit_present"},
                     {"rule": "apply_layout", "evaluator": "pull"},
                 ],
             }},
        ],
    }


def _dnm_script() -> dict:
    return {"name": "dnm", "events": [
        {"tick": 1, "kind": "ui_change", "control": "fieldMenu", "value": "speed"},
        {"tick": 2, "kind": "pointer_down", "x": 60, "y": 40},
        {"tick": 3, "kind": "pointer_move", "x": 180, "y": 140},
        {"tick": 4, "kind": "pointer_up", "x": 180, "y": 140},
    ]}


def _onset() -> dict:
    items = ["alpha", "beta", "gamma"]
    member = {
        "S1": {"alpha": True, "beta": True, "gamma": False},
        "S2": {"alpha": True, "beta": False, "gamma": True},
        "S3": {"alpha": False, "beta": True, "gamma": True},
    }
    cells = []
    for s in ("S1", "S2", "S3"):
        for it in items:
            cells.append({"cid": f"{s}:{it}", "name": s, "item": it, "member": member[s][it]})
    for it in items:  # composite starts as S1 AND S2
        cells.append({"cid": f"comp1:{it}", "name": "comp1", "item": it,
                      "member": member["S1"][it] and member["S2"][it]})
    return {
        "name": "onset",
        "data": [
            {"name": "matrices_tbl", "key": "name",
             "fields": [{"name": "name", "kind": "string"}, {"name": "depth", "kind": "number"}],
             "rows": [{"name": "S1", "depth": 1}, {"name": "S2", "depth": 1},
                      {"name": "comp1", "depth": 0}]},
            {"name": "cells_tbl", "key": "cid",
             "fields": [{"name": "cid", "kind": "string"}, {"name": "name", "kind": "string"},
                        {"name": "item", "kind": "string"}, {"name": "member", "kind": "boolean"}],
             "rows": cells},
            {"name": "ops_tbl", "key": "op",
             "fields": [{"name": "op", "kind": "string"}],
             "rows": [{"op": "switch"}]},
        ],
        "scales": [
            {"id": "ox", "kind": "band", "domain": ["S1", "S2", "S3", "S4", "comp1"],
             "range": [20, 320], "bandPadding": 0.15},
            {"id": "oy", "kind": "band", "domain": ["alpha", "beta", "gamma"],
             "range": [0, 66], "bandPadding": 0.1},
            {"id": "ofill", "kind": "ordinal", "domain": [True, False],
             "range": ["#39496b", "#dddddd"]},
        ],
        "scenes": [{
            "name": "matrixboard", "width": 400, "height": 300,
            "objects": [
                {"name": "matrices", "kind": "collection", "sourceTable": "matrices_tbl",
                 "template": {"name": "matrixCells", "kind": "collection",
                              "sourceTable": "cells_tbl", "label": "matrix",
                              "channels": {"y": 80, "width": 20, "height": 66},
                              "template": {"name": "cell", "kind": "mark", "markShape": "rect",
                                           "channels": {"width": 18, "height": 18}}},
                 "label": "matrix", "labelPlural": "matrices"},
                {"name": "ops", "kind": "collection", "sourceTable": "ops_tbl",
                 "label": "operator mark", "labelPlural": "operator marks",
                 "template": {"kind": "mark", "markShape": "circle",
                              "channels": {"x": 370, "y": 40, "radius": 10, "fill": "#888888"}}},
            ],
            "encodings": [
                {"id": "o_x", "target": "matrices", "field": "name", "channel": "x", "scale": "ox"},
                {"id": "o_y", "target": "matrixCells", "field": "item", "channel": "y", "scale": "oy"},
                {"id": "o_f", "target": "matrixCells", "field": "member", "channel": "fill", "scale": "ofill"},
            ],
            "controls": [
                {"name": "setList", "kind": "tab", "options": ["S3", "S4"],
                 "label": "set list", "valueLabel": "set"},
            ],
        }],
        "interactions": [
            {"name": "Add Matrix", "level": "component",
             "on": {"event": "ui_change", "listener": "setList"},
             "target": {"collection": "matrices"},
             "components": {
                 "rules": [
                     {"rule": "data_update", "target": "matrices", "update": "append_row",
                      "rowFields": {"name": {"kind": "event_value"},
                                    "depth": {"kind": "const", "value": 1}}},
                 ],
             }},
            {"name": "Move Matrix", "level": "component",
             "on": {"event": "drag_move", "listener": "matrixboard"},
             "target": {"collection": "matrices"},
             "components": {
                 "hit": {"within": "matrices", "lift": "matrices"},
                 "stateVariables": [
                     {"name": "collide", "kind": "predicate",
                      "predicate": {"variable": "@x", "op": "between", "operand": None}},
                 ],
                 "rules": [
                     {"rule": "position", "targets": None,
                      "x": {"kind": "event_x"}, "when": "hit_present"},
                     {"rule": "set_var", "var": "collide",
                      "source": {"kind": "hit_bbox", "field": "x", "mode": "overlap"},
                      "when": "hit_present"},
                     {"rule": "run_evaluator", "id": "coll",
                      "evaluator": {"kind": "predicate", "predicate": "collide"},
                      "targets": {"collection": "matrices"}, "when": "hit_present"},
                     {"rule": "apply_scale", "evaluator": "coll", "when": "hit_present",
                      "scale": {"input": "boolean",
                                "trueProps": {"stroke": "#e45756", "strokeWidth": 2},
                                "falseProps": {"stroke": "none", "strokeWidth": 1}}},
                 ],
             }},
            {"name": "Compare Matrices", "level": "component",
             "on": {"event": "drag_end", "listener": "matrixboard"},
             "target": {"collection": "matrices"},
             "components": {
                 "hit": {"within": "matrices", "lift": "matrices"},
                 "rules": [
                     {"rule": "data_update", "target": "matrices", "update": "recompute",
                      "when": "hit_present",
                      "derivation": {"kind": "hierarchy_level", "table": "matrices_tbl",
                                     "params": {"depthField": "depth", "direction": "up"}}},
                 ],
             }},
            {"name": "Change Operator", "level": "component",
             "on": {"event": "click", "listener": "matrixboard"},
             "target": ["matrices/comp1"],
             "components": {
                 "hit": {"within": "ops"},
                 "stateVariables": [
                     {"name": "operator", "kind": "scalar", "value": "and",
                      "label": "logical operator"},
                 ],
                 "rules": [
                     {"rule": "set_var", "var": "operator", "when": "hit_present",
                      "source": {"kind": "lookup", "var": "operator",
                                 "value": {"and": "or", "or": "and"}}},
                     {"rule": "data_update", "target": "matrices/comp1", "update": "recompute",
                      "when": "hit_present",
                      "derivation": {"kind": "aggregate", "table": "cells_tbl",
                                     "params": {"fnVar": "operator", "groupField": "item",
                                                "valueField": "member", "outField": "member",
                                                "setField": "name", "within": ["S1", "S2"],
                                                "keyField": "cid", "keyPrefix": "comp1:",
                                                "extra": {"name": "comp1"}}}},
                 ],
             }},
        ],
    }


def _onset_script() -> dict:
    return {"name": "onset", "events": [
        {"tick": 1, "kind": "ui_change", "control": "setList", "value": "S3"},
        {"tick": 2, "kind": "click", "x": 370, "y": 40},
    ]}


FIXTURES = {
    "bars": (_bars, _bars_script),
    "scatter": (_scatter, _scatter_script),
    "dateseries": (_dateseries, _dateseries_script),
    "sunburst": (_sunburst, _sunburst_script),
    "dashboard": (_dashboard, _dashboard_script),
    "scrolly": (_scrolly, _scrolly_script),
    "bigmac": (lambda: _bigmac_doc_with_control(_bigmac()), _bigmac_script),
    "heatmap": (_heatmap, _heatmap_script),
    "dnm": (_dnm, _dnm_script),
    "onset": (_onset, _onset_script),
}

# the runnable scenario corpus used by the golden-trace suite
GOLDEN_FIXTURES = ("bars", "scatter", "dateseries", "sunburst",
                   "dashboard", "scrolly", "bigmac", "heatmap")


def fixture_document(name: str) -> dict:
    make_doc, _ = FIXTURES[name]
    return make_doc()


def fixture_script(name: str) -> dict:
    _, make_script = FIXTURES[name]
    return make_script()


def fixture_text(name: str) -> str:
    return json.dumps(fixture_document(name), indent=2) + "\n"


def script_text(name: str) -> str:
    return json.dumps(fixture_script(name), indent=2) + "\n"
