"""Deterministic execution: scripted events flow through compiled
interactions, mutating the scene graph, cameras and state variables, and
every event yields one trace entry of channel/state/data/camera diffs.

Replaying the same script over the same document reproduces the trace
byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .compiler import CompiledInteraction, compile_document
from .graph import (
    ApplyLayoutRule,
    ApplyOrderRule,
    ApplyScaleRule,
    CameraRule,
    ComponentGraph,
    DataUpdateRule,
    Derivation,
    EncodingUpdateRule,
    PositionRule,
    RunEvaluatorRule,
    SetVarRule,
    ValueSource,
    VisibilityRule,
)
from .interaction import (
    Camera,
    Event,
    HitObject,
    StateVariable,
    TargetEvaluator,
    apply_evaluation_scale,
    camera_pan,
    camera_zoom,
    default_camera,
    eval_predicate,
    evaluate_targets,
    hit_test,
    order_targets,
)
from .model import (
    Document,
    OpError,
    Predicate,
    Selector,
    predicate_matches,
)
from .scene import (
    SceneGraph,
    VisualObject,
    apply_encodings,
    axis_markup,
    build_scene_graph,
    query_objects,
    realize_scale,
    svg_element,
    update_object_data,
    _fmt,
)

DRAG_THRESHOLD = 3.0  # px of pointer travel before a drag is synthesized


class CompileFailure(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        super().__init__("; ".join(d.message for d in diagnostics))


@dataclass
class DragState:
    origin: tuple[float, float]
    current: tuple[float, float]
    prev: tuple[float, float]
    scene: str | None
    active: bool = False
    pending: bool = True
    hit: HitObject | None = None  # object grabbed at drag start
    hit_done: bool = False


@dataclass
class TraceEntry:
    tick: int
    matched: list[str] = field(default_factory=list)
    hit: str | None = None
    channels: list[tuple] = field(default_factory=list)
    state: list[tuple] = field(default_factory=list)
    data: list[tuple] = field(default_factory=list)
    camera: list[tuple] = field(default_factory=list)
    errors: list[tuple] = field(default_factory=list)

    def to_json(self) -> str:
        # field order is fixed; traces are compared byte for byte
        return json.dumps({
            "tick": self.tick,
            "matched": self.matched,
            "hit": self.hit,
            "channels": [list(c) for c in self.channels],
            "state": [list(s) for s in self.state],
            "data": [[t, list(a), list(r)] for t, a, r in self.data],
            "camera": [list(c) for c in self.camera],
            "errors": [list(e) for e in self.errors],
        })


@dataclass
class Trace:
    name: str
    entries: list[TraceEntry] = field(default_factory=list)

    def to_jsonl(self) -> str:
        return "".join(e.to_json() + "\n" for e in self.entries)


@dataclass
class EventScript:
    name: str
    events: list[Event]

    @staticmethod
    def from_dict(raw: dict) -> EventScript:
        events = [Event.from_dict(e) for e in raw.get("events", [])]
        ticks = [e.tick for e in events]
        if any(b <= a for a, b in zip(ticks, ticks[1:])):
            raise OpError("E003_WRONG_KIND", "script ticks must strictly increase")
        return EventScript(name=raw.get("name", "script"), events=events)

    def to_dict(self) -> dict:
        return {"name": self.name, "events": [e.to_dict() for e in self.events]}


@dataclass
class RuntimeState:
    doc: Document
    graph: SceneGraph
    compiled: list[CompiledInteraction]
    cameras: dict[str, Camera] = field(default_factory=dict)
    variables: dict[str, StateVariable] = field(default_factory=dict)
    tick: int = 0
    drag: DragState | None = None
    auto_keys: dict[str, int] = field(default_factory=dict)

    def camera(self, scene: str) -> Camera:
        if scene not in self.cameras:
            sc = self.graph.get(scene)
            self.cameras[scene] = default_camera(sc.channels.width, sc.channels.height)
        return self.cameras[scene]


def initial_state(doc: Document, compiled: list[CompiledInteraction]) -> RuntimeState:
    graph = build_scene_graph(doc)
    state = RuntimeState(doc=doc, graph=graph, compiled=compiled)
    for sc in doc.scenes:
        if sc.camera_enabled:
            state.cameras[sc.name] = default_camera(sc.width, sc.height)
    for unit in compiled:
        for v in unit.graph.state_variables:
            state.variables.setdefault(v.name, v)
    return state


# ---------------------------------------------------------------------------
# Event matching


def _scene_contains(graph: SceneGraph, scene: str, x: float, y: float) -> bool:
    ch = graph.get(scene).channels
    return ch.x <= x <= ch.x + ch.width and ch.y <= y <= ch.y + ch.height


def _matches(state: RuntimeState, unit: CompiledInteraction, e: Event) -> bool:
    binding = unit.graph.event_binding
    if binding.event != e.kind:
        return False
    if binding.key is not None and binding.key != e.key:
        return False
    listener = binding.listener
    if e.kind == "ui_change":
        return e.control == listener
    scene = state.doc.listener_scene(listener)
    if scene is None:
        return False
    if e.kind in ("key_down", "key_up", "scroll"):
        return True  # page-level input, not gated on scene visibility
    scene_obj = state.graph.index.get(scene.name)
    if scene_obj is None or not scene_obj.visible:
        return False
    if e.kind in ("drag_move", "drag_end") and state.drag is not None:
        return state.drag.scene == scene.name  # drags belong to their origin scene
    if e.x is None or e.y is None:
        return False
    return _scene_contains(state.graph, scene.name, e.x, e.y)


# ---------------------------------------------------------------------------
# Value resolution


class _Ctx:
    """Per-event execution context for one unit."""

    def __init__(self, state: RuntimeState, unit: CompiledInteraction, e: Event,
                 entry: TraceEntry, hit: HitObject | None, hit_obj: VisualObject | None):
        self.state = state
        self.unit = unit
        self.e = e
        self.entry = entry
        self.hit = hit
        self.hit_obj = hit_obj  # after within/lift resolution
        self.results: dict[str, tuple[str, list, list[str]]] = {}
        scene = state.doc.listener_scene(unit.graph.listener_id)
        self.scene = scene.name if scene else None

    def scene_origin(self) -> tuple[float, float]:
        if self.scene is None:
            return (0.0, 0.0)
        ch = self.state.graph.get(self.scene).channels
        return (ch.x, ch.y)

    def local_point(self) -> tuple[float, float] | None:
        if self.e.x is None or self.e.y is None:
            return None
        ox, oy = self.scene_origin()
        return (self.e.x - ox, self.e.y - oy)

    def world_point(self) -> tuple[float, float] | None:
        pt = self.local_point()
        if pt is None or self.scene is None:
            return pt
        return self.state.camera(self.scene).to_world(*pt)


def _hit_table(ctx: _Ctx):
    obj = ctx.hit_obj
    graph = ctx.state.graph
    cur = obj
    while cur is not None and cur.source_table is None:
        cur = graph.parent(cur.id)
    if cur is None:
        return None, None
    return ctx.state.doc.table(cur.source_table), cur


def _expand_ancestors(ctx: _Ctx, parent_field: str) -> list:
    table, _ = _hit_table(ctx)
    datum = ctx.hit_obj.datum if ctx.hit_obj else None
    if table is None or datum is None:
        return []
    key = table.key_field
    by_key = {r[key]: r for r in table.rows}
    chain = []
    cur = datum
    seen = set()
    while cur is not None and cur[key] not in seen:
        chain.append(cur[key])
        seen.add(cur[key])
        cur = by_key.get(cur.get(parent_field))
    return chain


def _resolve(ctx: _Ctx, src: ValueSource):
    kind = src.kind
    e = ctx.e
    if kind == "const":
        return src.value
    if kind == "event_x":
        pt = ctx.world_point()
        return pt[0] if pt else None
    if kind == "event_y":
        pt = ctx.world_point()
        return pt[1] if pt else None
    if kind == "event_point":
        return ctx.local_point()
    if kind == "pointer_delta":
        return (e.dx or 0.0, e.dy or 0.0)
    if kind == "event_delta":
        return e.delta if e.delta is not None else 0.0
    if kind == "event_value":
        return e.value
    if kind == "wheel_zoom_factor":
        step = src.step or 1.25
        return step ** (-(e.delta or 0.0))
    if kind == "hit_field":
        datum = ctx.hit_obj.datum if ctx.hit_obj else None
        return datum.get(src.field) if datum else None
    if kind == "hit_key":
        table, _ = _hit_table(ctx)
        datum = ctx.hit_obj.datum if ctx.hit_obj else None
        return datum.get(table.key_field) if table is not None and datum else None
    if kind == "hit_expansion":
        if ctx.hit_obj is None:
            return None
        if src.mode == "same_value":
            table, _ = _hit_table(ctx)
            datum = ctx.hit_obj.datum
            if table is None or datum is None:
                return None
            want = datum.get(src.field)
            return [r[table.key_field] for r in table.rows if r.get(src.field) == want]
        return _expand_ancestors(ctx, src.field or "parent")
    if kind == "hit_center":
        if ctx.hit_obj is None:
            return None
        cx, cy = _object_center(ctx.state.graph, ctx.hit_obj)
        return cx if src.field == "x" else (cy if src.field == "y" else (cx, cy))
    if kind == "hit_bbox":
        if ctx.hit_obj is None:
            return None
        graph = ctx.state.graph
        obj = ctx.hit_obj
        ox, oy = graph.origin(obj.id)
        ch = obj.channels
        if src.field == "y":
            lo, hi = oy + ch.y, oy + ch.y + ch.height
        else:
            lo, hi = ox + ch.x, ox + ch.x + ch.width
        if src.mode == "overlap":  # interval-overlap operand for same-size objects
            span = hi - lo
            return [lo - span, hi]
        return [lo, hi]
    if kind == "brush_range":
        drag = ctx.state.drag
        if drag is None:
            return None
        ox, oy = ctx.scene_origin()
        if src.axis == "y":
            lo, hi = sorted((drag.origin[1] - oy, drag.current[1] - oy))
        else:
            lo, hi = sorted((drag.origin[0] - ox, drag.current[0] - ox))
        scale = ctx.state.graph.scales.get(src.scale)
        return scale.invert_range(lo, hi) if scale else [lo, hi]
    if kind == "invert_scale":
        inner = _resolve(ctx, src.source)
        if inner is None:
            return None
        scale = ctx.state.graph.scales.get(src.scale)
        if scale is None:
            return None
        lo, hi = sorted((scale.range[0], scale.range[1]))
        if not (lo <= inner <= hi):
            return None
        return scale.invert(inner)
    if kind == "state_var":
        var = ctx.state.variables.get(src.var)
        return var.value if var else None
    if kind == "auto_key":
        return None  # materialized by the append rule itself
    if kind == "lookup":
        var = ctx.state.variables.get(src.var)
        table = src.value or {}
        return table.get(str(var.value)) if var else None
    if kind == "scene_threshold":
        var = ctx.state.variables.get(src.var)
        pos = float(var.value or 0.0) if var else 0.0
        chosen = None
        for i, sc in enumerate(ctx.state.doc.scenes):
            threshold = sc.scroll_threshold if sc.scroll_threshold is not None else i * 300.0
            if pos >= threshold:
                chosen = sc.name
        return chosen or (ctx.state.doc.scenes[0].name if ctx.state.doc.scenes else None)
    if kind == "zoom_level":
        cam = ctx.state.camera(src.scale)  # scale field doubles as the scene name
        thresholds = src.value or []
        return sum(1 for t in thresholds if cam.zoom >= t)
    if kind == "match_center":
        var = ctx.state.variables.get(src.var)
        pred = var.value if var is not None and isinstance(var.value, Predicate) else None
        if pred is None or pred.operand is None:
            return None
        coll = ctx.state.graph.index.get(src.value)
        if coll is None:
            return None
        centers = []
        for cid in coll.children:
            child = ctx.state.graph.get(cid)
            try:
                matched = eval_predicate(pred, child)
            except OpError:
                matched = child.row_key == str(pred.operand)
            if matched:
                centers.append(_object_center(ctx.state.graph, child))
        if not centers:
            return None
        return (sum(c[0] for c in centers) / len(centers),
                sum(c[1] for c in centers) / len(centers))
    raise OpError("E030_UNRESOLVED_VARIABLE", f"unknown value source {kind!r}")


def _object_center(graph: SceneGraph, obj: VisualObject) -> tuple[float, float]:
    ox, oy = graph.origin(obj.id)
    ch = obj.channels
    if obj.mark_shape in ("circle", "arc"):
        return (ox + ch.x, oy + ch.y)
    return (ox + ch.x + ch.width / 2, oy + ch.y + ch.height / 2)


# ---------------------------------------------------------------------------
# Rule execution


def _when_ok(when: str, ctx: _Ctx) -> bool:
    if when == "hit_present":
        return ctx.hit_obj is not None
    if when == "hit_absent":
        return ctx.hit_obj is None
    return True


def _snapshot(var: StateVariable):
    if isinstance(var.value, Predicate):
        return var.value.operand
    return var.value


def _set_var(ctx: _Ctx, rule: SetVarRule) -> None:
    if not _when_ok(rule.when, ctx):
        return
    var = ctx.state.variables.get(rule.var)
    if var is None:
        raise OpError("E030_UNRESOLVED_VARIABLE", f"unknown state variable {rule.var!r}")
    value = _resolve(ctx, rule.source)
    old = _snapshot(var)
    if isinstance(var.value, Predicate):
        pred = var.value
        if rule.mode == "toggle_in_list":
            current = list(pred.operand) if isinstance(pred.operand, list) else []
            if value in current:
                current.remove(value)
            elif value is not None:
                current.append(value)
            pred.operand = current or None
        elif rule.mode == "remove_from_list":
            if isinstance(pred.operand, list) and value in pred.operand:
                rest = [v for v in pred.operand if v != value]
                pred.operand = rest or None
            elif pred.operand == value:
                pred.operand = None
        else:
            pred.operand = value
    else:
        if rule.mode == "accumulate":
            var.value = (var.value or 0.0) + (value or 0.0)
        else:
            var.value = value
    new = _snapshot(var)
    if new != old:
        ctx.entry.state.append((rule.var, old, new))


def _resolve_predicate(ctx: _Ctx, ref) -> Predicate:
    if isinstance(ref, Predicate):
        return ref
    var = ctx.state.variables.get(ref)
    if var is None or not isinstance(var.value, Predicate):
        raise OpError("E030_UNRESOLVED_VARIABLE", f"no predicate named {ref!r}")
    return var.value


def _targets_of(ctx: _Ctx, sel: Selector | None) -> list[VisualObject]:
    selector = sel or ctx.unit.target
    ids = query_objects(ctx.state.graph, selector)
    out = []
    for oid in ids:
        obj = ctx.state.graph.get(oid)
        if obj.kind == "collection":
            out.extend(ctx.state.graph.get(c) for c in obj.children)
        else:
            out.append(obj)
    return out


def _run_evaluator(ctx: _Ctx, rule: RunEvaluatorRule) -> None:
    if not _when_ok(rule.when, ctx):
        return
    ev = rule.evaluator
    targets = _targets_of(ctx, rule.targets)
    ids = [t.id for t in targets]
    if ev.kind == "predicate":
        pred = _resolve_predicate(ctx, ev.predicate)
        ctx.results[rule.id] = ("boolean", evaluate_targets(targets, pred), ids)
    elif ev.kind == "order":
        fieldname = ev.field_ref
        var = ctx.state.variables.get(fieldname or "")
        if var is not None:
            fieldname = var.value
        ctx.results[rule.id] = ("order", order_targets(targets, fieldname, ev.direction), ids)
    elif ev.kind == "distance":
        from .interaction import distance_targets

        anchor = ctx.hit if ev.anchor in (None, "hit") else ev.anchor
        ctx.results[rule.id] = ("number", distance_targets(ctx.state.graph, targets, ev.metric, anchor), ids)
    elif ev.kind == "layout":
        ctx.results[rule.id] = ("layout", _layout(ctx, ev, targets), ids)
    else:
        raise OpError("E032_KIND_MISMATCH", f"unknown evaluator kind {ev.kind!r}")


def _layout(ctx: _Ctx, ev: TargetEvaluator, targets: list[VisualObject]) -> list:
    if ev.layout_policy == "grid_swap":
        drag = ctx.state.drag
        slots = [(t.channels.x, t.channels.y, t.channels.width, t.channels.height) for t in targets]
        if drag is None:
            return slots
        def slot_at(pt):
            for i, (x, y, w, h) in enumerate(slots):
                if x <= pt[0] <= x + w and y <= pt[1] <= y + h:
                    return i
            return None
        src_i = slot_at(drag.origin)
        dst_i = slot_at(drag.current)
        if src_i is not None and dst_i is not None and src_i != dst_i:
            slots[src_i], slots[dst_i] = slots[dst_i], slots[src_i]
        return slots
    if ev.layout_policy == "magnet_attraction":
        magnets: list[VisualObject] = []
        for v in ctx.unit.graph.state_variables:
            if v.kind != "component_reference":
                continue
            names = v.value if isinstance(v.value, list) else [v.value]
            for nm in names:
                obj = ctx.state.graph.index.get(nm)
                if obj is not None and obj.kind == "collection":
                    magnets.extend(ctx.state.graph.get(c) for c in obj.children)
                elif obj is not None:
                    magnets.append(obj)
        out = []
        for t in targets:
            x, y = t.channels.x, t.channels.y
            for m in magnets:
                weight = _magnet_weight(ctx, m, t)
                x += (m.channels.x - x) * weight * 0.5
                y += (m.channels.y - y) * weight * 0.5
            out.append((x, y))
        return out
    raise OpError("E032_KIND_MISMATCH", f"unknown layout policy {ev.layout_policy!r}")


def _magnet_weight(ctx: _Ctx, magnet: VisualObject, target: VisualObject) -> float:
    """Pull strength: the target's value for the magnet's field, normalized
    by the field maximum."""
    if magnet.datum is None or target.datum is None:
        return 0.0
    fieldname = next(iter(magnet.datum.values()), None)
    if not isinstance(fieldname, str) or fieldname not in target.datum:
        return 0.0
    value = target.datum[fieldname]
    parent = ctx.state.graph.parent(target.id)
    table = None
    if parent is not None and parent.source_table:
        table = ctx.state.doc.table(parent.source_table)
    if table is None:
        return 0.0
    values = [r.get(fieldname, 0) for r in table.rows if isinstance(r.get(fieldname), (int, float))]
    peak = max(values, default=0)
    return float(value) / peak if peak else 0.0


def _apply_scale_rule(ctx: _Ctx, rule: ApplyScaleRule) -> None:
    if not _when_ok(rule.when, ctx) or rule.evaluator not in ctx.results:
        return
    kind, results, ids = ctx.results[rule.evaluator]
    targets = [ctx.state.graph.get(i) for i in ids if i in ctx.state.graph.index]
    scale = rule.scale
    if kind == "order" and scale.input_kind == "rank":
        ranks = [0] * len(results)
        for pos, idx in enumerate(results):
            ranks[idx] = pos
        results = [float(r) for r in ranks]
    ctx.entry.channels.extend(apply_evaluation_scale(results, scale, targets))


def _apply_order_rule(ctx: _Ctx, rule: ApplyOrderRule) -> None:
    if rule.evaluator not in ctx.results:
        return
    _, permutation, ids = ctx.results[rule.evaluator]
    targets = [ctx.state.graph.get(i) for i in ids]
    slots = sorted(t.channels.get(rule.channel) for t in targets)
    for slot, idx in zip(slots, permutation):
        t = targets[idx]
        old = t.channels.get(rule.channel)
        if old != slot:
            t.channels.set(rule.channel, slot, t.mark_shape)
            ctx.entry.channels.append((t.id, rule.channel, old, slot))


def _apply_layout_rule(ctx: _Ctx, rule: ApplyLayoutRule) -> None:
    if rule.evaluator not in ctx.results:
        return
    _, slots, ids = ctx.results[rule.evaluator]
    for oid, slot in zip(ids, slots):
        t = ctx.state.graph.get(oid)
        pairs = zip(("x", "y", "width", "height"), slot)
        for chan, val in pairs:
            old = t.channels.get(chan)
            if old != val:
                t.channels.set(chan, val, t.mark_shape)
                ctx.entry.channels.append((t.id, chan, old, val))


def _camera_rule(ctx: _Ctx, rule: CameraRule) -> None:
    state = ctx.state
    old = state.camera(rule.scene)
    cam = old
    if rule.op == "pan":
        d = _resolve(ctx, rule.delta) if rule.delta else (0.0, 0.0)
        cam = camera_pan(cam, d[0], d[1])
    elif rule.op == "zoom":
        factor = _resolve(ctx, rule.factor) if rule.factor else 1.0
        anchor = _resolve(ctx, rule.anchor) if rule.anchor else None
        if anchor is None:
            anchor = (cam.viewport_w / 2, cam.viewport_h / 2)
        cam = camera_zoom(cam, float(factor), anchor[0], anchor[1])
    else:  # focus jump
        if rule.presets is not None:
            key = _resolve(ctx, rule.focus) if rule.focus else None
            preset = rule.presets.get(str(key))
            if preset is None:
                return
            cam = replace(cam, focus_x=float(preset["focusX"]), focus_y=float(preset["focusY"]),
                          zoom=float(preset.get("zoom", cam.zoom)))
        else:
            center = _resolve(ctx, rule.focus) if rule.focus else None
            if center is None:
                return
            cam = replace(cam, focus_x=center[0], focus_y=center[1],
                          zoom=float(rule.zoom_to) if rule.zoom_to else cam.zoom)
    state.cameras[rule.scene] = cam
    for fieldname, a, b in (("focusX", old.focus_x, cam.focus_x), ("focusY", old.focus_y, cam.focus_y),
                            ("zoom", old.zoom, cam.zoom), ("rotation", old.rotation, cam.rotation)):
        if a != b:
            ctx.entry.camera.append((rule.scene, fieldname, a, b))


def _base_rows(state: RuntimeState, table_name: str) -> list[dict]:
    rows = state.graph.table_rows.get(table_name)
    if rows is None:
        table = state.doc.table(table_name)
        rows = table.rows if table else []
    return [dict(r) for r in rows]


def _collection_ids(state: RuntimeState, target: str) -> list[str]:
    obj = state.graph.index.get(target)
    if obj is None:
        return []
    if obj.kind == "scene":
        return [o.id for o in state.graph.walk(target) if o.kind == "collection"]
    return [target]


def _record_update(ctx: _Ctx, target: str, structural, channel_diffs) -> None:
    prefix = len(target) + 1
    added = [i[prefix:] for i in structural.added if i.startswith(target + "/")]
    removed = [i[prefix:] for i in structural.removed if i.startswith(target + "/")]
    if added or removed:
        ctx.entry.data.append((target, added, removed))
    ctx.entry.channels.extend(channel_diffs)


def _data_update(ctx: _Ctx, rule: DataUpdateRule) -> None:
    if not _when_ok(rule.when, ctx):
        return
    state = ctx.state
    if rule.update == "filter_by_predicate":
        pred = _resolve_predicate(ctx, rule.predicate)
        for cid in _collection_ids(state, rule.target):
            coll = state.graph.get(cid)
            rows = [r for r in _base_rows(state, coll.source_table)
                    if predicate_matches(pred, lambda v, r=r: r.get(v))]
            structural, diffs = update_object_data(state.graph, cid, rows)
            _record_update(ctx, cid, structural, diffs)
        return
    if rule.update == "append_row":
        for cid in _collection_ids(state, rule.target):
            coll = state.graph.get(cid)
            row = {}
            for f, src in rule.row_fields.items():
                if src.kind == "auto_key":
                    n = state.auto_keys.get(cid, len(coll.children)) + 1
                    state.auto_keys[cid] = n
                    row[f] = f"n{n}"
                else:
                    row[f] = _resolve(ctx, src)
            # entering a data item changes the data itself, not just the view
            if coll.source_table:
                state.graph.table_rows.setdefault(coll.source_table, []).append(dict(row))
                state.graph.refresh_scales(coll.source_table)
            rows = state.graph.rows.get(cid, []) + [row]
            structural, diffs = update_object_data(state.graph, cid, rows)
            _record_update(ctx, cid, structural, diffs)
        return
    if rule.update == "replace_rows":
        target_obj = state.graph.index.get(rule.target)
        if target_obj is not None and target_obj.kind == "annotation":
            _update_annotation(ctx, rule, target_obj)
            return
        pred = _resolve_predicate(ctx, rule.predicate) if rule.predicate else None
        for cid in _collection_ids(state, rule.target):
            coll = state.graph.get(cid)
            rows = _base_rows(state, rule.rows_table or coll.source_table)
            if pred is not None:
                rows = [r for r in rows if predicate_matches(pred, lambda v, r=r: r.get(v))]
            structural, diffs = update_object_data(state.graph, cid, rows)
            _record_update(ctx, cid, structural, diffs)
        return
    if rule.update == "recompute":
        rows = _derive_rows(ctx, rule.derivation)
        # a hierarchy cut is a level-of-detail view; the data itself survives
        view_only = rule.derivation is not None and rule.derivation.kind == "hierarchy_level"
        for cid in _collection_ids(state, rule.target):
            coll = state.graph.get(cid)
            if coll.source_table and not view_only:
                if coll.datum is None:  # top-level collection: its rows are the data
                    state.graph.table_rows[coll.source_table] = [dict(r) for r in rows]
                else:  # nested instance: upsert this group's rows by key
                    table = state.doc.table(coll.source_table)
                    fresh = {str(r[table.key_field]): r for r in rows}
                    merged = [dict(fresh.pop(str(r[table.key_field]), r))
                              for r in state.graph.table_rows.get(coll.source_table, [])]
                    merged.extend(dict(r) for r in fresh.values())
                    state.graph.table_rows[coll.source_table] = merged
                state.graph.refresh_scales(coll.source_table)
            structural, diffs = update_object_data(state.graph, cid, rows)
            _record_update(ctx, cid, structural, diffs)
        return
    raise OpError("E023_SCHEMA_MISMATCH", f"unknown data update {rule.update!r}")


def _update_annotation(ctx: _Ctx, rule: DataUpdateRule, obj: VisualObject) -> None:
    state = ctx.state
    pred = _resolve_predicate(ctx, rule.predicate) if rule.predicate else None
    rows = _base_rows(state, rule.rows_table) if rule.rows_table else []
    if pred is not None:
        rows = [r for r in rows if predicate_matches(pred, lambda v, r=r: r.get(v))]
    table = state.doc.table(rule.rows_table) if rule.rows_table else None
    key = table.key_field if table else None
    old_key = str(obj.datum[key]) if obj.datum and key in (obj.datum or {}) else None
    new = rows[0] if rows else None
    new_key = str(new[key]) if new is not None and key else None
    if old_key != new_key:
        ctx.entry.data.append((obj.id, [new_key] if new_key else [], [old_key] if old_key else []))
    obj.datum = dict(new) if new else None
    if rule.text_template is not None:
        text = rule.text_template.format(**new) if new else ""
        old = obj.channels.text
        if old != text:
            obj.channels.set("text", text)
            ctx.entry.channels.append((obj.id, "text", old, text))


def _derive_rows(ctx: _Ctx, deriv: Derivation) -> list[dict]:
    state = ctx.state
    rows = _base_rows(state, deriv.table)
    p = deriv.params

    def var_value(name):
        var = state.variables.get(p.get(name, ""))
        return var.value if var else None

    if deriv.kind == "hierarchy_level":
        level = var_value("levelVar") or 0
        depth = p.get("depthField", "depth")
        return [r for r in rows if r.get(depth, 0) <= level]
    if deriv.kind == "pivot":
        dims_raw = var_value("dimsVar") or ""
        dims = [d for d in str(dims_raw).split(",") if d]
        measure = p["measure"]
        groups: dict[tuple, float] = {}
        order: list[tuple] = []
        for r in rows:
            gkey = tuple(str(r.get(d)) for d in dims) or ("all",)
            if gkey not in groups:
                groups[gkey] = 0.0
                order.append(gkey)
            groups[gkey] += float(r.get(measure, 0))
        keyf = p.get("keyField", "group")
        valf = p.get("outField", "value")
        return [{keyf: " / ".join(g), valf: groups[g]} for g in order]
    if deriv.kind == "baseline_index":
        # base-100 index: the baseline row maps to 100
        baseline = var_value("baselineVar")
        keyf, valf, outf = p["keyField"], p["valueField"], p["outField"]
        base = next((float(r[valf]) for r in rows if r[keyf] == baseline), None)
        out = []
        for r in rows:
            r2 = dict(r)
            r2[outf] = 0.0 if not base else float(r[valf]) / base * 100.0
            out.append(r2)
        return out
    if deriv.kind == "aggregate":
        fn = str(var_value("fnVar") or "sum")
        groupf, valf = p["groupField"], p["valueField"]
        outf = p.get("outField", valf)
        within = p.get("within")
        setf = p.get("setField")
        if within is not None and setf is not None:
            rows = [r for r in rows if r.get(setf) in within]
        groups: dict[str, list] = {}
        order = []
        for r in rows:
            g = str(r.get(groupf))
            if g not in groups:
                groups[g] = []
                order.append(g)
            groups[g].append(r.get(valf))

        def agg(values):
            if fn == "sum":
                return float(sum(values))
            if fn == "mean":
                return float(sum(values)) / len(values)
            if fn == "min":
                return float(min(values))
            if fn == "max":
                return float(max(values))
            if fn == "count":
                return float(len(values))
            if fn == "and":
                return all(values)
            if fn == "or":
                return any(values)
            raise OpError("E032_KIND_MISMATCH", f"unknown aggregator {fn!r}")

        extra = p.get("extra", {})
        labelf = p.get("labelField", groupf)  # output column for the group label
        keyf = p.get("keyField")
        prefix = p.get("keyPrefix", "")
        out = []
        for g in order:
            row = {**extra, labelf: g, outf: agg(groups[g])}
            if keyf is not None:
                row[keyf] = f"{prefix}{g}"
            out.append(row)
        return out
    if deriv.kind == "bin2d":
        level = int(var_value("levelVar") or 0)
        sizes = p.get("sizes", [50.0])
        size = float(sizes[min(level, len(sizes) - 1)])
        xf, yf = p.get("xField", "x"), p.get("yField", "y")
        bins: dict[tuple, int] = {}
        for r in rows:
            bx = math.floor(float(r[xf]) / size)
            by = math.floor(float(r[yf]) / size)
            bins[(bx, by)] = bins.get((bx, by), 0) + 1
        return [{"id": f"{bx * size:g}:{by * size:g}", "bx": bx * size, "by": by * size,
                 "count": float(n), "size": size}
                for (bx, by), n in sorted(bins.items())]
    raise OpError("E032_KIND_MISMATCH", f"unknown derivation {deriv.kind!r}")


def _encoding_update(ctx: _Ctx, rule: EncodingUpdateRule) -> None:
    state = ctx.state
    enc = state.doc.encoding(rule.encoding)
    if enc is None:
        raise OpError("E001_UNRESOLVED_NAME", f"unknown encoding {rule.encoding!r}")
    new_field = _resolve(ctx, rule.field_source)
    if new_field is None or new_field == enc.field:
        return
    enc.field = new_field
    if rule.rescale:
        sd = state.doc.scale(enc.scale)
        if sd is not None and isinstance(sd.domain, dict):
            sd.domain = {"table": sd.domain["table"], "field": new_field}
        state.graph.scales[enc.scale] = realize_scale(state.doc, sd) if sd else state.graph.scales[enc.scale]
    ctx.entry.channels.extend(apply_encodings(state.graph))


def _position_rule(ctx: _Ctx, rule: PositionRule) -> None:
    if not _when_ok(rule.when, ctx):
        return
    if rule.targets is None:
        targets = [ctx.hit_obj] if ctx.hit_obj is not None else []
    else:
        targets = _targets_of(ctx, rule.targets)
    for t in targets:
        for chan, src in (("x", rule.x), ("y", rule.y)):
            if src is None:
                continue
            value = _resolve_position(ctx, src, t, chan)
            if value is None:
                continue
            old = t.channels.get(chan)
            new = old + value if rule.mode == "offset" else float(value)
            if new != old:
                t.channels.set(chan, new, t.mark_shape)
                ctx.entry.channels.append((t.id, chan, old, new))


def _resolve_position(ctx: _Ctx, src: ValueSource, target: VisualObject, chan: str):
    if src.kind == "preset_position":
        var = ctx.state.variables.get(src.var)
        if var is None:
            return None
        entry = (src.value or {}).get(str(var.value), {})
        pos = entry.get(target.decl_name) or entry.get(target.id)
        if pos is None:
            return None
        return float(pos[0] if src.field == "x" else pos[1])
    return _resolve(ctx, src)


def _visibility_rule(ctx: _Ctx, rule: VisibilityRule) -> None:
    src = rule.source
    for i, t in enumerate(_targets_of_visibility(ctx, rule.targets)):
        if src.kind == "hit_present":
            visible = ctx.hit_obj is not None
        elif src.kind == "predicate_valid":
            var = ctx.state.variables.get(src.var)
            operand = var.value.operand if var is not None and isinstance(var.value, Predicate) else None
            visible = operand is not None
        elif src.kind == "match_var":
            var = ctx.state.variables.get(src.var)
            value = var.value if var else None
            visible = value in (t.id, t.decl_name, i)
        else:
            visible = bool(_resolve(ctx, src))
        if rule.negate:
            visible = not visible
        old = t.channels.visible
        if old != visible:
            t.channels.set("visible", visible)
            ctx.entry.channels.append((t.id, "visible", old, visible))


def _targets_of_visibility(ctx: _Ctx, sel: Selector) -> list[VisualObject]:
    ids = query_objects(ctx.state.graph, sel)
    return [ctx.state.graph.get(i) for i in ids]


_RULE_DISPATCH = {
    SetVarRule: _set_var,
    RunEvaluatorRule: _run_evaluator,
    ApplyScaleRule: _apply_scale_rule,
    ApplyOrderRule: _apply_order_rule,
    ApplyLayoutRule: _apply_layout_rule,
    CameraRule: _camera_rule,
    DataUpdateRule: _data_update,
    EncodingUpdateRule: _encoding_update,
    PositionRule: _position_rule,
    VisibilityRule: _visibility_rule,
}


# ---------------------------------------------------------------------------
# Dispatch


def _resolve_hit(state: RuntimeState, graph: ComponentGraph, raw: HitObject | None
                 ) -> VisualObject | None:
    """Apply the unit's within/lift constraints to the shared raw hit."""
    if raw is None or graph.hit_rule is None:
        return None
    obj = state.graph.index.get(raw.object_id)
    if obj is None:
        return None
    rule = graph.hit_rule
    if rule.within is not None:
        cur = obj
        ok = False
        while cur is not None:
            parent = state.graph.parent(cur.id)
            if parent is not None and parent.kind == "collection" and parent.decl_name == rule.within:
                ok = True
                break
            cur = parent
        if not ok:
            return None
    if rule.lift is not None:
        cur = obj
        while cur is not None:
            parent = state.graph.parent(cur.id)
            if parent is not None and parent.decl_name == rule.lift:
                return cur
            cur = parent
        return None
    return obj


def _effective_events(state: RuntimeState, e: Event) -> list[Event]:
    """Drag synthesis: pointer_down + >=3 px of travel becomes drag events."""
    out = [e]
    drag = state.drag
    if e.kind == "pointer_down":
        state.drag = DragState(origin=(e.x or 0, e.y or 0), current=(e.x or 0, e.y or 0),
                               prev=(e.x or 0, e.y or 0), scene=_scene_at(state, e), pending=True)
    elif e.kind == "pointer_move" and drag is not None:
        drag.prev = drag.current
        drag.current = (e.x or 0, e.y or 0)
        dist = math.hypot(drag.current[0] - drag.origin[0], drag.current[1] - drag.origin[1])
        if not drag.active and dist >= DRAG_THRESHOLD:
            drag.active = True
            out.append(replace(e, kind="drag_start", x=drag.origin[0], y=drag.origin[1], dx=0.0, dy=0.0))
            out.append(replace(e, kind="drag_move",
                               dx=drag.current[0] - drag.origin[0], dy=drag.current[1] - drag.origin[1]))
        elif drag.active:
            out.append(replace(e, kind="drag_move",
                               dx=drag.current[0] - drag.prev[0], dy=drag.current[1] - drag.prev[1]))
    elif e.kind == "pointer_up":
        if drag is not None and drag.active:
            out.append(replace(e, kind="drag_end",
                               dx=(e.x or 0) - drag.current[0], dy=(e.y or 0) - drag.current[1]))
        state.drag = None
    elif e.kind == "drag_start":
        state.drag = DragState(origin=(e.x or 0, e.y or 0), current=(e.x or 0, e.y or 0),
                               prev=(e.x or 0, e.y or 0), scene=_scene_at(state, e),
                               active=True, pending=False)
    elif e.kind in ("drag_move", "drag_end") and drag is not None:
        drag.prev = drag.current
        drag.current = ((e.x if e.x is not None else drag.current[0] + (e.dx or 0)),
                        (e.y if e.y is not None else drag.current[1] + (e.dy or 0)))
    return out


def _scene_at(state: RuntimeState, e: Event) -> str | None:
    if e.x is None or e.y is None:
        return None
    for sc in state.doc.scenes:
        obj = state.graph.index.get(sc.name)
        if obj is not None and obj.visible and _scene_contains(state.graph, sc.name, e.x, e.y):
            return sc.name
    return None


def dispatch_event(state: RuntimeState, compiled: list[CompiledInteraction], e: Event) -> TraceEntry:
    """Route one event: listener match, one shared hit test per scene, then
    every matched graph's rules in document order."""
    if e.tick <= state.tick:
        raise OpError("E003_WRONG_KIND", f"tick {e.tick} does not advance past {state.tick}")
    entry = TraceEntry(tick=e.tick)
    events = _effective_events(state, e)

    for ev in events:
        matched = [u for u in compiled if _matches(state, u, ev)]
        hits: dict[str, HitObject | None] = {}
        dragging = ev.kind in ("drag_start", "drag_move", "drag_end") and state.drag is not None
        if dragging and not state.drag.hit_done and state.drag.scene is not None:
            # the grabbed object is whatever sat under the drag origin
            obj = state.graph.get(state.drag.scene)
            lx = state.drag.origin[0] - obj.channels.x
            ly = state.drag.origin[1] - obj.channels.y
            state.drag.hit = hit_test(state.graph, state.camera(state.drag.scene),
                                      lx, ly, state.drag.scene)
            state.drag.hit_done = True
        for unit in matched:
            graph = unit.graph
            scene = state.doc.listener_scene(graph.listener_id)
            raw_hit: HitObject | None = None
            if graph.hit_rule is not None and scene is not None:
                if dragging:
                    raw_hit = state.drag.hit
                else:
                    if scene.name not in hits:
                        if ev.x is not None and ev.y is not None:
                            obj = state.graph.get(scene.name)
                            lx, ly = ev.x - obj.channels.x, ev.y - obj.channels.y
                            hits[scene.name] = hit_test(state.graph, state.camera(scene.name),
                                                        lx, ly, scene.name)
                        else:
                            hits[scene.name] = None
                    raw_hit = hits[scene.name]
            hit_obj = _resolve_hit(state, graph, raw_hit)
            ctx = _Ctx(state, unit, ev, entry, raw_hit, hit_obj)
            if unit.unit_name not in entry.matched:
                entry.matched.append(unit.unit_name)
            if hit_obj is not None and entry.hit is None:
                entry.hit = hit_obj.id
            try:
                for rule in unit.graph.rules:
                    _RULE_DISPATCH[type(rule)](ctx, rule)
            except OpError as exc:
                entry.errors.append((exc.code, str(exc)))

    state.tick = e.tick
    _assert_channel_invariants(state)
    return entry


def _assert_channel_invariants(state: RuntimeState) -> None:
    for obj in state.graph.walk():
        ch = obj.channels
        assert 0.0 <= ch.opacity <= 1.0, f"{obj.id}: opacity {ch.opacity}"
        assert ch.radius >= 0 and ch.strokeWidth >= 0, f"{obj.id}: negative size"
        if obj.mark_shape not in ("line", "path"):  # segments carry signed deltas
            assert ch.width >= 0 and ch.height >= 0, f"{obj.id}: negative size"


def run_script(doc: Document, script: EventScript, registry=None) -> tuple[Trace, RuntimeState]:
    """Compile, build the initial state, fold dispatch over the script."""
    compiled, diags = compile_document(doc, registry)
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        raise CompileFailure(errors)
    state = initial_state(doc, compiled)
    trace = Trace(name=script.name)
    for e in script.events:
        trace.entries.append(dispatch_event(state, compiled, e))
    return trace, state


def state_snapshot(state: RuntimeState) -> dict:
    """JSON-ready snapshot of the final runtime state: per-object channels,
    cameras, state variables and the last processed tick."""
    objects = {}
    for obj in state.graph.walk():
        ch = obj.channels
        objects[obj.id] = {
            "kind": obj.kind,
            "channels": {name: ch.get(name) for name in
                         ("x", "y", "width", "height", "radius", "innerRadius",
                          "startAngle", "endAngle", "fill", "stroke", "opacity",
                          "strokeWidth", "text", "order", "visible")},
            **({"rowKey": obj.row_key} if obj.row_key is not None else {}),
        }
    cameras = {
        name: {"focusX": c.focus_x, "focusY": c.focus_y, "zoom": c.zoom,
               "rotation": c.rotation, "viewportW": c.viewport_w, "viewportH": c.viewport_h}
        for name, c in sorted(state.cameras.items())
    }
    variables = {name: var.snapshot() for name, var in sorted(state.variables.items())}
    return {"tick": state.tick, "objects": objects, "cameras": cameras, "variables": variables}


def visible_mark_keys(state: RuntimeState, collection_id: str) -> list[str]:
    """Row keys of the collection members currently visible (used by the
    two dynamic-queries compilation paths to prove equivalence)."""
    coll = state.graph.index.get(collection_id)
    if coll is None:
        return []
    return sorted(state.graph.get(c).row_key for c in coll.children
                  if state.graph.get(c).channels.visible)


# ---------------------------------------------------------------------------
# SVG snapshots


def render_svg(state: RuntimeState, scene_id: str) -> str:
    """Byte-stable SVG for one scene: document element order, camera as the
    root view box, numbers at fixed 3-decimal precision."""
    graph = state.graph
    scene = graph.get(scene_id)  # raises E001 for unknown scenes
    cam = state.cameras.get(scene_id)
    w, h = scene.channels.width, scene.channels.height
    if cam is not None:
        vx, vy, vw, vh = cam.view_box()
    else:
        vx, vy, vw, vh = 0.0, 0.0, w, h
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'viewBox="{_fmt(vx)} {_fmt(vy)} {_fmt(vw)} {_fmt(vh)}">'
    ]
    rotated = cam is not None and cam.rotation != 0.0
    if rotated:
        deg = cam.rotation * 180.0 / math.pi
        parts.append(f'<g transform="rotate({_fmt(-deg)} {_fmt(cam.focus_x)} {_fmt(cam.focus_y)})">')

    def emit(oid: str):
        obj = graph.get(oid)
        if obj.kind in ("axis", "legend"):
            parts.append(axis_markup(graph, obj))
            return
        if obj.kind == "mark":
            el = svg_element(graph, obj)
            if el:
                parts.append(el)
            return
        hidden = ' display="none"' if not obj.visible else ""
        parts.append(f'<g id="{obj.id}"{hidden}>')
        if obj.kind == "annotation" and obj.mark_shape:
            el = svg_element(graph, obj)
            if el:
                parts.append(el)
        for cid in obj.children:
            emit(cid)
        parts.append("</g>")

    for cid in scene.children:
        emit(cid)
    if rotated:
        parts.append("</g>")
    parts.append("</svg>")
    return "".join(parts)
