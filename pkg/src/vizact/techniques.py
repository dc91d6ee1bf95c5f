"""Per-technique compilation recipes: how each registered technique wires an
interaction unit into a component graph, with defaults filled from the
document context and overridable through the unit's bindings.
"""

from __future__ import annotations

from .graph import (
    ApplyLayoutRule,
    ApplyOrderRule,
    ApplyScaleRule,
    CameraRule,
    ComponentGraph,
    DataUpdateRule,
    Derivation,
    HitRule,
    PositionRule,
    RunEvaluatorRule,
    SetVarRule,
    ValueSource,
    VisibilityRule,
    unit_scope,
)
from .interaction import EvaluationScale, StateVariable, TargetEvaluator
from .model import (
    E050_MISSING_BINDING,
    E051_SCOPE_MISMATCH,
    DataTable,
    Document,
    InteractionSpec,
    ObjectDecl,
    OpError,
    Predicate,
    SceneSpec,
    Selector,
)
from .registry import Registry

DEFAULT_TRUE_PROPS = {"stroke": "#e45756", "strokeWidth": 3}
DEFAULT_FALSE_PROPS = {"opacity": 0.3}
WHEEL_ZOOM_STEP = 1.25
DOUBLE_CLICK_ZOOM = 2.0


def _missing(what: str) -> OpError:
    return OpError(E050_MISSING_BINDING, f"cannot instantiate: {what}")


def _collection_for(doc: Document, unit: InteractionSpec) -> tuple[SceneSpec, ObjectDecl]:
    """The collection providing the unit's targets (for key fields, tables)."""
    sel = unit.target
    names: list[str] = []
    if sel.kind == "collection":
        names = [sel.value]
    elif sel.kind == "names":
        names = list(sel.value)
    elif sel.kind == "scene":
        sc = doc.scene(sel.value)
        if sc is not None:
            for od in sc.objects:
                if od.kind == "collection":
                    return sc, od
    for nm in names:
        hit = doc.object_decl(nm)
        if hit is not None and hit[1].kind == "collection":
            return hit
        if hit is not None:  # a member or part: use its enclosing collection
            base = doc.object_decl(nm.split("/")[0])
            if base is not None and base[1].kind == "collection":
                return base
        sc = doc.scene(nm)
        if sc is not None:
            for od in sc.objects:
                if od.kind == "collection":
                    return sc, od
    lscene = doc.listener_scene(unit.on.listener)
    for sc in ([lscene] if lscene else []) + doc.scenes:
        if sc is None:
            continue
        for od in sc.objects:
            if od.kind == "collection":
                return sc, od
    raise _missing(f"unit {unit.name!r} has no target collection")


def _table_of(doc: Document, decl: ObjectDecl) -> DataTable:
    table = doc.table(decl.source_table)
    if table is None:
        raise _missing(f"collection {decl.name!r} has no data table")
    return table


def _key_field(doc: Document, unit: InteractionSpec) -> str:
    if "field" in unit.bindings:
        return unit.bindings["field"]
    _, decl = _collection_for(doc, unit)
    table = _table_of(doc, decl)
    return decl.key or table.key_field

def _value_field(table: DataTable) -> str:
    for f, kind in table.fields:
        if kind == "number":
            return f
    return table.fields[0][0]


def _positional_encoding(doc: Document, coll_name: str, axis: str):
    """(scale id, field) of the encoding feeding the x or y channel."""
    for sc in doc.scenes:
        for e in sc.encodings:
            if e.target == coll_name and e.channel == axis:
                return e.scale, e.field
    return None


def _bool_scale(b: dict, true_default=None, false_default=None) -> EvaluationScale:
    return EvaluationScale(
        input_kind="boolean",
        true_props=dict(b.get("trueProps", true_default if true_default is not None else DEFAULT_TRUE_PROPS)),
        false_props=dict(b.get("falseProps", false_default if false_default is not None else DEFAULT_FALSE_PROPS)),
    )


def _is_pointer(event: str) -> bool:
    return event in ("pointer_down", "pointer_up", "pointer_move", "click",
                     "double_click", "drag_start", "drag_move", "drag_end")


def _base(unit: InteractionSpec) -> ComponentGraph:
    return ComponentGraph(event_binding=unit.on, listener_id=unit.on.listener)


def _var_name(unit: InteractionSpec, suffix: str) -> str:
    return unit.bindings.get("var", f"{unit.name}.{suffix}")


# --- select family ----------------------------------------------------------


def _point_like(unit: InteractionSpec, doc: Document, op: str, mode: str) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    key = _key_field(doc, unit)
    var = _var_name(unit, "sel")
    g.state_variables.append(StateVariable(name=var, kind="predicate", value=Predicate(key, op, None)))
    if _is_pointer(unit.on.event):
        g.hit_rule = HitRule(within=b.get("within"), lift=b.get("lift"))
        g.rules.append(SetVarRule(var=var, source=ValueSource(kind="hit_field", field=key),
                                  mode=mode, when="hit_present"))
    else:
        g.rules.append(SetVarRule(var=var, source=ValueSource(kind="event_value"), mode=mode))
    g.rules.append(RunEvaluatorRule(id="ev1", evaluator=TargetEvaluator(kind="predicate", predicate=var)))
    g.rules.append(ApplyScaleRule(evaluator="ev1", scale=_bool_scale(b)))
    return g


def point_select(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    return _point_like(unit, doc, op="eq", mode="set")


def multi_select(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    return _point_like(unit, doc, op="in",
                       mode="toggle_in_list" if _is_pointer(unit.on.event) else "set")


def _brush_predicate(unit: InteractionSpec, doc: Document, g: ComponentGraph) -> str:
    b = unit.bindings
    axis = b.get("axis", "x")
    _, decl = _collection_for(doc, unit)
    enc = _positional_encoding(doc, decl.name, axis)
    if enc is None:
        raise _missing(f"no positional encoding on {decl.name!r} to invert")
    scale_id, fieldname = enc
    sd = doc.scale(scale_id)
    op = "between" if sd is not None and sd.kind == "linear" else "in"
    var = _var_name(unit, "range")
    g.state_variables.append(StateVariable(name=var, kind="predicate",
                                           value=Predicate(b.get("field", fieldname), op, None)))
    g.rules.append(SetVarRule(var=var, source=ValueSource(kind="brush_range", axis=axis, scale=scale_id)))
    return var


def range_select(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    var = _brush_predicate(unit, doc, g)
    g.rules.append(RunEvaluatorRule(id="ev1", evaluator=TargetEvaluator(kind="predicate", predicate=var)))
    g.rules.append(ApplyScaleRule(evaluator="ev1", scale=_bool_scale(unit.bindings)))
    return g


def generalized_select(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    key = _key_field(doc, unit)
    expansion = b.get("expansion", {})
    mode = expansion.get("mode", "ancestors")
    exp_field = expansion.get("field", "parent")
    var = _var_name(unit, "sel")
    g.hit_rule = HitRule(within=b.get("within"))
    g.state_variables.append(StateVariable(name=var, kind="predicate", value=Predicate(key, "in", None)))
    g.rules.append(SetVarRule(var=var,
                              source=ValueSource(kind="hit_expansion", mode=mode, field=exp_field),
                              when="hit_present"))
    g.rules.append(RunEvaluatorRule(id="ev1", evaluator=TargetEvaluator(kind="predicate", predicate=var)))
    g.rules.append(ApplyScaleRule(evaluator="ev1", scale=_bool_scale(b)))
    return g


def linked_select(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    if unit.on.event.startswith("drag"):
        return range_select(unit, doc)
    g = _base(unit)
    b = unit.bindings
    key = _key_field(doc, unit)
    var = _var_name(unit, "sel")
    g.hit_rule = HitRule(within=b.get("within"))
    g.state_variables.append(StateVariable(name=var, kind="predicate", value=Predicate(key, "eq", None)))
    g.rules.append(SetVarRule(var=var, source=ValueSource(kind="hit_field", field=key), when="hit_present"))
    g.rules.append(RunEvaluatorRule(id="ev1", evaluator=TargetEvaluator(kind="predicate", predicate=var)))
    g.rules.append(ApplyScaleRule(evaluator="ev1", scale=_bool_scale(b)))
    return g


def deselect(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    key = _key_field(doc, unit)
    var = b.get("var", "sel")
    g.hit_rule = HitRule()
    g.state_variables.append(StateVariable(name=var, kind="predicate",
                                           value=Predicate(b.get("field", key), b.get("op", "eq"), None)))
    when = "hit_present" if b.get("mode") == "remove" else "hit_absent"
    if b.get("mode") == "remove":
        g.rules.append(SetVarRule(var=var, source=ValueSource(kind="hit_field", field=key),
                                  mode="remove_from_list", when=when))
    else:
        g.rules.append(SetVarRule(var=var, source=ValueSource(kind="const", value=None), when=when))
    g.rules.append(RunEvaluatorRule(id="ev1", when=when,
                                    evaluator=TargetEvaluator(kind="predicate", predicate=var)))
    g.rules.append(ApplyScaleRule(evaluator="ev1", scale=_bool_scale(
        b, false_default={"stroke": "none", "strokeWidth": 1, "opacity": 1.0},
        true_default={}), when=when))
    return g


# --- annotate family --------------------------------------------------------


def _annotation_target(unit: InteractionSpec) -> Selector:
    return unit.target


def show_hide_reference_lines(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    target = _annotation_target(unit)
    if b.get("branch") == "hit":
        g.hit_rule = HitRule(within=b.get("within"))
        g.rules.append(VisibilityRule(targets=target, source=ValueSource(kind="hit_present")))
        g.rules.append(PositionRule(targets=target, x=ValueSource(kind="hit_center", field="x"),
                                    y=ValueSource(kind="hit_center", field="y")))
        return g
    _, decl = _collection_for(doc, unit)
    enc = _positional_encoding(doc, decl.name, b.get("axis", "x"))
    if enc is None:
        raise _missing(f"no positional encoding on {decl.name!r} for the reference line")
    scale_id, fieldname = enc
    var = _var_name(unit, "ref")
    g.state_variables.append(StateVariable(name=var, kind="predicate",
                                           value=Predicate(fieldname, "eq", None)))
    g.rules.append(SetVarRule(var=var, source=ValueSource(
        kind="invert_scale", scale=scale_id, source=ValueSource(kind="event_x"))))
    g.rules.append(VisibilityRule(targets=target, source=ValueSource(kind="predicate_valid", var=var)))
    g.rules.append(PositionRule(targets=target, x=ValueSource(kind="event_x")))
    return g


def show_hide_tooltip_container(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    target = _annotation_target(unit)
    g.hit_rule = HitRule(within=b.get("within"))
    g.rules.append(VisibilityRule(targets=target, source=ValueSource(kind="hit_present")))
    g.rules.append(PositionRule(targets=target, x=ValueSource(kind="event_x"),
                                y=ValueSource(kind="event_y")))
    return g


# --- reconfigure family -----------------------------------------------------


def reposition(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    if b.get("branch") == "state_variable" or unit.on.event == "ui_change":
        var = _var_name(unit, "preset")
        positions = b.get("positions")
        if not positions:
            raise _missing("reposition via state variable needs a positions map")
        g.state_variables.append(StateVariable(name=var, kind="scalar", value=b.get("initial")))
        g.rules.append(SetVarRule(var=var, source=ValueSource(kind="event_value")))
        g.rules.append(PositionRule(targets=unit.target,
                                    x=ValueSource(kind="preset_position", var=var, value=positions, field="x"),
                                    y=ValueSource(kind="preset_position", var=var, value=positions, field="y")))
        return g
    if unit.on.event == "scroll":
        g.rules.append(PositionRule(targets=unit.target, y=ValueSource(kind="event_delta"), mode="offset"))
        return g
    g.rules.append(PositionRule(targets=unit.target, x=ValueSource(kind="event_x"),
                                y=ValueSource(kind="event_y")))
    return g


def sort(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    _, decl = _collection_for(doc, unit)
    table = _table_of(doc, decl)
    var = _var_name(unit, "orderBy")
    g.state_variables.append(StateVariable(
        name=var, kind="field_reference", value=b.get("initial", _value_field(table))))
    if unit.on.event == "ui_change":
        g.rules.append(SetVarRule(var=var, source=ValueSource(kind="event_value")))
    g.rules.append(RunEvaluatorRule(id="ev1", evaluator=TargetEvaluator(
        kind="order", field_ref=var, direction=b.get("direction", "asc"))))
    g.rules.append(ApplyOrderRule(evaluator="ev1", channel=b.get("channel", "x")))
    return g


def organize_views(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    g.rules.append(RunEvaluatorRule(
        id="ev1",
        evaluator=TargetEvaluator(kind="layout", layout_policy="grid_swap", anchor="drag"),
        targets=Selector("object_kind", "scene"),
    ))
    g.rules.append(ApplyLayoutRule(evaluator="ev1"))
    return g


# --- steer family -----------------------------------------------------------


def _camera_scene(unit: InteractionSpec, doc: Document) -> str:
    sc = doc.listener_scene(unit.on.listener)
    if unit.target.kind == "scene":
        sc = doc.scene(unit.target.value) or sc
    if sc is None:
        raise _missing("no scene for camera")
    if not sc.camera_enabled:
        raise _missing(f"enable camera on scene {sc.name!r}")
    return sc.name


def geometric_zoom(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    scene = _camera_scene(unit, doc)
    if unit.on.event == "double_click":
        factor = ValueSource(kind="const", value=unit.bindings.get("factor", DOUBLE_CLICK_ZOOM))
    else:
        factor = ValueSource(kind="wheel_zoom_factor", step=unit.bindings.get("step", WHEEL_ZOOM_STEP))
    g.rules.append(CameraRule(scene=scene, op="zoom", factor=factor,
                              anchor=ValueSource(kind="event_point")))
    return g


def pan(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    scene = _camera_scene(unit, doc)
    g.rules.append(CameraRule(scene=scene, op="pan", delta=ValueSource(kind="pointer_delta")))
    return g


def _scene_targets(unit: InteractionSpec, doc: Document) -> Selector:
    if unit.target.kind in ("names", "scene"):
        names = unit.target.value if unit.target.kind == "names" else [unit.target.value]
        if all(doc.scene(nm) is not None for nm in names) and names:
            return Selector("names", list(names))
    return Selector("object_kind", "scene")


def toggle_views(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    if len(doc.scenes) < 2:
        raise OpError(E051_SCOPE_MISMATCH, "toggle_views needs at least two scenes")
    if b.get("branch") == "camera":
        views = b.get("views")
        if not views:
            raise _missing("camera-driven toggling needs a views preset map")
        scene = _camera_scene(unit, doc)
        g.rules.append(CameraRule(scene=scene, op="focus",
                                  focus=ValueSource(kind="event_value"), presets=views))
        return g
    var = _var_name(unit, "activeView")
    g.state_variables.append(StateVariable(name=var, kind="scalar",
                                           value=b.get("initial", doc.scenes[0].name)))
    g.rules.append(SetVarRule(var=var, source=ValueSource(kind="event_value")))
    g.rules.append(VisibilityRule(targets=_scene_targets(unit, doc),
                                  source=ValueSource(kind="match_var", var=var)))
    return g


def navigate_scene_section(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    if len(doc.scenes) < 2:
        raise OpError(E051_SCOPE_MISMATCH, "navigation needs at least two scenes")
    current = b.get("var", f"{unit.name}.currentScene")
    g.state_variables.append(StateVariable(
        name=current, kind="component_reference", value=b.get("initial", doc.scenes[0].name),
        label=b.get("label", "current scene")))
    if unit.on.event in ("scroll", "wheel"):
        pos = f"{unit.name}.scrollPos"
        g.state_variables.append(StateVariable(name=pos, kind="scalar", value=0.0))
        g.rules.append(SetVarRule(var=pos, source=ValueSource(kind="event_delta"), mode="accumulate"))
        g.rules.append(SetVarRule(var=current, source=ValueSource(kind="scene_threshold", var=pos)))
    else:
        g.rules.append(SetVarRule(var=current, source=ValueSource(kind="event_value")))
    g.rules.append(VisibilityRule(targets=_scene_targets(unit, doc),
                                  source=ValueSource(kind="match_var", var=current)))
    return g


# --- encode family ----------------------------------------------------------


def _encoding_binding(unit: InteractionSpec, doc: Document) -> str:
    b = unit.bindings
    if "encoding" in b:
        if doc.encoding(b["encoding"]) is None:
            raise _missing(f"unknown encoding {b['encoding']!r}")
        return b["encoding"]
    _, decl = _collection_for(doc, unit)
    for sc in doc.scenes:
        for e in sc.encodings:
            if e.target == decl.name:
                return e.id
    raise _missing("no encoding to update")


def change_field_in_encoding(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    from .graph import EncodingUpdateRule

    g = _base(unit)
    g.rules.append(EncodingUpdateRule(encoding=_encoding_binding(unit, doc),
                                      field_source=ValueSource(kind="event_value"), rescale=True))
    return g


def change_chart_type(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    from .graph import EncodingUpdateRule

    g = _base(unit)
    b = unit.bindings
    variants = b.get("variants")
    if not variants:
        raise _missing("change_chart_type needs a variants map {type: {encoding: field}}")
    var = _var_name(unit, "chartType")
    g.state_variables.append(StateVariable(name=var, kind="scalar",
                                           value=b.get("initial"), label=b.get("label", "chart type")))
    g.rules.append(SetVarRule(var=var, source=ValueSource(kind="event_value")))
    encodings = sorted({e for m in variants.values() for e in m})
    for enc in encodings:
        lookup = {ctype: m[enc] for ctype, m in variants.items() if enc in m}
        g.rules.append(EncodingUpdateRule(encoding=enc,
                                          field_source=ValueSource(kind="lookup", var=var, value=lookup),
                                          rescale=True))
    return g


# --- enter/exit family ------------------------------------------------------


def _row_defaults(table: DataTable, overrides: dict) -> dict[str, ValueSource]:
    out: dict[str, ValueSource] = {}
    for f, kind in table.fields:
        if f in overrides:
            out[f] = ValueSource(kind="const", value=overrides[f])
        else:
            default = {"number": 0, "string": "", "boolean": False, "date": "1970-01-01"}[kind]
            out[f] = ValueSource(kind="const", value=default)
    return out


def click_to_add_data_points(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    _, decl = _collection_for(doc, unit)
    table = _table_of(doc, decl)
    fields = _row_defaults(table, b.get("defaults", {}))
    for axis in ("x", "y"):
        enc = _positional_encoding(doc, decl.name, axis)
        if enc is not None:
            scale_id, fieldname = enc
            fields[fieldname] = ValueSource(kind="invert_scale", scale=scale_id,
                                            source=ValueSource(kind=f"event_{axis}"))
    keyf = decl.key or table.key_field
    if fields[keyf].kind == "const":
        fields[keyf] = ValueSource(kind="auto_key")
    g.rules.append(DataUpdateRule(target=decl.name, update="append_row", row_fields=fields))
    return g


def add_object(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    _, decl = _collection_for(doc, unit)
    table = _table_of(doc, decl)
    fields = _row_defaults(table, b.get("defaults", {}))
    keyf = b.get("field", decl.key or table.key_field)
    fields[keyf] = ValueSource(kind="event_value")
    g.rules.append(DataUpdateRule(target=decl.name, update="append_row", row_fields=fields))
    return g


# --- filter family ----------------------------------------------------------


_CONTROL_OPS = {"slider": "lte", "dropdown": "eq", "checkbox": "in", "scroller": "lte"}


def dynamic_queries(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    _, decl = _collection_for(doc, unit)
    table = _table_of(doc, decl)
    ctrl = doc.control(unit.on.listener)
    op = b.get("op", _CONTROL_OPS.get(ctrl[1].kind, "eq") if ctrl else "eq")
    fieldname = b.get("field", _value_field(table))
    var = _var_name(unit, "query")
    g.state_variables.append(StateVariable(name=var, kind="predicate",
                                           value=Predicate(fieldname, op, b.get("initial"))))
    g.rules.append(SetVarRule(var=var, source=ValueSource(kind="event_value")))
    if b.get("path", "evaluator") == "target_data":
        g.rules.append(DataUpdateRule(target=decl.name, update="filter_by_predicate", predicate=var))
    else:
        g.rules.append(RunEvaluatorRule(id="ev1", evaluator=TargetEvaluator(kind="predicate", predicate=var)))
        g.rules.append(ApplyScaleRule(evaluator="ev1", scale=_bool_scale(
            b, true_default={"visible": True}, false_default={"visible": False})))
    return g


def details_on_demand(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    hit_coll = b.get("collection")
    if hit_coll is None:
        lscene = doc.listener_scene(unit.on.listener)
        hit_coll = next((od.name for od in (lscene.objects if lscene else []) if od.kind == "collection"), None)
    if hit_coll is None:
        raise _missing("details_on_demand needs a collection to hit")
    coll = doc.object_decl(hit_coll)
    table = _table_of(doc, coll[1])
    key = b.get("field", coll[1].key or table.key_field)
    tooltip = unit.target
    if tooltip.kind != "names":
        raise _missing("details_on_demand targets a tooltip annotation by name")
    var = _var_name(unit, "detail")
    g.hit_rule = HitRule(within=b.get("within", hit_coll))
    g.state_variables.append(StateVariable(name=var, kind="predicate", value=Predicate(key, "eq", None)))
    g.rules.append(SetVarRule(var=var, source=ValueSource(kind="hit_field", field=key), when="hit_present"))
    g.rules.append(SetVarRule(var=var, source=ValueSource(kind="const", value=None), when="hit_absent"))
    for nm in tooltip.value:
        g.rules.append(DataUpdateRule(target=nm, update="replace_rows", predicate=var,
                                      rows_table=table.name, text_template=b.get("textTemplate")))
    return g


def cross_filter(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    _, target_decl = _collection_for(doc, unit)
    if unit.on.event.startswith("drag"):
        var = _brush_predicate_for_listener(unit, doc, g)
    else:
        table = _table_of(doc, target_decl)
        fieldname = b.get("field", table.key_field)
        var = _var_name(unit, "query")
        g.state_variables.append(StateVariable(name=var, kind="predicate",
                                               value=Predicate(fieldname, b.get("op", "eq"), None)))
        if b.get("useHit"):
            g.hit_rule = HitRule(within=b.get("within"))
            g.rules.append(SetVarRule(var=var, source=ValueSource(kind="hit_field", field=fieldname),
                                      when="hit_present"))
        else:
            g.rules.append(SetVarRule(var=var, source=ValueSource(kind="event_value")))
    if b.get("path", "evaluator") == "target_data":
        g.rules.append(DataUpdateRule(target=target_decl.name, update="filter_by_predicate", predicate=var))
    else:
        g.rules.append(RunEvaluatorRule(id="ev1", evaluator=TargetEvaluator(kind="predicate", predicate=var)))
        g.rules.append(ApplyScaleRule(evaluator="ev1", scale=_bool_scale(
            b, true_default={"visible": True}, false_default={"visible": False})))
    return g


def _brush_predicate_for_listener(unit: InteractionSpec, doc: Document, g: ComponentGraph) -> str:
    """Brush in the listener scene, predicate over the shared field."""
    b = unit.bindings
    axis = b.get("axis", "x")
    lscene = doc.listener_scene(unit.on.listener)
    coll = next((od for od in (lscene.objects if lscene else []) if od.kind == "collection"), None)
    if coll is None:
        raise _missing("no collection in the brushed scene")
    enc = _positional_encoding(doc, coll.name, axis)
    if enc is None:
        raise _missing(f"no positional encoding on {coll.name!r} to invert")
    scale_id, fieldname = enc
    sd = doc.scale(scale_id)
    op = "between" if sd is not None and sd.kind == "linear" else "in"
    var = _var_name(unit, "range")
    g.state_variables.append(StateVariable(name=var, kind="predicate",
                                           value=Predicate(b.get("field", fieldname), op, None)))
    g.rules.append(SetVarRule(var=var, source=ValueSource(kind="brush_range", axis=axis, scale=scale_id)))
    return var


# --- abstract/elaborate family ----------------------------------------------


def _recompute(unit: InteractionSpec, doc: Document, derivation: Derivation,
               var: StateVariable) -> ComponentGraph:
    g = _base(unit)
    _, decl = _collection_for(doc, unit)
    g.state_variables.append(var)
    g.rules.append(SetVarRule(var=var.name, source=ValueSource(kind="event_value")))
    g.rules.append(DataUpdateRule(target=decl.name, update="recompute", derivation=derivation))
    return g


def move_up_down_hierarchy(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    b = unit.bindings
    _, decl = _collection_for(doc, unit)
    table = _table_of(doc, decl)
    var = _var_name(unit, "level")
    deriv = Derivation(kind="hierarchy_level", table=table.name, params={
        "levelVar": var, "depthField": b.get("depthField", "depth"),
        **({"direction": b["direction"]} if "direction" in b else {}),
    })
    return _recompute(unit, doc, deriv, StateVariable(
        name=var, kind="scalar", value=b.get("initial", 1), label=b.get("label", "abstraction level")))


def drill_down_roll_up(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    b = unit.bindings
    _, decl = _collection_for(doc, unit)
    table = _table_of(doc, decl)
    var = _var_name(unit, "dims")
    source = b.get("sourceTable")
    if source is None:
        raise _missing("drill_down_roll_up needs the detail table to aggregate")
    deriv = Derivation(kind="pivot", table=source, params={
        "dimsVar": var, "measure": b.get("measure", _value_field(doc.table(source) or table)),
        "agg": b.get("agg", "sum"), "keyField": decl.key or table.key_field,
    })
    return _recompute(unit, doc, deriv, StateVariable(
        name=var, kind="scalar", value=b.get("initial", ""), label=b.get("label", "dimensions")))


# --- derive family ----------------------------------------------------------


def recompute_field_new_baseline(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    b = unit.bindings
    _, decl = _collection_for(doc, unit)
    table = _table_of(doc, decl)
    keyf = decl.key or table.key_field
    var = _var_name(unit, "baseline")
    deriv = Derivation(kind="baseline_index", table=table.name, params={
        "baselineVar": var, "keyField": b.get("keyField", keyf),
        "valueField": b.get("valueField", _value_field(table)),
        "outField": b.get("outField", b.get("valueField", _value_field(table))),
    })
    initial = b.get("initial", table.rows[0][keyf] if table.rows else None)
    return _recompute(unit, doc, deriv, StateVariable(
        name=var, kind="scalar", value=initial, label=b.get("label", "baseline")))


def change_aggregator(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    b = unit.bindings
    _, decl = _collection_for(doc, unit)
    table = _table_of(doc, decl)
    source = b.get("sourceTable", table.name)
    var = _var_name(unit, "agg")
    deriv = Derivation(kind="aggregate", table=source, params={
        "fnVar": var, "groupField": b.get("groupField", decl.key or table.key_field),
        "labelField": b.get("labelField", decl.key or table.key_field),
        "valueField": b.get("valueField", _value_field(doc.table(source) or table)),
        "outField": b.get("outField", _value_field(table)),
    })
    return _recompute(unit, doc, deriv, StateVariable(
        name=var, kind="scalar", value=b.get("initial", "sum"), label=b.get("label", "aggregator")))


# --- multi-intent -------------------------------------------------------------


def semantic_zoom(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    scene = _camera_scene(unit, doc)
    _, decl = _collection_for(doc, unit)
    points = b.get("pointsTable")
    if points is None:
        raise _missing("semantic_zoom needs the raw points table to bin")
    var = _var_name(unit, "binLevel")
    g.state_variables.append(StateVariable(name=var, kind="scalar", value=b.get("initial", 0),
                                           label=b.get("label", "bin level")))
    g.rules.append(CameraRule(scene=scene, op="zoom",
                              factor=ValueSource(kind="wheel_zoom_factor", step=b.get("step", WHEEL_ZOOM_STEP)),
                              anchor=ValueSource(kind="event_point")))
    g.rules.append(SetVarRule(var=var, source=ValueSource(
        kind="zoom_level", scale=scene, value=b.get("thresholds", [2.0]))))
    g.rules.append(DataUpdateRule(target=decl.name, update="recompute", derivation=Derivation(
        kind="bin2d", table=points, params={
            "levelVar": var, "xField": b.get("xField", "x"), "yField": b.get("yField", "y"),
            "sizes": b.get("binSizes", [50.0, 25.0]),
        })))
    return g


def direct_walk(unit: InteractionSpec, doc: Document) -> ComponentGraph:
    g = _base(unit)
    b = unit.bindings
    _, target_decl = _collection_for(doc, unit)
    table = _table_of(doc, target_decl)
    key = b.get("field", target_decl.key or table.key_field)
    target_scene = doc.object_decl(target_decl.name)[0]
    if not target_scene.camera_enabled:
        raise _missing(f"enable camera on scene {target_scene.name!r}")
    var = _var_name(unit, "walk")
    g.hit_rule = HitRule(within=b.get("within"))
    g.state_variables.append(StateVariable(name=var, kind="predicate", value=Predicate(key, "eq", None)))
    g.rules.append(SetVarRule(var=var, source=ValueSource(kind="hit_field", field=key), when="hit_present"))
    g.rules.append(CameraRule(scene=target_scene.name, op="focus",
                              focus=ValueSource(kind="match_center", var=var, value=target_decl.name),
                              zoom_to=b.get("zoom", 2.0)))
    g.rules.append(RunEvaluatorRule(id="ev1", evaluator=TargetEvaluator(kind="predicate", predicate=var)))
    g.rules.append(ApplyScaleRule(evaluator="ev1", scale=_bool_scale(b)))
    return g


RECIPES = {
    "point_select": point_select,
    "multi_select": multi_select,
    "range_select": range_select,
    "generalized_select": generalized_select,
    "linked_select": linked_select,
    "deselect": deselect,
    "show_hide_reference_lines": show_hide_reference_lines,
    "show_hide_tooltip_container": show_hide_tooltip_container,
    "reposition": reposition,
    "sort": sort,
    "organize_views": organize_views,
    "geometric_zoom": geometric_zoom,
    "pan": pan,
    "toggle_views": toggle_views,
    "navigate_scene_section": navigate_scene_section,
    "change_field_in_encoding": change_field_in_encoding,
    "change_chart_type": change_chart_type,
    "click_to_add_data_points": click_to_add_data_points,
    "add_object": add_object,
    "dynamic_queries": dynamic_queries,
    "details_on_demand": details_on_demand,
    "cross_filter": cross_filter,
    "move_up_down_hierarchy": move_up_down_hierarchy,
    "drill_down_roll_up": drill_down_roll_up,
    "recompute_field_new_baseline": recompute_field_new_baseline,
    "change_aggregator": change_aggregator,
    "semantic_zoom": semantic_zoom,
    "direct_walk": direct_walk,
}


def build_graph(technique_id: str, unit: InteractionSpec, doc: Document,
                registry: Registry) -> ComponentGraph:
    """Wire the unit for one technique, enforcing the technique's scope."""
    sig = registry.signature_of(technique_id)
    recipe = RECIPES.get(sig.id)
    if recipe is None:
        raise _missing(f"no recipe for technique {sig.id!r}")
    scope = unit_scope(doc, unit.on.listener, unit.target)
    if scope not in sig.scope:
        raise OpError(E051_SCOPE_MISMATCH,
                      f"{sig.id} is a {sig.scope}-scope technique but the unit is {scope}")
    return recipe(unit, doc)
