"""Component graphs: the wired form of one interaction unit.

A graph owns an event binding, an optional hit rule, state variables, and an
ordered rule list describing how the event updates variables, evaluators,
evaluation scales, cameras, positions, visibility, encodings and data. The
rule vocabulary doubles as the component-level authoring surface and as the
structural evidence classification runs on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .model import Document, EventBinding, Predicate, Selector
from .interaction import EvaluationScale, StateVariable, TargetEvaluator

# Value sources feed rules from the current event, hit object, brush,
# state variables or constants.
MOUSE_SOURCE_KINDS = {
    "event_x", "event_y", "event_point", "pointer_delta", "event_delta",
    "wheel_zoom_factor", "brush_range", "scroll_accum",
}
HIT_SOURCE_KINDS = {"hit_field", "hit_key", "hit_expansion", "hit_center", "hit_bbox"}


@dataclass
class ValueSource:
    kind: str
    field: str | None = None  # event_*/hit_field payload field
    value: Any = None  # const
    scale: str | None = None  # brush_range / invert_scale
    axis: str = "x"  # brush_range
    mode: str | None = None  # hit_expansion: ancestors | same_value
    var: str | None = None  # state_var
    step: float | None = None  # wheel_zoom_factor
    source: "ValueSource | None" = None  # invert_scale inner source

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"kind": self.kind}
        for k in ("field", "value", "scale", "axis", "mode", "var", "step"):
            v = getattr(self, k)
            if v is not None and not (k == "axis" and v == "x"):
                d[k] = v
        if self.source is not None:
            d["source"] = self.source.to_dict()
        return d

    @staticmethod
    def from_dict(raw: dict) -> ValueSource:
        return ValueSource(
            kind=raw["kind"], field=raw.get("field"), value=raw.get("value"),
            scale=raw.get("scale"), axis=raw.get("axis", "x"), mode=raw.get("mode"),
            var=raw.get("var"), step=raw.get("step"),
            source=ValueSource.from_dict(raw["source"]) if raw.get("source") else None,
        )

    def mouse_derived(self) -> bool:
        if self.kind in MOUSE_SOURCE_KINDS:
            return True
        return self.source.mouse_derived() if self.source else False

    def hit_derived(self) -> bool:
        if self.kind in HIT_SOURCE_KINDS:
            return True
        return self.source.hit_derived() if self.source else False


@dataclass
class Derivation:
    """A named row recomputation applied by recompute data updates."""

    kind: str  # baseline_index | aggregate | hierarchy_level | pivot | bin2d
    table: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "table": self.table, "params": self.params}

    @staticmethod
    def from_dict(raw: dict) -> Derivation:
        return Derivation(kind=raw["kind"], table=raw["table"], params=dict(raw.get("params", {})))


@dataclass
class HitRule:
    """Run the canvas hit test. ``within`` restricts hits to members of the
    named collection (anything else counts as background); ``lift`` promotes
    the raw mark to its enclosing member of the named collection."""

    within: str | None = None
    lift: str | None = None

    def to_dict(self) -> dict:
        d = {}
        if self.within:
            d["within"] = self.within
        if self.lift:
            d["lift"] = self.lift
        return d

    @staticmethod
    def from_dict(raw) -> HitRule:
        if raw is True or raw == {}:
            return HitRule()
        return HitRule(within=raw.get("within"), lift=raw.get("lift"))


# --- rules ----------------------------------------------------------------


@dataclass
class SetVarRule:
    var: str
    source: ValueSource
    mode: str = "set"  # set | toggle_in_list | remove_from_list | accumulate
    when: str = "always"  # always | hit_present | hit_absent
    kind: str = "set_var"


@dataclass
class RunEvaluatorRule:
    id: str
    evaluator: TargetEvaluator
    targets: Selector | None = None  # default: the unit's target selector
    when: str = "always"
    kind: str = "run_evaluator"


@dataclass
class ApplyScaleRule:
    evaluator: str
    scale: EvaluationScale
    when: str = "always"
    kind: str = "apply_scale"


@dataclass
class ApplyOrderRule:
    """Reassign the position slots of the evaluator's targets by rank."""

    evaluator: str
    channel: str = "x"
    kind: str = "apply_order"


@dataclass
class ApplyLayoutRule:
    """Apply a layout evaluator's (x, y) outputs to its targets."""

    evaluator: str
    kind: str = "apply_layout"


@dataclass
class CameraRule:
    scene: str
    op: str  # pan | zoom | focus
    delta: ValueSource | None = None  # pan
    factor: ValueSource | None = None  # zoom
    anchor: ValueSource | None = None  # zoom
    focus: ValueSource | None = None  # focus jump
    zoom_to: float | None = None  # focus jump zoom level
    presets: dict | None = None  # control value -> {focusX, focusY, zoom}
    kind: str = "camera"


@dataclass
class DataUpdateRule:
    target: str
    update: str  # filter_by_predicate | replace_rows | append_row | recompute
    predicate: str | None = None  # state variable holding the filter
    derivation: Derivation | None = None
    row_fields: dict[str, ValueSource] = field(default_factory=dict)  # append_row
    rows_table: str | None = None  # replace_rows: match rows of this table
    text_template: str | None = None  # annotation targets: text from the datum
    when: str = "always"
    kind: str = "data_update"


@dataclass
class EncodingUpdateRule:
    encoding: str
    field_source: ValueSource
    rescale: bool = True
    kind: str = "encoding_update"


@dataclass
class PositionRule:
    targets: Selector | None  # None: the hit object
    x: ValueSource | None = None
    y: ValueSource | None = None
    mode: str = "set"  # set | offset
    when: str = "always"
    kind: str = "position"


@dataclass
class VisibilityRule:
    targets: Selector
    source: ValueSource  # hit_present | predicate_valid | match_var
    negate: bool = False
    kind: str = "visibility"


Rule = (
    SetVarRule | RunEvaluatorRule | ApplyScaleRule | ApplyOrderRule | ApplyLayoutRule
    | CameraRule | DataUpdateRule | EncodingUpdateRule | PositionRule | VisibilityRule
)


@dataclass
class ComponentGraph:
    event_binding: EventBinding
    listener_id: str
    hit_rule: HitRule | None = None
    state_variables: list[StateVariable] = field(default_factory=list)
    rules: list[Rule] = field(default_factory=list)

    def variable(self, name: str) -> StateVariable | None:
        for v in self.state_variables:
            if v.name == name:
                return v
        return None

    # spec-shaped views over the ordered rule list
    @property
    def evaluators(self) -> list[RunEvaluatorRule]:
        return [r for r in self.rules if isinstance(r, RunEvaluatorRule)]

    @property
    def evaluation_scales(self) -> list[ApplyScaleRule]:
        return [r for r in self.rules if isinstance(r, ApplyScaleRule)]

    @property
    def camera_ops(self) -> list[CameraRule]:
        return [r for r in self.rules if isinstance(r, CameraRule)]

    @property
    def data_update_rules(self) -> list[DataUpdateRule]:
        return [r for r in self.rules if isinstance(r, DataUpdateRule)]

    @property
    def encoding_updates(self) -> list[EncodingUpdateRule]:
        return [r for r in self.rules if isinstance(r, EncodingUpdateRule)]


# ---------------------------------------------------------------------------
# Serialization (the component-level authoring surface)


def _selector_raw(sel: Selector | None):
    return sel.to_raw() if sel is not None else None


def _evaluator_to_dict(ev: TargetEvaluator) -> dict:
    d: dict[str, Any] = {"kind": ev.kind}
    if ev.kind == "predicate":
        d["predicate"] = ev.predicate if isinstance(ev.predicate, str) else ev.predicate.to_dict()
    elif ev.kind == "order":
        d["fieldRef"] = ev.field_ref
        d["direction"] = ev.direction
    elif ev.kind == "distance":
        d["metric"] = ev.metric
        if ev.anchor is not None:
            d["anchor"] = ev.anchor
    elif ev.kind == "layout":
        d["policy"] = ev.layout_policy
    return d


def _evaluator_from_dict(raw: dict) -> TargetEvaluator:
    kind = raw["kind"]
    if kind == "predicate":
        p = raw.get("predicate")
        return TargetEvaluator(kind="predicate",
                               predicate=p if isinstance(p, str) else Predicate.from_dict(p))
    if kind == "order":
        return TargetEvaluator(kind="order", field_ref=raw.get("fieldRef"),
                               direction=raw.get("direction", "asc"))
    if kind == "distance":
        return TargetEvaluator(kind="distance", metric=raw.get("metric", "index"),
                               anchor=raw.get("anchor", "hit"))
    return TargetEvaluator(kind="layout", layout_policy=raw.get("policy"))


def _scale_to_dict(s: EvaluationScale) -> dict:
    d: dict[str, Any] = {"input": s.input_kind}
    if s.input_kind == "boolean":
        d["trueProps"] = s.true_props
        d["falseProps"] = s.false_props
    else:
        if s.domain is not None:
            d["domain"] = s.domain
        d["outputs"] = s.outputs
    return d


def _scale_from_dict(raw: dict) -> EvaluationScale:
    return EvaluationScale(
        input_kind=raw.get("input", "boolean"),
        true_props=dict(raw.get("trueProps", {})),
        false_props=dict(raw.get("falseProps", {})),
        domain=raw.get("domain"),
        outputs=dict(raw.get("outputs", {})),
    )


def _statevar_to_dict(v: StateVariable) -> dict:
    d: dict[str, Any] = {"name": v.name, "kind": v.kind}
    if v.kind == "predicate" and isinstance(v.value, Predicate):
        d["predicate"] = v.value.to_dict()
    elif v.value is not None:
        d["value"] = v.value
    if v.label:
        d["label"] = v.label
    return d


def _statevar_from_dict(raw: dict) -> StateVariable:
    kind = raw.get("kind", "scalar")
    value = Predicate.from_dict(raw["predicate"]) if kind == "predicate" and "predicate" in raw else raw.get("value")
    return StateVariable(name=raw["name"], kind=kind, value=value, label=raw.get("label"))


def rule_to_dict(r: Rule) -> dict:
    if isinstance(r, SetVarRule):
        d = {"rule": "set_var", "var": r.var, "source": r.source.to_dict()}
        if r.mode != "set":
            d["mode"] = r.mode
        if r.when != "always":
            d["when"] = r.when
        return d
    if isinstance(r, RunEvaluatorRule):
        d = {"rule": "run_evaluator", "id": r.id, "evaluator": _evaluator_to_dict(r.evaluator)}
        if r.targets is not None:
            d["targets"] = r.targets.to_raw()
        if r.when != "always":
            d["when"] = r.when
        return d
    if isinstance(r, ApplyScaleRule):
        d = {"rule": "apply_scale", "evaluator": r.evaluator, "scale": _scale_to_dict(r.scale)}
        if r.when != "always":
            d["when"] = r.when
        return d
    if isinstance(r, ApplyOrderRule):
        return {"rule": "apply_order", "evaluator": r.evaluator, "channel": r.channel}
    if isinstance(r, ApplyLayoutRule):
        return {"rule": "apply_layout", "evaluator": r.evaluator}
    if isinstance(r, CameraRule):
        d = {"rule": "camera", "scene": r.scene, "op": r.op}
        for k in ("delta", "factor", "anchor", "focus"):
            v = getattr(r, k)
            if v is not None:
                d[k] = v.to_dict()
        if r.zoom_to is not None:
            d["zoomTo"] = r.zoom_to
        if r.presets is not None:
            d["presets"] = r.presets
        return d
    if isinstance(r, DataUpdateRule):
        d = {"rule": "data_update", "target": r.target, "update": r.update}
        if r.predicate:
            d["predicate"] = r.predicate
        if r.derivation:
            d["derivation"] = r.derivation.to_dict()
        if r.row_fields:
            d["rowFields"] = {k: v.to_dict() for k, v in r.row_fields.items()}
        if r.rows_table:
            d["rowsTable"] = r.rows_table
        if r.text_template:
            d["textTemplate"] = r.text_template
        if r.when != "always":
            d["when"] = r.when
        return d
    if isinstance(r, EncodingUpdateRule):
        return {"rule": "encoding_update", "encoding": r.encoding,
                "field": r.field_source.to_dict(), "rescale": r.rescale}
    if isinstance(r, PositionRule):
        d = {"rule": "position", "targets": _selector_raw(r.targets), "mode": r.mode}
        if r.x is not None:
            d["x"] = r.x.to_dict()
        if r.y is not None:
            d["y"] = r.y.to_dict()
        if r.when != "always":
            d["when"] = r.when
        return d
    if isinstance(r, VisibilityRule):
        d = {"rule": "visibility", "targets": r.targets.to_raw(), "source": r.source.to_dict()}
        if r.negate:
            d["negate"] = True
        return d
    raise TypeError(f"unknown rule {r!r}")


def rule_from_dict(raw: dict) -> Rule:
    kind = raw["rule"]
    if kind == "set_var":
        return SetVarRule(var=raw["var"], source=ValueSource.from_dict(raw["source"]),
                          mode=raw.get("mode", "set"), when=raw.get("when", "always"))
    if kind == "run_evaluator":
        return RunEvaluatorRule(
            id=raw["id"], evaluator=_evaluator_from_dict(raw["evaluator"]),
            targets=Selector.from_raw(raw["targets"]) if raw.get("targets") is not None else None,
            when=raw.get("when", "always"),
        )
    if kind == "apply_scale":
        return ApplyScaleRule(evaluator=raw["evaluator"], scale=_scale_from_dict(raw["scale"]),
                              when=raw.get("when", "always"))
    if kind == "apply_order":
        return ApplyOrderRule(evaluator=raw["evaluator"], channel=raw.get("channel", "x"))
    if kind == "apply_layout":
        return ApplyLayoutRule(evaluator=raw["evaluator"])
    if kind == "camera":
        return CameraRule(
            scene=raw["scene"], op=raw["op"],
            delta=ValueSource.from_dict(raw["delta"]) if raw.get("delta") else None,
            factor=ValueSource.from_dict(raw["factor"]) if raw.get("factor") else None,
            anchor=ValueSource.from_dict(raw["anchor"]) if raw.get("anchor") else None,
            focus=ValueSource.from_dict(raw["focus"]) if raw.get("focus") else None,
            zoom_to=raw.get("zoomTo"), presets=raw.get("presets"),
        )
    if kind == "data_update":
        return DataUpdateRule(
            target=raw["target"], update=raw["update"], predicate=raw.get("predicate"),
            derivation=Derivation.from_dict(raw["derivation"]) if raw.get("derivation") else None,
            row_fields={k: ValueSource.from_dict(v) for k, v in raw.get("rowFields", {}).items()},
            rows_table=raw.get("rowsTable"), text_template=raw.get("textTemplate"),
            when=raw.get("when", "always"),
        )
    if kind == "encoding_update":
        return EncodingUpdateRule(encoding=raw["encoding"],
                                  field_source=ValueSource.from_dict(raw["field"]),
                                  rescale=raw.get("rescale", True))
    if kind == "position":
        return PositionRule(
            targets=Selector.from_raw(raw["targets"]) if raw.get("targets") is not None else None,
            x=ValueSource.from_dict(raw["x"]) if raw.get("x") else None,
            y=ValueSource.from_dict(raw["y"]) if raw.get("y") else None,
            mode=raw.get("mode", "set"), when=raw.get("when", "always"),
        )
    if kind == "visibility":
        return VisibilityRule(targets=Selector.from_raw(raw["targets"]),
                              source=ValueSource.from_dict(raw["source"]),
                              negate=raw.get("negate", False))
    raise ValueError(f"unknown rule kind {kind!r}")


def graph_to_dict(g: ComponentGraph) -> dict:
    d: dict[str, Any] = {
        "on": {"event": g.event_binding.event, "listener": g.event_binding.listener,
               **({"key": g.event_binding.key} if g.event_binding.key else {})},
    }
    if g.hit_rule is not None:
        d["hit"] = g.hit_rule.to_dict() or True
    if g.state_variables:
        d["stateVariables"] = [_statevar_to_dict(v) for v in g.state_variables]
    d["rules"] = [rule_to_dict(r) for r in g.rules]
    return d


def graph_from_dict(raw: dict, binding: EventBinding | None = None) -> ComponentGraph:
    on = raw.get("on")
    if binding is None:
        binding = EventBinding(event=on["event"], listener=on["listener"], key=on.get("key"))
    return ComponentGraph(
        event_binding=binding,
        listener_id=binding.listener,
        hit_rule=HitRule.from_dict(raw["hit"]) if raw.get("hit") else None,
        state_variables=[_statevar_from_dict(v) for v in raw.get("stateVariables", [])],
        rules=[rule_from_dict(r) for r in raw.get("rules", [])],
    )


# ---------------------------------------------------------------------------
# Component evidence (classification input)


@dataclass
class Evidence:
    """Structural features of a graph, independent of all names."""

    present: set[str] = field(default_factory=set)
    predicate_ops: set[str] = field(default_factory=set)
    predicate_sources: set[str] = field(default_factory=set)  # hit | hit_expansion | hit_bbox | brush | control | mouse | const | const_null
    predicate_channel: bool = False
    clearing: bool = False  # operand nulled or hit removed from list
    accumulating: bool = False  # toggle_in_list membership updates
    camera_mutations: set[str] = field(default_factory=set)  # focus | zoom
    derivation_kinds: set[str] = field(default_factory=set)
    update_kinds: set[str] = field(default_factory=set)
    append_sources: set[str] = field(default_factory=set)  # coords | control
    evaluator_kinds: set[str] = field(default_factory=set)
    position_target_kinds: set[str] = field(default_factory=set)
    visibility_target_kinds: set[str] = field(default_factory=set)
    annotation_shapes: set[str] = field(default_factory=set)
    data_target_kinds: set[str] = field(default_factory=set)
    listener_kind: str = "canvas"
    cross_scene: bool = False
    scope: str = "S"


def _source_tag(src: ValueSource) -> str:
    if src.kind == "const":
        return "const_null" if src.value is None else "const"
    if src.kind == "brush_range":
        return "brush"
    if src.kind == "hit_expansion":
        return "hit_expansion"
    if src.kind == "hit_bbox":
        return "hit_bbox"
    if src.kind in HIT_SOURCE_KINDS:
        return "hit"
    if src.kind == "event_value":
        return "control"
    if src.kind in MOUSE_SOURCE_KINDS:
        return "mouse"
    if src.kind == "invert_scale" and src.source is not None:
        inner = _source_tag(src.source)
        return "brush" if inner == "mouse" else inner
    if src.kind == "state_var":
        return "state_var"
    return src.kind


def _target_kinds(doc: Document, graph_targets: Selector | None, unit_target: Selector,
                  index) -> set[str]:
    sel = graph_targets or unit_target
    kinds: set[str] = set()
    if sel.kind == "scene":
        return {"scene"}
    if sel.kind == "object_kind":
        return {sel.value}
    if sel.kind == "collection":
        hit = doc.object_decl(sel.value)
        if hit is not None:
            tmpl = hit[1].template
            kinds.add(tmpl.kind if tmpl else "mark")
        return kinds
    for nm in sel.value if sel.kind == "names" else []:
        if doc.scene(nm) is not None:
            kinds.add("scene")
            continue
        hit = doc.object_decl(nm)
        if hit is not None:
            kinds.add(hit[1].kind)
    return kinds


def _annotation_shape(doc: Document, sel: Selector | None) -> set[str]:
    shapes: set[str] = set()
    if sel is None or sel.kind != "names":
        return shapes
    for nm in sel.value:
        hit = doc.object_decl(nm)
        if hit is not None and hit[1].kind == "annotation":
            shapes.add(hit[1].mark_shape or "rect")
    return shapes


def unit_scope(doc: Document, listener: str, target: Selector) -> str:
    """S when every target lives in the listener's scene; M otherwise."""
    lscene = doc.listener_scene(listener)
    lname = lscene.name if lscene else None
    target_scenes: set[str] = set()
    if target.kind == "scene":
        target_scenes.add(target.value)
    elif target.kind == "names":
        for nm in target.value:
            if doc.scene(nm) is not None:
                target_scenes.add(nm)
            else:
                hit = doc.object_decl(nm)
                if hit is not None:
                    target_scenes.add(hit[0].name)
    elif target.kind == "collection":
        hit = doc.object_decl(target.value)
        if hit is not None:
            target_scenes.add(hit[0].name)
    else:  # object_kind spans whatever scenes declare that kind
        for sc in doc.scenes:
            target_scenes.add(sc.name)
        if target.value == "scene" and len(doc.scenes) > 1:
            return "M"
    if len(target_scenes) > 1:
        return "M"
    if lname is not None and target_scenes and lname not in target_scenes:
        return "M"
    return "S"


def collect_evidence(g: ComponentGraph, doc: Document, unit_target: Selector) -> Evidence:
    ev = Evidence()
    ev.scope = unit_scope(doc, g.listener_id, unit_target)

    ctrl = doc.control(g.listener_id)
    ev.listener_kind = ctrl[1].kind if ctrl else "canvas"

    if g.hit_rule is not None:
        ev.present.add("hit_object")

    var_kinds = {v.name: v.kind for v in g.state_variables}
    for v in g.state_variables:
        if v.kind == "predicate":
            ev.present.add("predicate")
            pred = v.value
            if isinstance(pred, Predicate):
                for p in [pred] + pred.conjuncts:
                    ev.predicate_ops.add(p.op)
                    if p.variable.startswith("@"):
                        ev.predicate_channel = True
        elif v.kind == "field_reference":
            ev.present.add("field_reference")
        elif v.kind == "component_reference":
            ev.present.add("component_reference")
        else:
            ev.present.add("state_variable")

    lscene = doc.listener_scene(g.listener_id)
    lname = lscene.name if lscene else None

    def note_cross(sel: Selector | None):
        if sel is None or lname is None:
            return
        if unit_scope(doc, g.listener_id, sel) == "M":
            ev.cross_scene = True

    if unit_scope(doc, g.listener_id, unit_target) == "M":
        ev.cross_scene = True

    mouse = False
    for r in g.rules:
        if isinstance(r, SetVarRule):
            tag = _source_tag(r.source)
            kind = var_kinds.get(r.var, "scalar")
            if kind == "predicate":
                ev.predicate_sources.add(tag)
                if tag == "const_null" or r.mode == "remove_from_list":
                    ev.clearing = True
                if r.mode == "toggle_in_list":
                    ev.accumulating = True
            if r.source.mouse_derived():
                mouse = True
        elif isinstance(r, RunEvaluatorRule):
            ev.present.add("evaluator")
            ev.evaluator_kinds.add(r.evaluator.kind)
            if r.evaluator.kind == "predicate" and isinstance(r.evaluator.predicate, Predicate):
                ev.present.add("predicate")
            if r.evaluator.kind == "layout" and r.evaluator.anchor == "drag":
                mouse = True
            note_cross(r.targets)
        elif isinstance(r, ApplyScaleRule):
            ev.present.add("evaluation_scale")
        elif isinstance(r, (ApplyOrderRule, ApplyLayoutRule)):
            pass
        elif isinstance(r, CameraRule):
            ev.present.add("camera")
            if r.op == "pan":
                ev.camera_mutations.add("focus")
            elif r.op == "zoom":
                ev.camera_mutations.add("zoom")
            else:
                ev.camera_mutations.add("focus")
                if r.zoom_to is not None:
                    ev.camera_mutations.add("zoom")
            for src in (r.delta, r.factor, r.anchor, r.focus):
                if src is not None and src.mouse_derived():
                    mouse = True
        elif isinstance(r, DataUpdateRule):
            ev.present.add("target_data")
            ev.update_kinds.add(r.update)
            if r.update == "recompute" and r.derivation is not None:
                ev.derivation_kinds.add(r.derivation.kind)
            if r.update == "append_row":
                tags = {_source_tag(s) for s in r.row_fields.values()}
                if tags & {"mouse", "brush"}:
                    ev.append_sources.add("coords")
                if "control" in tags:
                    ev.append_sources.add("control")
                if not r.row_fields:
                    ev.append_sources.add("control")
            if r.predicate:
                ev.present.add("predicate")
            target_hit = doc.object_decl(r.target)
            if target_hit is not None:
                ev.data_target_kinds.add(target_hit[1].kind)
            elif doc.scene(r.target) is not None:
                ev.data_target_kinds.add("scene")
            note_cross(Selector("names", [r.target]))
        elif isinstance(r, EncodingUpdateRule):
            ev.present.add("encoding")
            if r.rescale:
                ev.present.add("scale")
            if r.field_source.mouse_derived():
                mouse = True
        elif isinstance(r, PositionRule):
            kinds = _target_kinds(doc, r.targets, unit_target, None)
            if r.targets is None:
                kinds.add("hit")
            ev.position_target_kinds |= kinds
            for src in (r.x, r.y):
                if src is not None and src.mouse_derived():
                    mouse = True
        elif isinstance(r, VisibilityRule):
            ev.visibility_target_kinds |= _target_kinds(doc, r.targets, unit_target, None)
            ev.annotation_shapes |= _annotation_shape(doc, r.targets)
            note_cross(r.targets)

    if mouse:
        ev.present.add("mouse_params")
    return ev
