"""Elaboration and analysis: lower intent- and technique-level units into
component graphs, and classify component graphs back into techniques and
intents.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import (
    ComponentGraph,
    Evidence,
    collect_evidence,
    graph_from_dict,
    graph_to_dict,
)
from .model import (
    E041_UNKNOWN_INTENT,
    E050_MISSING_BINDING,
    Diagnostic,
    Document,
    EventBinding,
    InteractionSpec,
    OpError,
    Selector,
    validate_document,
)
from .registry import (
    COMPONENT_DISPLAY,
    INTERNAL_COMPONENTS,
    Registry,
    SignatureTerm,
    TechniqueSignature,
    default_registry,
)

DEFAULT_TRUE_PROPS = {"stroke": "#e45756", "strokeWidth": 3}
DEFAULT_FALSE_PROPS = {"opacity": 0.3}


@dataclass
class CompiledInteraction:
    unit_name: str
    graph: ComponentGraph
    technique: str
    user_intents: tuple[str, ...]
    authoring_intents: tuple[str, ...]
    provenance: str  # intent | technique | component
    target: Selector

    def to_dict(self) -> dict:
        return {
            "unit": self.unit_name,
            "technique": self.technique,
            "userIntents": list(self.user_intents),
            "authoringIntents": list(self.authoring_intents),
            "provenance": self.provenance,
            "target": self.target.to_raw(),
            "graph": graph_to_dict(self.graph),
        }


@dataclass
class SignatureReport:
    technique: str
    satisfied: bool
    missing: list[str] = field(default_factory=list)
    extras: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.satisfied and not self.extras


@dataclass
class Candidate:
    technique: str
    report: SignatureReport
    score: int
    why: list[str] = field(default_factory=list)
    scope_ok: bool = True


@dataclass
class ClassificationReport:
    unit_name: str
    event: str
    listener: str
    hit_object: str  # display label or "none"
    target: str
    internal_components: list[str]
    candidates: list[Candidate]
    user_intent: str | None
    authoring_intent: str | None
    technique_display: str | None
    why: list[str] = field(default_factory=list)

    @property
    def technique(self) -> str | None:
        if self.user_intent is None:  # nothing viable: candidates hold nearest misses
            return None
        return self.candidates[0].technique if self.candidates else None

    def to_dict(self) -> dict:
        return {
            "unit": self.unit_name,
            "event": self.event,
            "listener": self.listener,
            "hitObject": self.hit_object,
            "target": self.target,
            "internalComponents": self.internal_components,
            "technique": self.technique or "unclassified",
            "techniqueDisplay": self.technique_display or "unclassified",
            "userIntent": self.user_intent,
            "authoringIntent": self.authoring_intent,
            "candidates": [
                {"technique": c.technique, "satisfied": c.report.satisfied,
                 "exact": c.report.exact, "missing": c.report.missing,
                 "extras": c.report.extras, "score": c.score, "why": c.why}
                for c in self.candidates
            ],
            "why": self.why,
        }


# ---------------------------------------------------------------------------
# Signature checking


def _term_label(term: SignatureTerm) -> str:
    if term.kind == "one_of":
        return " | ".join("+".join(b) for b in term.branches)
    if term.evaluator_kind:
        return f"{term.component}:{term.evaluator_kind}"
    return term.component


def check_signature(graph: ComponentGraph, technique_id: str, doc: Document,
                    target: Selector | None = None,
                    registry: Registry | None = None) -> SignatureReport:
    """Does the graph satisfy the technique's signature?

    Required terms must be present, each alternative group needs one complete
    branch, optional terms never fail; components the signature does not
    mention are reported as extras.
    """
    registry = registry or default_registry()
    sig = registry.signature_of(technique_id)
    ev = collect_evidence(graph, doc, target or Selector("object_kind", "mark"))
    return _check_evidence(ev, sig)


def _check_evidence(ev: Evidence, sig: TechniqueSignature) -> SignatureReport:
    present = set(ev.present)
    consumed: set[str] = set()
    missing: list[str] = []
    for term in sig.terms:
        if term.kind == "required":
            ok = term.component in present
            if ok and term.evaluator_kind is not None:
                ok = term.evaluator_kind in ev.evaluator_kinds
            if ok:
                consumed.add(term.component)
            else:
                missing.append(_term_label(term))
        elif term.kind == "optional":
            if term.component in present:
                consumed.add(term.component)
        else:  # one_of: any complete branch satisfies; all present members consume
            if any(all(c in present for c in branch) for branch in term.branches):
                consumed.update(c for b in term.branches for c in b if c in present)
            else:
                missing.append(_term_label(term))
    extras = sorted(present - consumed)
    return SignatureReport(technique=sig.id, satisfied=not missing, missing=missing, extras=extras)


# ---------------------------------------------------------------------------
# Discriminators: structural evidence refining identical signatures. Scores
# feed the ranking between equally-satisfied candidates; a score >= 3 also
# forgives a single missing term (bespoke designs often leave one component
# implicit).

def _disc(technique: str, ev: Evidence) -> tuple[int, list[str]]:
    score = 0
    why: list[str] = []

    def hit(points: int, reason: str):
        nonlocal score
        score += points
        why.append(reason)

    if technique == "point_select":
        if "hit_object" in ev.present and "predicate" not in ev.present:
            hit(2, "hit object alone identifies the selection")
        if "eq" in ev.predicate_ops and ev.predicate_sources & {"hit", "control", "const"}:
            hit(2, "single-valued equality predicate")
        if "hit_bbox" in ev.predicate_sources:
            hit(2, "collision predicate against the hit object")
    elif technique == "multi_select":
        if ev.accumulating:
            hit(3, "operand accumulates toggled members")
        elif "in" in ev.predicate_ops and not (ev.predicate_sources & {"hit_expansion", "brush"}):
            hit(2, "list-valued operand with the in operator")
    elif technique == "range_select":
        if "brush" in ev.predicate_sources:
            hit(3, "operand comes from an inverted pixel range")
        elif "between" in ev.predicate_ops and not ev.predicate_channel:
            hit(1, "interval predicate over a data field")
    elif technique == "generalized_select":
        if "hit_expansion" in ev.predicate_sources:
            hit(3, "hit object expanded along data relationships")
    elif technique == "linked_select":
        if ev.cross_scene and "predicate" in ev.present:
            hit(2, "selection mirrored into another scene")
    elif technique == "deselect":
        if ev.clearing:
            hit(3, "operand cleared or hit removed from the selection")
    elif technique == "show_hide_reference_lines":
        if ev.annotation_shapes & {"line", "path"}:
            hit(2, "visibility rule drives a rule-shaped annotation")
    elif technique == "show_hide_tooltip_container":
        if ev.annotation_shapes and not (ev.annotation_shapes & {"line", "path"}):
            hit(2, "visibility rule drives a container annotation")
    elif technique == "reposition":
        if ev.position_target_kinds and ev.position_target_kinds != {"scene"}:
            hit(2, "positions of existing objects follow the input")
    elif technique == "sort":
        if "order" in ev.evaluator_kinds:
            hit(2, "order evaluator recomputes indices")
    elif technique == "organize_views":
        if "layout" in ev.evaluator_kinds and (
                "scene" in ev.position_target_kinds or not ev.position_target_kinds):
            hit(2, "layout evaluator rearranges scenes")
    elif technique == "geometric_zoom":
        if "zoom" in ev.camera_mutations:
            hit(2, "camera zoom level changes")
    elif technique == "pan":
        if ev.camera_mutations == {"focus"}:
            hit(2, "only the camera focus point changes")
    elif technique == "toggle_views":
        if ("scene" in ev.visibility_target_kinds and "state_variable" in ev.present
                and ev.listener_kind != "canvas"):
            hit(2, "a control switches the visible view through a plain variable")
        if "camera" in ev.present and ev.listener_kind != "canvas":
            hit(2, "control-driven camera jump between views")
    elif technique == "navigate_scene_section":
        if "scene" in ev.visibility_target_kinds and "component_reference" in ev.present:
            hit(2, "a live scene reference drives navigation")
    elif technique == "change_field_in_encoding":
        if "encoding" in ev.present and "state_variable" not in ev.present:
            hit(1, "the encoding's field is swapped directly")
    elif technique == "change_chart_type":
        if "encoding" in ev.present and "state_variable" in ev.present:
            hit(1, "a chart-type variable selects the encodings")
    elif technique == "click_to_add_data_points":
        if "coords" in ev.append_sources:
            hit(2, "appended row takes its values from the clicked spot")
    elif technique == "add_object":
        if "control" in ev.append_sources:
            hit(2, "appended row comes from a control choice")
    elif technique == "dynamic_queries":
        if "control" in ev.predicate_sources and ev.listener_kind != "canvas":
            hit(2, "querying control owns the predicate")
    elif technique == "details_on_demand":
        if "annotation" in ev.data_target_kinds and ev.predicate_sources & {"hit"}:
            hit(2, "tooltip data replaced from a hit-derived predicate")
    elif technique == "cross_filter":
        if ev.cross_scene and "predicate" in ev.present:
            hit(3, "interaction in one scene filters another")
    elif technique == "move_up_down_hierarchy":
        if "hierarchy_level" in ev.derivation_kinds:
            hit(3, "data recomputed at a different hierarchy level")
    elif technique == "drill_down_roll_up":
        if "pivot" in ev.derivation_kinds:
            hit(3, "data re-aggregated over different dimensions")
    elif technique == "recompute_field_new_baseline":
        if "baseline_index" in ev.derivation_kinds:
            hit(3, "values recomputed against a baseline")
    elif technique == "change_aggregator":
        if "aggregate" in ev.derivation_kinds:
            hit(3, "grouped values recomputed with a different function")
    elif technique == "semantic_zoom":
        if "bin2d" in ev.derivation_kinds and "camera" in ev.present:
            hit(3, "zoom level also changes the data granularity")
    elif technique == "direct_walk":
        if "camera" in ev.present and "evaluation_scale" in ev.present:
            hit(2, "selection plus a camera jump onto the target")
    return score, why


def classify_interaction(unit_name: str, graph: ComponentGraph, doc: Document,
                         target: Selector | None = None,
                         registry: Registry | None = None) -> ClassificationReport:
    """Rank registered techniques against a component graph.

    Ranking: satisfaction class (exact > with-extras > unsatisfied), then the
    discriminator score, then specificity (more required terms), then
    registry order. A discriminator score of 3+ forgives one missing term.
    """
    registry = registry or default_registry()
    if target is None:
        unit = next((u for u in doc.interactions if u.name == unit_name), None)
        target = unit.target if unit is not None else Selector("object_kind", "mark")
    ev = collect_evidence(graph, doc, target)

    candidates: list[tuple[tuple, Candidate]] = []
    for idx, sig in enumerate(registry.techniques):
        report = _check_evidence(ev, sig)
        score, why = _disc(sig.id, ev)
        scope_ok = ev.scope in sig.scope if sig.scope != "SM" else True
        cls = 2 if report.exact else (1 if report.satisfied else 0)
        if cls == 0 and score >= 3 and len(report.missing) == 1:
            cls = 1
            why = why + [f"one implicit component forgiven: {report.missing[0]}"]
        if not scope_ok:
            cls = 0
        cand = Candidate(technique=sig.id, report=report, score=score, why=why, scope_ok=scope_ok)
        candidates.append(((-cls, -score, -sig.required_count, idx), cand))

    candidates.sort(key=lambda t: t[0])
    ranked = [c for _, c in candidates]
    viable = [c for key, c in candidates if -key[0] >= 1]

    top = viable[0] if viable else None
    if top is not None:
        sig = registry.signature_of(top.technique)
        user_intents, authoring = registry.intents_of_technique(top.technique)
        user_intent = " + ".join(registry.user_intent(u).short_label for u in user_intents)
        authoring_intent = " + ".join(authoring)
        tech_display = _refined_display(sig, graph, doc)
        why = top.why
    else:
        user_intent = authoring_intent = tech_display = None
        why = ["unclassified: no signature satisfied"]
        best = ranked[0] if ranked else None
        if best is not None:
            why.append(f"nearest miss {best.technique}: missing {', '.join(best.report.missing) or 'scope'}")

    return ClassificationReport(
        unit_name=unit_name,
        event=_event_display(graph.event_binding, doc),
        listener=_listener_display(graph.listener_id, doc),
        hit_object=_hit_display(graph, doc, target),
        target=_target_display(graph, doc, target),
        internal_components=_internal_display(graph, ev),
        candidates=(viable if viable else ranked[:3]),
        user_intent=user_intent,
        authoring_intent=authoring_intent,
        technique_display=tech_display,
        why=why,
    )


def _refined_display(sig: TechniqueSignature, graph: ComponentGraph, doc: Document) -> str:
    if sig.id == "add_object":
        for r in graph.data_update_rules:
            if r.update == "append_row":
                hit = doc.object_decl(r.target)
                if hit is not None and hit[1].template is not None:
                    return f"add {hit[1].template.kind}"
        return "add object"
    if sig.id == "move_up_down_hierarchy":
        for r in graph.data_update_rules:
            if r.derivation is not None and r.derivation.kind == "hierarchy_level":
                direction = r.derivation.params.get("direction")
                if direction in ("up", "down"):
                    return f"move {direction} a hierarchy"
        return sig.display_name
    return sig.display_name


_EVENT_DISPLAY = {
    "click": "click", "double_click": "double click", "pointer_move": "hover",
    "pointer_down": "press", "pointer_up": "release",
    "drag_start": "click + drag", "drag_move": "click + drag", "drag_end": "drag end",
    "wheel": "wheel", "scroll": "scroll", "key_down": "key press", "key_up": "key release",
}


def _event_display(binding: EventBinding, doc: Document) -> str:
    if binding.event == "ui_change":
        ctrl = doc.control(binding.listener)
        what = (ctrl[1].value_label if ctrl and ctrl[1].value_label else "option")
        return f"choose {what}"
    return _EVENT_DISPLAY.get(binding.event, binding.event)


_LISTENER_DISPLAY = {
    "canvas": "canvas", "dropdown": "dropdown menu", "button": "button",
    "slider": "slider", "checkbox": "checkbox", "tab": "tab", "breadcrumb": "breadcrumb",
    "scroller": "scroller",
}


def _listener_display(listener: str, doc: Document) -> str:
    ctrl = doc.control(listener)
    if ctrl is not None:
        return ctrl[1].label or _LISTENER_DISPLAY.get(ctrl[1].kind, ctrl[1].kind)
    return "canvas"


def _member_label(doc: Document, collection: str) -> str:
    hit = doc.object_decl(collection)
    if hit is None:
        return collection
    decl = hit[1]
    if decl.template is not None and decl.template.label:
        return decl.template.label
    return decl.label or decl.name


def _member_label_plural(doc: Document, collection: str) -> str:
    hit = doc.object_decl(collection)
    if hit is None:
        return collection
    decl = hit[1]
    if decl.label_plural:
        return decl.label_plural
    return f"{_member_label(doc, collection)}s"


def _hit_display(graph: ComponentGraph, doc: Document, target: Selector) -> str:
    if graph.hit_rule is None:
        return "none"
    rule = graph.hit_rule
    if rule.lift:
        return _member_label(doc, rule.lift)
    within = getattr(rule, "within", None)
    if within:
        return _member_label(doc, within)
    if target.kind == "collection":
        return _member_label(doc, target.value)
    return "mark"


def _target_display(graph: ComponentGraph, doc: Document, target: Selector) -> str:
    for r in graph.data_update_rules:
        if r.update == "append_row":
            return f"new {_member_label(doc, r.target)}"
    if target.kind == "collection":
        return f"all {_member_label_plural(doc, target.value)}"
    if target.kind == "scene":
        return f"scene {target.value}"
    if target.kind == "object_kind":
        return f"all {target.value}s"
    labels = []
    for nm in target.value:
        hit = doc.object_decl(nm)
        if hit is not None and hit[1].kind == "collection":
            labels.append(f"all {_member_label_plural(doc, nm)}")
        elif hit is not None and hit[1].label:
            labels.append(hit[1].label)
        elif doc.scene(nm) is not None:
            labels.append(f"scene {nm}")
        else:
            base = nm.split("/")[0]
            coll = doc.object_decl(base)
            if coll is not None and coll[1].kind == "collection":
                labels.append(_member_label(doc, base))
            else:
                labels.append(nm)
    return ", ".join(labels)


def _internal_display(graph: ComponentGraph, ev: Evidence) -> list[str]:
    out = []
    for comp in INTERNAL_COMPONENTS:
        if comp not in ev.present:
            continue
        name = COMPONENT_DISPLAY[comp]
        if comp == "state_variable":
            labeled = next((v.label for v in graph.state_variables
                            if v.kind == "scalar" and v.label), None)
            if labeled:
                name = f"state variable ({labeled})"
        out.append(name)
    return out


# ---------------------------------------------------------------------------
# Elaboration


def instantiate_technique(unit: InteractionSpec, doc: Document,
                          registry: Registry | None = None,
                          technique: str | None = None) -> CompiledInteraction:
    """Build the component graph one technique prescribes for this unit.

    Bindings fill the signature holes that have no default; an unsatisfiable
    hole raises OpError(E050), a scope mismatch OpError(E051).
    """
    from .techniques import build_graph

    registry = registry or default_registry()
    tid = technique or unit.technique
    sig = registry.signature_of(tid)
    graph = build_graph(sig.id, unit, doc, registry)
    user_intents, authoring = registry.intents_of_technique(sig.id)
    return CompiledInteraction(
        unit_name=unit.name, graph=graph, technique=sig.id,
        user_intents=user_intents, authoring_intents=authoring,
        provenance=unit.level, target=unit.target,
    )


def elaborate_intent(unit: InteractionSpec, doc: Document,
                     registry: Registry | None = None
                     ) -> tuple[list[CompiledInteraction], list[Diagnostic]]:
    """All technique candidates satisfiable for an intent-level unit, in
    registry order; empty plus hint diagnostics when nothing fits."""
    registry = registry or default_registry()
    if unit.intent is None:
        raise OpError(E041_UNKNOWN_INTENT, f"unit {unit.name!r} has no intent")
    candidates: list[CompiledInteraction] = []
    hints: list[Diagnostic] = []
    idx = next((i for i, u in enumerate(doc.interactions) if u.name == unit.name), 0)
    for tid in registry.techniques_for_user_intent(unit.intent):
        try:
            compiled = instantiate_technique(unit, doc, registry, technique=tid)
        except OpError as exc:
            hints.append(Diagnostic("hint", exc.code, f"/interactions/{idx}",
                                    f"{tid}: {exc}"))
            continue
        candidates.append(compiled)
    return candidates, (hints if not candidates else [])


def compile_document(doc: Document, registry: Registry | None = None
                     ) -> tuple[list[CompiledInteraction], list[Diagnostic]]:
    """Compile every interaction unit. Per-unit failures become diagnostics;
    the other units still compile."""
    registry = registry or default_registry()
    structural = [d for d in validate_document(doc) if d.severity == "error"]
    if structural:
        return [], structural

    compiled: list[CompiledInteraction] = []
    diags: list[Diagnostic] = []
    for idx, unit in enumerate(doc.interactions):
        path = f"/interactions/{idx}"
        try:
            if unit.level == "technique":
                compiled.append(instantiate_technique(unit, doc, registry))
            elif unit.level == "intent":
                candidates, hints = elaborate_intent(unit, doc, registry)
                chosen = None
                if "choose" in unit.bindings:
                    chosen = next((c for c in candidates if c.technique == unit.bindings["choose"]), None)
                    if chosen is None:
                        diags.append(Diagnostic("error", E050_MISSING_BINDING, path,
                                                f"chosen technique {unit.bindings['choose']!r} is not satisfiable"))
                        continue
                elif candidates:
                    chosen = candidates[0]
                if chosen is None:
                    diags.extend(hints)
                    diags.append(Diagnostic("error", E050_MISSING_BINDING, path,
                                            f"no technique for intent {unit.intent!r} is satisfiable here"))
                    continue
                compiled.append(chosen)
            else:  # component level
                graph = graph_from_dict(unit.components, binding=unit.on)
                report = classify_interaction(unit.name, graph, doc, target=unit.target, registry=registry)
                technique = report.technique or "unclassified"
                if report.technique is not None:
                    user_intents, authoring = registry.intents_of_technique(report.technique)
                else:
                    user_intents, authoring = (), ()
                compiled.append(CompiledInteraction(
                    unit_name=unit.name, graph=graph, technique=technique,
                    user_intents=user_intents, authoring_intents=authoring,
                    provenance="component", target=unit.target,
                ))
        except OpError as exc:
            diags.append(Diagnostic("error", exc.code, path, str(exc)))
    return compiled, diags


def classify_compiled(compiled: CompiledInteraction, doc: Document,
                      registry: Registry | None = None) -> ClassificationReport:
    return classify_interaction(compiled.unit_name, compiled.graph, doc,
                                target=compiled.target, registry=registry)


# ---------------------------------------------------------------------------
# Explain output

EXPLAIN_COLUMNS = ("Action", "User Intent", "Technique", "Event", "Listener",
                   "Hit Object", "Target", "Internal Components")


def explain_document(doc: Document, registry: Registry | None = None
                     ) -> tuple[list[ClassificationReport], list[Diagnostic]]:
    registry = registry or default_registry()
    compiled, diags = compile_document(doc, registry)
    reports = [classify_compiled(c, doc, registry) for c in compiled]
    return reports, diags


def explain_rows(reports: list[ClassificationReport]) -> list[list[str]]:
    rows = []
    for r in reports:
        rows.append([
            r.unit_name,
            r.user_intent or "unclassified",
            r.technique_display or "unclassified",
            r.event,
            r.listener,
            r.hit_object,
            r.target,
            ", ".join(r.internal_components) or "none",
        ])
    return rows


def explain_markdown(reports: list[ClassificationReport]) -> str:
    lines = ["| " + " | ".join(EXPLAIN_COLUMNS) + " |",
             "| " + " | ".join("---" for _ in EXPLAIN_COLUMNS) + " |"]
    for row in explain_rows(reports):
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def explain_json(reports: list[ClassificationReport]) -> list[dict]:
    return [r.to_dict() for r in reports]
