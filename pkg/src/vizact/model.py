"""Specification language: text -> Document, plus structural diagnostics.

The file format is UTF-8 JSON with top-level keys ``name, data, scales,
scenes, interactions, meta``. Parsing is total: malformed input of any
shape comes back as diagnostics, never as an exception.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

# Diagnostic codes are stable identifiers; do not renumber.
E000_MALFORMED = "E000_MALFORMED"
E001_UNRESOLVED_NAME = "E001_UNRESOLVED_NAME"
E002_UNKNOWN_KEY = "E002_UNKNOWN_KEY"
E003_WRONG_KIND = "E003_WRONG_KIND"
E004_DUPLICATE_NAME = "E004_DUPLICATE_NAME"
E005_CSV_UNREADABLE = "E005_CSV_UNREADABLE"
E010_MISSING_TECHNIQUE = "E010_MISSING_TECHNIQUE"
E011_MISSING_INTENT = "E011_MISSING_INTENT"
E012_MISSING_COMPONENTS = "E012_MISSING_COMPONENTS"
E020_UNKNOWN_FIELD = "E020_UNKNOWN_FIELD"
E021_OUTSIDE_ORDINAL_DOMAIN = "E021_OUTSIDE_ORDINAL_DOMAIN"
E022_NON_NUMERIC = "E022_NON_NUMERIC"
E023_SCHEMA_MISMATCH = "E023_SCHEMA_MISMATCH"
E030_UNRESOLVED_VARIABLE = "E030_UNRESOLVED_VARIABLE"
E031_ANCHOR_NOT_IN_TARGETS = "E031_ANCHOR_NOT_IN_TARGETS"
E032_KIND_MISMATCH = "E032_KIND_MISMATCH"
E033_BAD_ZOOM_FACTOR = "E033_BAD_ZOOM_FACTOR"
E040_UNKNOWN_TECHNIQUE = "E040_UNKNOWN_TECHNIQUE"
E041_UNKNOWN_INTENT = "E041_UNKNOWN_INTENT"
E050_MISSING_BINDING = "E050_MISSING_BINDING"
E051_SCOPE_MISMATCH = "E051_SCOPE_MISMATCH"
W001_UNKNOWN_KEY = "W001_UNKNOWN_KEY"

FIELD_KINDS = ("number", "string", "boolean", "date")
OBJECT_KINDS = ("mark", "glyph", "collection", "axis", "legend", "annotation", "scene", "section")
MARK_SHAPES = ("rect", "circle", "line", "path", "arc", "text", "image")
SCALE_KINDS = ("linear", "band", "point", "ordinal")
EVENT_KINDS = (
    "pointer_down", "pointer_up", "pointer_move", "click", "double_click",
    "drag_start", "drag_move", "drag_end", "wheel", "scroll",
    "key_down", "key_up", "ui_change",
)
CONTROL_KINDS = ("button", "dropdown", "slider", "checkbox", "tab", "breadcrumb", "scroller")
LEVELS = ("intent", "technique", "component")
PREDICATE_OPS = ("eq", "neq", "lt", "lte", "gt", "gte", "in", "not_in", "between")

# Channel name -> value kind. "px" channels are numbers; "visible" is the
# one boolean channel (annotation/scene display toggling).
CHANNELS: dict[str, str] = {
    "x": "number", "y": "number",
    "width": "number", "height": "number",
    "radius": "number", "innerRadius": "number",
    "startAngle": "number", "endAngle": "number",
    "fill": "string", "stroke": "string",
    "opacity": "number", "strokeWidth": "number",
    "text": "string", "order": "number",
    "visible": "boolean",
}

DEFAULT_STYLE = {"fill": "#4682b4", "opacity": 1.0, "strokeWidth": 1}

_ISO_DATE = re.compile(
    r"^\d{4}-\d{2}-\d{2}(T\d{2}:\d{2}(:\d{2})?(\.\d+)?(Z|[+-]\d{2}:\d{2})?)?$"
)


class OpError(Exception):
    """Operation failure with a stable diagnostic code."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


@dataclass(frozen=True)
class Diagnostic:
    """One structural finding, pointing into the source document."""

    severity: str  # error | warning | hint
    code: str
    path: str
    message: str

    def to_json(self) -> str:
        return json.dumps(
            {"severity": self.severity, "code": self.code, "path": self.path, "message": self.message}
        )


def _path_key(path: str) -> tuple:
    return tuple(int(p) if p.isdigit() else p for p in path.strip("/").split("/"))


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=lambda d: (_path_key(d.path), d.code))


@dataclass
class Predicate:
    """variable-operator-operand expression; ``@``-prefixed variables read
    visual channels instead of data fields. A null operand matches nothing."""

    variable: str
    op: str
    operand: Any = None
    conjuncts: list[Predicate] = field(default_factory=list)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"variable": self.variable, "op": self.op, "operand": self.operand}
        if self.conjuncts:
            d["conjuncts"] = [c.to_dict() for c in self.conjuncts]
        return d

    @staticmethod
    def from_dict(raw: dict) -> Predicate:
        return Predicate(
            variable=raw["variable"],
            op=raw["op"],
            operand=raw.get("operand"),
            conjuncts=[Predicate.from_dict(c) for c in raw.get("conjuncts", [])],
        )


_MISSING = object()


def predicate_matches(p: Predicate, resolve) -> bool:
    """Evaluate a predicate against ``resolve(variable) -> value``.

    A null operand matches nothing (the cleared-selection contract).
    ``between`` is inclusive on both ends. Raises OpError(E030) when the
    variable does not resolve.
    """
    value = resolve(p.variable)
    if value is _MISSING:
        raise OpError(E030_UNRESOLVED_VARIABLE, f"variable {p.variable!r} does not resolve on subject")
    op, operand = p.op, p.operand
    if operand is None:
        result = False  # cleared predicate matches nothing, whatever the op
    elif op == "eq":
        result = value == operand
    elif op == "neq":
        result = value != operand
    elif op == "lt":
        result = value < operand
    elif op == "lte":
        result = value <= operand
    elif op == "gt":
        result = value > operand
    elif op == "gte":
        result = value >= operand
    elif op == "in":
        result = value in operand
    elif op == "not_in":
        result = value not in operand
    elif op == "between":
        result = operand[0] <= value <= operand[1]
    else:
        raise OpError(E030_UNRESOLVED_VARIABLE, f"unknown predicate op {op!r}")
    if result and p.conjuncts:
        return all(predicate_matches(c, resolve) for c in p.conjuncts)
    return result


@dataclass
class DataTable:
    name: str
    fields: list[tuple[str, str]]  # (field name, field kind)
    rows: list[dict]
    key: str | None = None  # stable row key; defaults to first declared field

    @property
    def key_field(self) -> str:
        return self.key or self.fields[0][0]

    def field_kind(self, name: str) -> str | None:
        for fname, kind in self.fields:
            if fname == name:
                return kind
        return None


@dataclass
class ControlDecl:
    """A UI control listener declared inside a scene."""

    name: str
    kind: str
    options: list = field(default_factory=list)
    domain: list | None = None  # [lo, hi] for sliders
    label: str | None = None  # display label ("dropdown menu" by default)
    value_label: str | None = None  # what the options denote ("field", "set", ...)


@dataclass
class ObjectDecl:
    name: str
    kind: str
    mark_shape: str | None = None
    channels: dict = field(default_factory=dict)
    source_table: str | None = None
    template: ObjectDecl | None = None
    children: list[ObjectDecl] = field(default_factory=list)
    scale: str | None = None  # axis/legend
    orient: str | None = None
    key: str | None = None  # stable row key override for collections
    label: str | None = None
    label_plural: str | None = None


@dataclass
class SceneSpec:
    name: str
    width: float = 400
    height: float = 300
    x: float = 0
    y: float = 0
    objects: list[ObjectDecl] = field(default_factory=list)
    encodings: list[EncodingDecl] = field(default_factory=list)
    controls: list[ControlDecl] = field(default_factory=list)
    camera_enabled: bool = False
    initial_data: InitialData | None = None
    scroll_threshold: float | None = None  # section position for scroll navigation


@dataclass
class EncodingDecl:
    id: str
    target: str
    field: str
    channel: str
    scale: str


@dataclass
class InitialData:
    table: str
    where: Predicate | None = None


@dataclass
class ScaleDef:
    id: str
    kind: str
    domain: Any  # [lo, hi] | [categories...] | {"table":..., "field":...}
    range: list
    band_padding: float = 0.0


@dataclass
class EventBinding:
    event: str
    listener: str
    key: str | None = None


@dataclass
class Selector:
    """Target selector: by name(s), by object kind, by collection membership,
    or a whole scene."""

    kind: str  # names | object_kind | collection | scene
    value: Any

    @staticmethod
    def from_raw(raw: Any) -> Selector:
        if isinstance(raw, str):
            return Selector("names", [raw])
        if isinstance(raw, list):
            return Selector("names", list(raw))
        if isinstance(raw, dict):
            if "kind" in raw:
                return Selector("object_kind", raw["kind"])
            if "collection" in raw:
                return Selector("collection", raw["collection"])
            if "scene" in raw:
                return Selector("scene", raw["scene"])
        raise ValueError(f"bad selector: {raw!r}")

    def to_raw(self) -> Any:
        if self.kind == "names":
            return self.value if len(self.value) != 1 else self.value[0]
        return {self.kind if self.kind != "object_kind" else "kind": self.value}


@dataclass
class InteractionSpec:
    name: str
    level: str
    on: EventBinding
    target: Selector
    intent: str | None = None  # user intent id
    technique: str | None = None
    components: dict | None = None  # raw component-graph fragment
    bindings: dict = field(default_factory=dict)


@dataclass
class Document:
    name: str
    data: list[DataTable] = field(default_factory=list)
    scales: list[ScaleDef] = field(default_factory=list)
    scenes: list[SceneSpec] = field(default_factory=list)
    interactions: list[InteractionSpec] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def table(self, name: str) -> DataTable | None:
        for t in self.data:
            if t.name == name:
                return t
        return None

    def scale(self, sid: str) -> ScaleDef | None:
        for s in self.scales:
            if s.id == sid:
                return s
        return None

    def scene(self, name: str) -> SceneSpec | None:
        for s in self.scenes:
            if s.name == name:
                return s
        return None

    def object_decl(self, name: str) -> tuple[SceneSpec, ObjectDecl] | None:
        for sc in self.scenes:
            for od in _walk_decls(sc.objects):
                if od.name == name:
                    return sc, od
        return None

    def control(self, name: str) -> tuple[SceneSpec, ControlDecl] | None:
        for sc in self.scenes:
            for c in sc.controls:
                if c.name == name:
                    return sc, c
        return None

    def listener_scene(self, listener: str) -> SceneSpec | None:
        """Scene a listener is bound to: scene name = its canvas listener,
        control names resolve to their declaring scene."""
        sc = self.scene(listener)
        if sc is not None:
            return sc
        hit = self.control(listener)
        return hit[0] if hit else None

    def encoding(self, eid: str) -> EncodingDecl | None:
        for sc in self.scenes:
            for e in sc.encodings:
                if e.id == eid:
                    return e
        return None


def _walk_decls(decls: list[ObjectDecl]):
    for d in decls:
        yield d
        if d.template is not None:
            yield from _walk_decls([d.template])
        yield from _walk_decls(d.children)


# ---------------------------------------------------------------------------
# Parsing


class _Ctx:
    def __init__(self, base: Path | None):
        self.base = base
        self.diags: list[Diagnostic] = []

    def error(self, code: str, path: str, message: str) -> None:
        self.diags.append(Diagnostic("error", code, path, message))

    def warn(self, code: str, path: str, message: str) -> None:
        self.diags.append(Diagnostic("warning", code, path, message))

    @property
    def failed(self) -> bool:
        return any(d.severity == "error" for d in self.diags)


def _check_keys(ctx: _Ctx, raw: dict, allowed: set[str], path: str) -> None:
    for k in raw:
        if k not in allowed:
            ctx.warn(W001_UNKNOWN_KEY, f"{path}/{k}", f"unknown key {k!r} ignored")


def _expect(ctx: _Ctx, raw: dict, key: str, types: tuple, path: str, default=None, required=False):
    if key not in raw:
        if required:
            ctx.error(E003_WRONG_KIND, path, f"missing required key {key!r}")
        return default
    v = raw[key]
    if not isinstance(v, types):
        ctx.error(E003_WRONG_KIND, f"{path}/{key}", f"{key!r} has wrong kind: expected {'/'.join(t.__name__ for t in types)}")
        return default
    return v


def _value_matches(kind: str, v: Any) -> bool:
    if kind == "number":
        return isinstance(v, (int, float)) and not isinstance(v, bool)
    if kind == "string":
        return isinstance(v, str)
    if kind == "boolean":
        return isinstance(v, bool)
    if kind == "date":
        return isinstance(v, str) and bool(_ISO_DATE.match(v))
    return False


def _infer_kind(values: list) -> str:
    vals = [v for v in values if v is not None]
    if vals and all(isinstance(v, bool) for v in vals):
        return "boolean"
    if vals and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
        return "number"
    if vals and all(isinstance(v, str) and _ISO_DATE.match(v) for v in vals):
        return "date"
    return "string"


def _coerce_csv(value: str, kind: str):
    if kind == "number":
        f = float(value)
        return int(f) if f.is_integer() else f
    if kind == "boolean":
        return value.lower() == "true"
    return value


def _parse_csv_rows(ctx: _Ctx, rel: str, path: str) -> tuple[list[str], list[dict]] | None:
    if ctx.base is None:
        ctx.error(E005_CSV_UNREADABLE, path, f"csv {rel!r} cannot be resolved without a base directory")
        return None
    target = ctx.base / rel
    try:
        text = target.read_text(encoding="utf-8")
    except OSError as exc:
        ctx.error(E005_CSV_UNREADABLE, path, f"cannot read csv {rel!r}: {exc}")
        return None
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        ctx.error(E005_CSV_UNREADABLE, path, f"csv {rel!r} is empty")
        return None
    header = rows[0]
    records = [dict(zip(header, r)) for r in rows[1:]]
    return header, records


def _parse_table(ctx: _Ctx, raw: Any, path: str) -> DataTable | None:
    if not isinstance(raw, dict):
        ctx.error(E003_WRONG_KIND, path, "table must be an object")
        return None
    _check_keys(ctx, raw, {"name", "fields", "rows", "key"}, path)
    name = _expect(ctx, raw, "name", (str,), path, required=True)
    if name is None:
        return None
    raw_rows = raw.get("rows", [])
    from_csv = False
    if isinstance(raw_rows, dict) and "csv" in raw_rows:
        loaded = _parse_csv_rows(ctx, raw_rows["csv"], f"{path}/rows")
        if loaded is None:
            return None
        header, rows = loaded
        from_csv = True
    elif isinstance(raw_rows, list):
        rows = []
        for j, r in enumerate(raw_rows):
            if not isinstance(r, dict):
                ctx.error(E003_WRONG_KIND, f"{path}/rows/{j}", "row must be an object")
                return None
            rows.append(dict(r))
        header = list(rows[0].keys()) if rows else []
    else:
        ctx.error(E003_WRONG_KIND, f"{path}/rows", "rows must be a list or {\"csv\": path}")
        return None

    declared: list[tuple[str, str]] = []
    for j, f in enumerate(raw.get("fields", [])):
        if not isinstance(f, dict) or "name" not in f or "kind" not in f:
            ctx.error(E003_WRONG_KIND, f"{path}/fields/{j}", "field must be {name, kind}")
            return None
        if f["kind"] not in FIELD_KINDS:
            ctx.error(E003_WRONG_KIND, f"{path}/fields/{j}/kind", f"unknown field kind {f['kind']!r}")
            return None
        declared.append((f["name"], f["kind"]))

    if not declared:
        names = header if (from_csv or rows) else []
        if from_csv:
            declared = [(n, _infer_kind([_try_infer_csv(r.get(n, "")) for r in rows])) for n in names]
        else:
            declared = [(n, _infer_kind([r.get(n) for r in rows])) for n in names]

    if from_csv:
        cast_rows = []
        for j, r in enumerate(rows):
            out = {}
            for fname, kind in declared:
                rawv = r.get(fname, "")
                try:
                    out[fname] = _coerce_csv(rawv, kind)
                except ValueError:
                    ctx.error(E003_WRONG_KIND, f"{path}/rows/{j}/{fname}", f"csv value {rawv!r} is not a {kind}")
                    return None
            cast_rows.append(out)
        rows = cast_rows

    fieldnames = [f for f, _ in declared]
    for j, r in enumerate(rows):
        if set(r.keys()) != set(fieldnames):
            ctx.error(E003_WRONG_KIND, f"{path}/rows/{j}", "row fields do not match declared fields")
            return None
        for fname, kind in declared:
            if not _value_matches(kind, r[fname]):
                ctx.error(E003_WRONG_KIND, f"{path}/rows/{j}/{fname}", f"value {r[fname]!r} is not a {kind}")
                return None

    key = raw.get("key")
    return DataTable(name=name, fields=declared, rows=rows, key=key)


def _try_infer_csv(v: str):
    try:
        f = float(v)
        return int(f) if f.is_integer() else f
    except ValueError:
        pass
    if v.lower() in ("true", "false"):
        return v.lower() == "true"
    return v


def _parse_scale(ctx: _Ctx, raw: Any, path: str) -> ScaleDef | None:
    if not isinstance(raw, dict):
        ctx.error(E003_WRONG_KIND, path, "scale must be an object")
        return None
    _check_keys(ctx, raw, {"id", "kind", "domain", "range", "bandPadding"}, path)
    sid = _expect(ctx, raw, "id", (str,), path, required=True)
    kind = _expect(ctx, raw, "kind", (str,), path, required=True)
    if sid is None or kind is None:
        return None
    if kind not in SCALE_KINDS:
        ctx.error(E003_WRONG_KIND, f"{path}/kind", f"unknown scale kind {kind!r}")
        return None
    domain = raw.get("domain")
    rng = raw.get("range")
    if not isinstance(rng, list):
        ctx.error(E003_WRONG_KIND, f"{path}/range", "range must be a list")
        return None
    if not (isinstance(domain, (list, dict))):
        ctx.error(E003_WRONG_KIND, f"{path}/domain", "domain must be a list or {table, field}")
        return None
    pad = raw.get("bandPadding", 0.0)
    if not isinstance(pad, (int, float)) or isinstance(pad, bool) or not (0 <= pad < 1):
        ctx.error(E003_WRONG_KIND, f"{path}/bandPadding", "bandPadding must be in [0, 1)")
        return None
    return ScaleDef(id=sid, kind=kind, domain=domain, range=rng, band_padding=float(pad))


def _parse_channels(ctx: _Ctx, raw: Any, path: str) -> dict:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        ctx.error(E003_WRONG_KIND, path, "channels must be an object")
        return {}
    out = {}
    for k, v in raw.items():
        if k not in CHANNELS:
            ctx.warn(W001_UNKNOWN_KEY, f"{path}/{k}", f"unknown channel {k!r} ignored")
            continue
        if not _value_matches(CHANNELS[k], v):
            ctx.error(E003_WRONG_KIND, f"{path}/{k}", f"channel {k!r} expects a {CHANNELS[k]}")
            continue
        out[k] = v
    return out


_OBJECT_KEYS = {
    "name", "kind", "markShape", "channels", "sourceTable", "template",
    "children", "scale", "orient", "key", "label", "labelPlural",
}


def _parse_object(ctx: _Ctx, raw: Any, path: str, anonymous_ok: bool = False) -> ObjectDecl | None:
    if not isinstance(raw, dict):
        ctx.error(E003_WRONG_KIND, path, "object must be an object")
        return None
    _check_keys(ctx, raw, _OBJECT_KEYS, path)
    name = raw.get("name", "" if anonymous_ok else None)
    if name is None:
        ctx.error(E003_WRONG_KIND, path, "object requires a name")
        return None
    kind = _expect(ctx, raw, "kind", (str,), path, required=True)
    if kind is None:
        return None
    if kind not in OBJECT_KINDS:
        ctx.error(E003_WRONG_KIND, f"{path}/kind", f"unknown object kind {kind!r}")
        return None
    shape = raw.get("markShape")
    if shape is not None and shape not in MARK_SHAPES:
        ctx.error(E003_WRONG_KIND, f"{path}/markShape", f"unknown mark shape {shape!r}")
        return None
    if kind == "mark" and shape is None:
        shape = "rect"
    channels = _parse_channels(ctx, raw.get("channels"), f"{path}/channels")
    if kind in ("mark", "glyph", "annotation"):
        for k, v in DEFAULT_STYLE.items():
            channels.setdefault(k, v)
    template = None
    if raw.get("template") is not None:
        template = _parse_object(ctx, raw["template"], f"{path}/template", anonymous_ok=True)
    children = []
    for j, c in enumerate(raw.get("children", [])):
        child = _parse_object(ctx, c, f"{path}/children/{j}")
        if child is not None:
            children.append(child)
    if kind == "collection" and not raw.get("sourceTable"):
        ctx.error(E003_WRONG_KIND, f"{path}/sourceTable", "collection requires a sourceTable")
        return None
    if kind == "collection" and template is None:
        ctx.error(E003_WRONG_KIND, f"{path}/template", "collection requires a per-row template")
        return None
    return ObjectDecl(
        name=name, kind=kind, mark_shape=shape, channels=channels,
        source_table=raw.get("sourceTable"), template=template, children=children,
        scale=raw.get("scale"), orient=raw.get("orient"), key=raw.get("key"),
        label=raw.get("label"), label_plural=raw.get("labelPlural"),
    )


def _parse_control(ctx: _Ctx, raw: Any, path: str) -> ControlDecl | None:
    if not isinstance(raw, dict):
        ctx.error(E003_WRONG_KIND, path, "control must be an object")
        return None
    _check_keys(ctx, raw, {"name", "kind", "options", "domain", "label", "valueLabel"}, path)
    name = _expect(ctx, raw, "name", (str,), path, required=True)
    kind = _expect(ctx, raw, "kind", (str,), path, required=True)
    if name is None or kind is None:
        return None
    if kind not in CONTROL_KINDS:
        ctx.error(E003_WRONG_KIND, f"{path}/kind", f"unknown control kind {kind!r}")
        return None
    options = raw.get("options", [])
    domain = raw.get("domain")
    if kind in ("dropdown", "tab", "breadcrumb", "checkbox") and not options and domain is None:
        ctx.error(E003_WRONG_KIND, f"{path}/options", f"{kind} control must declare its value domain")
        return None
    if kind in ("slider", "scroller") and domain is None and not options:
        ctx.error(E003_WRONG_KIND, f"{path}/domain", f"{kind} control must declare its value domain")
        return None
    return ControlDecl(
        name=name, kind=kind, options=list(options), domain=domain,
        label=raw.get("label"), value_label=raw.get("valueLabel"),
    )


def _parse_encoding(ctx: _Ctx, raw: Any, path: str, index: int) -> EncodingDecl | None:
    if not isinstance(raw, dict):
        ctx.error(E003_WRONG_KIND, path, "encoding must be an object")
        return None
    _check_keys(ctx, raw, {"id", "target", "field", "channel", "scale"}, path)
    missing = [k for k in ("target", "field", "channel", "scale") if not isinstance(raw.get(k), str)]
    if missing:
        ctx.error(E003_WRONG_KIND, path, f"encoding requires string keys {missing}")
        return None
    return EncodingDecl(
        id=raw.get("id", f"encoding{index}"), target=raw["target"], field=raw["field"],
        channel=raw["channel"], scale=raw["scale"],
    )


_SCENE_KEYS = {
    "name", "width", "height", "x", "y", "objects", "encodings", "controls",
    "cameraEnabled", "initialData", "scrollThreshold",
}


def _parse_scene(ctx: _Ctx, raw: Any, path: str) -> SceneSpec | None:
    if not isinstance(raw, dict):
        ctx.error(E003_WRONG_KIND, path, "scene must be an object")
        return None
    _check_keys(ctx, raw, _SCENE_KEYS, path)
    name = _expect(ctx, raw, "name", (str,), path, required=True)
    if name is None:
        return None
    objects = []
    for j, o in enumerate(raw.get("objects", [])):
        od = _parse_object(ctx, o, f"{path}/objects/{j}")
        if od is not None:
            objects.append(od)
    encodings = []
    for j, e in enumerate(raw.get("encodings", [])):
        ed = _parse_encoding(ctx, e, f"{path}/encodings/{j}", j)
        if ed is not None:
            encodings.append(ed)
    controls = []
    for j, c in enumerate(raw.get("controls", [])):
        cd = _parse_control(ctx, c, f"{path}/controls/{j}")
        if cd is not None:
            controls.append(cd)
    initial = None
    rawinit = raw.get("initialData")
    if isinstance(rawinit, str):
        initial = InitialData(table=rawinit)
    elif isinstance(rawinit, dict):
        try:
            where = Predicate.from_dict(rawinit["where"]) if "where" in rawinit else None
            initial = InitialData(table=rawinit["table"], where=where)
        except (KeyError, TypeError):
            ctx.error(E003_WRONG_KIND, f"{path}/initialData", "initialData must be a table name or {table, where}")
    elif rawinit is not None:
        ctx.error(E003_WRONG_KIND, f"{path}/initialData", "initialData must be a table name or {table, where}")
    return SceneSpec(
        name=name,
        width=float(raw.get("width", 400)), height=float(raw.get("height", 300)),
        x=float(raw.get("x", 0)), y=float(raw.get("y", 0)),
        objects=objects, encodings=encodings, controls=controls,
        camera_enabled=bool(raw.get("cameraEnabled", False)),
        initial_data=initial,
        scroll_threshold=raw.get("scrollThreshold"),
    )


_INTERACTION_KEYS = {"name", "level", "on", "target", "intent", "technique", "components", "bindings"}


def _parse_interaction(ctx: _Ctx, raw: Any, path: str) -> InteractionSpec | None:
    if not isinstance(raw, dict):
        ctx.error(E003_WRONG_KIND, path, "interaction must be an object")
        return None
    _check_keys(ctx, raw, _INTERACTION_KEYS, path)
    name = _expect(ctx, raw, "name", (str,), path, required=True)
    on_raw = raw.get("on")
    if name is None:
        return None
    if not isinstance(on_raw, dict) or "event" not in on_raw or "listener" not in on_raw:
        ctx.error(E003_WRONG_KIND, f"{path}/on", "interaction requires on: {event, listener}")
        return None
    if on_raw["event"] not in EVENT_KINDS:
        ctx.error(E003_WRONG_KIND, f"{path}/on/event", f"unknown event kind {on_raw['event']!r}")
        return None
    if "target" not in raw:
        ctx.error(E003_WRONG_KIND, f"{path}/target", "interaction requires at least one target")
        return None
    try:
        target = Selector.from_raw(raw["target"])
    except ValueError:
        ctx.error(E003_WRONG_KIND, f"{path}/target", "bad target selector")
        return None
    if target.kind == "names" and not target.value:
        ctx.error(E003_WRONG_KIND, f"{path}/target", "interaction requires at least one target")
        return None

    intent = raw.get("intent")
    if isinstance(intent, dict):
        intent = intent.get("user")
    technique = raw.get("technique")
    components = raw.get("components")

    level = raw.get("level")
    if level is None:
        level = "component" if components else ("technique" if technique else "intent")
    if level not in LEVELS:
        ctx.error(E003_WRONG_KIND, f"{path}/level", f"unknown level {level!r}")
        return None
    if level == "intent" and not intent:
        ctx.error(E011_MISSING_INTENT, path, "level=intent requires an intent")
        return None
    if level == "technique" and not technique:
        ctx.error(E010_MISSING_TECHNIQUE, path, "level=technique requires a technique")
        return None
    if level == "component" and not components:
        ctx.error(E012_MISSING_COMPONENTS, path, "level=component requires components")
        return None

    return InteractionSpec(
        name=name, level=level,
        on=EventBinding(event=on_raw["event"], listener=on_raw["listener"], key=on_raw.get("key")),
        target=target, intent=intent, technique=technique,
        components=components, bindings=dict(raw.get("bindings", {})),
    )


_TOP_KEYS = {"name", "data", "scales", "scenes", "interactions", "meta"}


def parse_document(text: str, base: Path | str | None = None) -> Document | list[Diagnostic]:
    """Parse a specification. Returns the Document on success, else the
    (non-empty, path-sorted) error diagnostics. ``base`` resolves csv paths."""

    ctx = _Ctx(Path(base) if base is not None else None)
    try:
        raw = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        return [Diagnostic("error", E000_MALFORMED, "/", f"malformed JSON: {exc}")]
    if not isinstance(raw, dict):
        return [Diagnostic("error", E000_MALFORMED, "/", "top level must be a JSON object")]

    for k in raw:
        if k not in _TOP_KEYS:
            ctx.error(E002_UNKNOWN_KEY, f"/{k}", f"unknown top-level key {k!r}")

    name = raw.get("name")
    if not isinstance(name, str):
        ctx.error(E003_WRONG_KIND, "/name", "document requires a string name")
        name = ""

    def _section(key: str) -> list:
        v = raw.get(key, [])
        if not isinstance(v, list):
            ctx.error(E003_WRONG_KIND, f"/{key}", f"{key} must be a list")
            return []
        return v

    data = [t for t in (_parse_table(ctx, r, f"/data/{j}") for j, r in enumerate(_section("data"))) if t]
    scales = [s for s in (_parse_scale(ctx, r, f"/scales/{j}") for j, r in enumerate(_section("scales"))) if s]
    scenes = [s for s in (_parse_scene(ctx, r, f"/scenes/{j}") for j, r in enumerate(_section("scenes"))) if s]
    interactions = [
        i for i in (_parse_interaction(ctx, r, f"/interactions/{j}") for j, r in enumerate(_section("interactions")))
        if i
    ]
    meta = raw.get("meta", {})
    if not isinstance(meta, dict):
        ctx.error(E003_WRONG_KIND, "/meta", "meta must be an object")
        meta = {}

    if ctx.failed:
        return sort_diagnostics([d for d in ctx.diags if d.severity == "error"])
    doc = Document(name=name, data=data, scales=scales, scenes=scenes, interactions=interactions, meta=dict(meta))
    return doc


# ---------------------------------------------------------------------------
# Serialization


def _object_to_raw(o: ObjectDecl) -> dict:
    d: dict[str, Any] = {"name": o.name, "kind": o.kind}
    if o.mark_shape:
        d["markShape"] = o.mark_shape
    if o.channels:
        d["channels"] = dict(o.channels)
    if o.source_table:
        d["sourceTable"] = o.source_table
    if o.template is not None:
        t = _object_to_raw(o.template)
        if not o.template.name:
            t.pop("name", None)
        d["template"] = t
    if o.children:
        d["children"] = [_object_to_raw(c) for c in o.children]
    if o.scale:
        d["scale"] = o.scale
    if o.orient:
        d["orient"] = o.orient
    if o.key:
        d["key"] = o.key
    if o.label:
        d["label"] = o.label
    if o.label_plural:
        d["labelPlural"] = o.label_plural
    return d


def document_to_raw(doc: Document) -> dict:
    """Document -> plain JSON-ready dict (the inverse of parse_document)."""
    raw: dict[str, Any] = {"name": doc.name}
    raw["data"] = [
        {"name": t.name, "fields": [{"name": f, "kind": k} for f, k in t.fields], "rows": t.rows,
         **({"key": t.key} if t.key else {})}
        for t in doc.data
    ]
    raw["scales"] = [
        {"id": s.id, "kind": s.kind, "domain": s.domain, "range": s.range,
         **({"bandPadding": s.band_padding} if s.band_padding else {})}
        for s in doc.scales
    ]
    raw["scenes"] = []
    for sc in doc.scenes:
        entry: dict[str, Any] = {
            "name": sc.name, "width": sc.width, "height": sc.height, "x": sc.x, "y": sc.y,
            "objects": [_object_to_raw(o) for o in sc.objects],
            "encodings": [
                {"id": e.id, "target": e.target, "field": e.field, "channel": e.channel, "scale": e.scale}
                for e in sc.encodings
            ],
            "cameraEnabled": sc.camera_enabled,
        }
        if sc.controls:
            entry["controls"] = [
                {"name": c.name, "kind": c.kind,
                 **({"options": c.options} if c.options else {}),
                 **({"domain": c.domain} if c.domain is not None else {}),
                 **({"label": c.label} if c.label else {}),
                 **({"valueLabel": c.value_label} if c.value_label else {})}
                for c in sc.controls
            ]
        if sc.initial_data is not None:
            init: dict[str, Any] = {"table": sc.initial_data.table}
            if sc.initial_data.where is not None:
                init["where"] = sc.initial_data.where.to_dict()
            entry["initialData"] = init
        if sc.scroll_threshold is not None:
            entry["scrollThreshold"] = sc.scroll_threshold
        raw["scenes"].append(entry)
    raw["interactions"] = []
    for i in doc.interactions:
        entry = {"name": i.name, "level": i.level,
                 "on": {"event": i.on.event, "listener": i.on.listener,
                        **({"key": i.on.key} if i.on.key else {})},
                 "target": i.target.to_raw()}
        if i.intent:
            entry["intent"] = i.intent
        if i.technique:
            entry["technique"] = i.technique
        if i.components:
            entry["components"] = i.components
        if i.bindings:
            entry["bindings"] = i.bindings
        raw["interactions"].append(entry)
    if doc.meta:
        raw["meta"] = doc.meta
    return raw


def serialize_document(doc: Document) -> str:
    return json.dumps(document_to_raw(doc), indent=2)


# ---------------------------------------------------------------------------
# Validation


def validate_document(doc: Document) -> list[Diagnostic]:
    """Structural cross-reference and invariant checks. Empty list iff the
    document is internally consistent. Never mutates."""

    diags: list[Diagnostic] = []

    def dup_check(names: list[tuple[str, str]]):
        seen: dict[str, str] = {}
        for name, path in names:
            if name in seen:
                diags.append(Diagnostic("error", E004_DUPLICATE_NAME, path, f"duplicate name {name!r}"))
            else:
                seen[name] = path

    dup_check([(t.name, f"/data/{j}/name") for j, t in enumerate(doc.data)])
    dup_check([(s.id, f"/scales/{j}/id") for j, s in enumerate(doc.scales)])
    dup_check([(s.name, f"/scenes/{j}/name") for j, s in enumerate(doc.scenes)])
    dup_check([(i.name, f"/interactions/{j}/name") for j, i in enumerate(doc.interactions)])

    object_names = []
    control_names = []
    for j, sc in enumerate(doc.scenes):
        for k, od in enumerate(sc.objects):
            for d in _walk_decls([od]):
                if d.name:
                    object_names.append((d.name, f"/scenes/{j}/objects/{k}"))
        for k, c in enumerate(sc.controls):
            control_names.append((c.name, f"/scenes/{j}/controls/{k}"))
    dup_check(object_names)
    dup_check(control_names)

    table_names = {t.name for t in doc.data}
    scale_ids = {s.id for s in doc.scales}
    scene_names = {s.name for s in doc.scenes}
    obj_names = {n for n, _ in object_names}
    ctrl_names = {n for n, _ in control_names}

    for j, s in enumerate(doc.scales):
        if isinstance(s.domain, dict):
            t = s.domain.get("table")
            f = s.domain.get("field")
            table = doc.table(t) if isinstance(t, str) else None
            if table is None:
                diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"/scales/{j}/domain", f"unknown table {t!r}"))
            elif table.field_kind(f) is None:
                diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"/scales/{j}/domain", f"unknown field {f!r} in table {t!r}"))
        elif s.kind == "linear":
            d = s.domain
            if not (isinstance(d, list) and len(d) == 2 and d[0] != d[1]):
                diags.append(Diagnostic("error", E003_WRONG_KIND, f"/scales/{j}/domain", "linear domain must be a pair with distinct endpoints"))
        elif s.kind in ("band", "point", "ordinal") and isinstance(s.domain, list):
            if len(set(map(str, s.domain))) != len(s.domain):
                diags.append(Diagnostic("error", E003_WRONG_KIND, f"/scales/{j}/domain", "ordinal domain values must be unique"))

    for j, sc in enumerate(doc.scenes):
        for k, od in enumerate(sc.objects):
            for d in _walk_decls([od]):
                if d.kind == "collection" and d.source_table and d.source_table not in table_names:
                    diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"/scenes/{j}/objects/{k}/sourceTable", f"unknown table {d.source_table!r}"))
                if d.kind == "collection" and d.source_table in table_names:
                    table = doc.table(d.source_table)
                    keyf = d.key or table.key_field
                    if table.field_kind(keyf) is None:
                        diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"/scenes/{j}/objects/{k}/key", f"unknown key field {keyf!r}"))
                if d.kind in ("axis", "legend"):
                    if d.scale is None or d.scale not in scale_ids:
                        diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"/scenes/{j}/objects/{k}/scale", f"{d.kind} references unknown scale {d.scale!r}"))
        for k, e in enumerate(sc.encodings):
            epath = f"/scenes/{j}/encodings/{k}"
            target = doc.object_decl(e.target)
            if target is None:
                diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"{epath}/target", f"unknown object {e.target!r}"))
            else:
                _, od = target
                st = od.source_table
                table = doc.table(st) if st else None
                if table is not None and table.field_kind(e.field) is None:
                    diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"{epath}/field", f"field {e.field!r} not in table {st!r}"))
            if e.channel not in CHANNELS:
                diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"{epath}/channel", f"unknown channel {e.channel!r}"))
            if e.scale not in scale_ids:
                diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"{epath}/scale", f"unknown scale {e.scale!r}"))
        if sc.initial_data is not None and sc.initial_data.table not in table_names:
            diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"/scenes/{j}/initialData", f"unknown table {sc.initial_data.table!r}"))

    for j, i in enumerate(doc.interactions):
        ipath = f"/interactions/{j}"
        if i.on.listener not in scene_names and i.on.listener not in ctrl_names:
            diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"{ipath}/on/listener", f"unknown listener {i.on.listener!r}"))
        if i.target.kind == "names":
            for nm in i.target.value:
                base = nm.split("/")[0]  # members of a collection resolve by prefix
                if nm not in obj_names and nm not in scene_names and base not in obj_names:
                    diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"{ipath}/target", f"unknown target {nm!r}"))
        elif i.target.kind == "collection" and i.target.value not in obj_names:
            diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"{ipath}/target", f"unknown collection {i.target.value!r}"))
        elif i.target.kind == "scene" and i.target.value not in scene_names:
            diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"{ipath}/target", f"unknown scene {i.target.value!r}"))
        elif i.target.kind == "object_kind" and i.target.value not in OBJECT_KINDS:
            diags.append(Diagnostic("error", E001_UNRESOLVED_NAME, f"{ipath}/target", f"unknown object kind {i.target.value!r}"))
        if i.level == "intent" and not i.intent:
            diags.append(Diagnostic("error", E011_MISSING_INTENT, ipath, "level=intent requires an intent"))
        if i.level == "technique" and not i.technique:
            diags.append(Diagnostic("error", E010_MISSING_TECHNIQUE, ipath, "level=technique requires a technique"))
        if i.level == "component" and not i.components:
            diags.append(Diagnostic("error", E012_MISSING_COMPONENTS, ipath, "level=component requires components"))

    return sort_diagnostics(diags)
