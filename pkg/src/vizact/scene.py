"""Static representation: the visual-object hierarchy, channels, scales,
encodings and data binding that interactions mutate.

Positions come only from encodings and scales; there is no constraint or
stacking layout engine here.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field, replace
from typing import Any, Iterator

from .model import (
    CHANNELS,
    E001_UNRESOLVED_NAME,
    E020_UNKNOWN_FIELD,
    E021_OUTSIDE_ORDINAL_DOMAIN,
    E022_NON_NUMERIC,
    E023_SCHEMA_MISMATCH,
    DataTable,
    Document,
    EncodingDecl,
    ObjectDecl,
    OpError,
    ScaleDef,
    SceneSpec,
    predicate_matches,
)

ChannelDiff = tuple[str, str, Any, Any]  # (object id, channel, old, new)


@dataclass
class ChannelSet:
    """Visual channels of one object. Sizes are non-negative, opacity in [0,1]."""

    x: float = 0.0
    y: float = 0.0
    width: float = 0.0
    height: float = 0.0
    radius: float = 0.0
    innerRadius: float = 0.0
    startAngle: float = 0.0
    endAngle: float = 0.0
    fill: str = "#4682b4"
    stroke: str = "none"
    opacity: float = 1.0
    strokeWidth: float = 1.0
    text: str = ""
    order: float = 0.0
    visible: bool = True

    def get(self, channel: str):
        return getattr(self, channel)

    def set(self, channel: str, value, mark_shape: str | None = None) -> None:
        check_channel_value(channel, value, mark_shape)
        setattr(self, channel, value)

    def copy(self) -> ChannelSet:
        return replace(self)


# width/height act as signed endpoint deltas on segment-like marks, so the
# non-negativity invariant applies to area marks only
_SIGNED_EXTENT_SHAPES = ("line", "path")


def check_channel_value(channel: str, value, mark_shape: str | None = None) -> None:
    if channel not in CHANNELS:
        raise OpError(E001_UNRESOLVED_NAME, f"unknown channel {channel!r}")
    if channel == "opacity" and not (0.0 <= value <= 1.0):
        raise OpError(E022_NON_NUMERIC, f"opacity {value!r} outside [0, 1]")
    if channel in ("width", "height") and mark_shape in _SIGNED_EXTENT_SHAPES:
        return
    if channel in ("width", "height", "radius", "innerRadius", "strokeWidth") and value < 0:
        raise OpError(E022_NON_NUMERIC, f"{channel} must be non-negative, got {value!r}")


@dataclass
class VisualObject:
    id: str
    kind: str  # mark | glyph | collection | axis | legend | annotation | scene | section
    decl_name: str  # name of the declaration this instance came from
    mark_shape: str | None = None
    channels: ChannelSet = field(default_factory=ChannelSet)
    children: list[str] = field(default_factory=list)
    datum: dict | None = None
    source_table: str | None = None
    row_key: str | None = None  # stable key of the bound row (collection members)
    label: str | None = None
    label_plural: str | None = None

    @property
    def visible(self) -> bool:
        return self.channels.visible


@dataclass
class Scale:
    """A realized scale mapping data values to channel values."""

    id: str
    kind: str  # linear | band | point | ordinal
    domain: list
    range: list
    band_padding: float = 0.0
    date_domain: bool = False  # linear scale over ISO dates

    def __post_init__(self):
        if self.kind == "linear":
            if len(self.domain) != 2 or self.domain[0] == self.domain[1]:
                raise OpError(E022_NON_NUMERIC, f"scale {self.id}: linear domain must be a distinct pair")
            self.date_domain = isinstance(self.domain[0], str)
        elif len(set(map(_cat, self.domain))) != len(self.domain):
            raise OpError(E021_OUTSIDE_ORDINAL_DOMAIN, f"scale {self.id}: duplicate domain categories")

    def _num_domain(self) -> tuple[float, float]:
        if self.date_domain:
            return (_date_num(self.domain[0]), _date_num(self.domain[1]))
        return (float(self.domain[0]), float(self.domain[1]))

    def __call__(self, value):
        if self.kind == "linear":
            if self.date_domain:
                if not isinstance(value, str):
                    raise OpError(E022_NON_NUMERIC, f"scale {self.id}: {value!r} is not a date")
                v = _date_num(value)
            else:
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise OpError(E022_NON_NUMERIC, f"scale {self.id}: {value!r} is not numeric")
                v = float(value)
            d0, d1 = self._num_domain()
            r0, r1 = self.range
            return r0 + (v - d0) * (r1 - r0) / (d1 - d0)
        cats = [_cat(c) for c in self.domain]
        key = _cat(value)
        if key not in cats:
            raise OpError(E021_OUTSIDE_ORDINAL_DOMAIN, f"scale {self.id}: {value!r} outside domain")
        i = cats.index(key)
        if self.kind == "ordinal":
            return self.range[i % len(self.range)]
        r0, r1 = self.range
        n = len(cats)
        if self.kind == "band":
            step = (r1 - r0) / n
            return r0 + i * step + step * self.band_padding / 2
        # point scale
        if n == 1:
            return (r0 + r1) / 2
        return r0 + i * (r1 - r0) / (n - 1)

    @property
    def bandwidth(self) -> float:
        if self.kind != "band":
            return 0.0
        step = (self.range[1] - self.range[0]) / len(self.domain)
        return abs(step) * (1 - self.band_padding)

    def invert(self, pos: float):
        """Channel value -> data value (linear scales only)."""
        d0, d1 = self._num_domain()
        r0, r1 = self.range
        v = d0 + (pos - r0) * (d1 - d0) / (r1 - r0)
        if self.date_domain:
            return _num_date(v)
        return v

    def invert_range(self, lo: float, hi: float):
        """Channel extent -> data predicate operand.

        Linear: inclusive [lo, hi] pair (days snapped inward for dates).
        Band/point: the categories whose centers lie inside the extent.
        """
        if lo > hi:
            lo, hi = hi, lo
        if self.kind == "linear":
            a, b = self.invert(lo), self.invert(hi)
            if isinstance(a, str):
                return [a, b] if a <= b else [b, a]
            return [a, b] if a <= b else [b, a]
        included = []
        for c in self.domain:
            center = self(c) + (self.bandwidth / 2 if self.kind == "band" else 0)
            if lo <= center <= hi:
                included.append(c)
        return included


def _cat(v) -> str:
    return str(v)


def _date_num(iso: str) -> float:
    date_part, _, time_part = iso.partition("T")
    days = float(datetime.date.fromisoformat(date_part).toordinal())
    if time_part:
        hh, mm = time_part[:2], time_part[3:5]
        days += (int(hh) * 60 + int(mm)) / 1440.0
    return days


def _num_date(v: float) -> str:
    return datetime.date.fromordinal(round(v)).isoformat()


def realize_scale(doc: Document, sd: ScaleDef, table_rows: dict[str, list[dict]] | None = None) -> Scale:
    """Realize a scale; data-driven domains read ``table_rows`` when given
    (the live data), falling back to the document's declared rows."""
    domain = sd.domain
    if isinstance(domain, dict):
        table = doc.table(domain["table"])
        if table is None:
            raise OpError(E001_UNRESOLVED_NAME, f"scale {sd.id}: unknown table {domain['table']!r}")
        fieldname = domain["field"]
        if table.field_kind(fieldname) is None:
            raise OpError(E020_UNKNOWN_FIELD, f"scale {sd.id}: unknown field {fieldname!r}")
        rows = table.rows if table_rows is None else table_rows.get(table.name, table.rows)
        values = [r[fieldname] for r in rows]
        if sd.kind == "linear":
            if table.field_kind(fieldname) == "date":
                domain = [min(values), max(values)] if values else ["1970-01-01", "1970-01-02"]
            else:
                domain = [min(values, default=0), max(values, default=1)]
                if domain[0] == domain[1]:
                    domain = [domain[0], domain[0] + 1]
        else:
            seen: list = []
            for v in values:  # first-appearance order keeps expansion deterministic
                if v not in seen:
                    seen.append(v)
            domain = seen
    return Scale(id=sd.id, kind=sd.kind, domain=list(domain), range=list(sd.range), band_padding=sd.band_padding)


# ---------------------------------------------------------------------------
# Scene graph


@dataclass
class SceneGraph:
    root: VisualObject
    index: dict[str, VisualObject]
    parents: dict[str, str]
    scales: dict[str, Scale]
    doc: Document
    rows: dict[str, list[dict]] = field(default_factory=dict)  # collection id -> active rows
    table_rows: dict[str, list[dict]] = field(default_factory=dict)  # live data per table

    def refresh_scales(self, table: str) -> None:
        """Re-realize data-driven scale domains after the table's data changed."""
        for sd in self.doc.scales:
            if isinstance(sd.domain, dict) and sd.domain.get("table") == table:
                self.scales[sd.id] = realize_scale(self.doc, sd, self.table_rows)

    def get(self, oid: str) -> VisualObject:
        try:
            return self.index[oid]
        except KeyError:
            raise OpError(E001_UNRESOLVED_NAME, f"unknown object {oid!r}") from None

    def walk(self, start: str | None = None) -> Iterator[VisualObject]:
        """Preorder document-order traversal (= paint order)."""
        obj = self.root if start is None else self.get(start)
        yield obj
        for cid in obj.children:
            yield from self.walk(cid)

    def parent(self, oid: str) -> VisualObject | None:
        pid = self.parents.get(oid)
        return self.index.get(pid) if pid else None

    def scene_of(self, oid: str) -> VisualObject | None:
        cur: VisualObject | None = self.index.get(oid)
        while cur is not None:
            if cur.kind == "scene":
                return cur
            cur = self.parent(cur.id)
        return None

    def origin(self, oid: str) -> tuple[float, float]:
        """Accumulated (x, y) offset of ancestors inside the scene."""
        ox = oy = 0.0
        cur = self.parent(oid)
        while cur is not None and cur.kind not in ("scene", "section"):
            ox += cur.channels.x
            oy += cur.channels.y
            cur = self.parent(cur.id)
        return ox, oy

    def members(self, collection_id: str) -> list[VisualObject]:
        return [self.get(c) for c in self.get(collection_id).children]


def _row_key(table: DataTable, decl: ObjectDecl, row: dict) -> str:
    keyf = decl.key or table.key_field
    return str(row[keyf])


def _active_rows(doc: Document, scene: SceneSpec, decl: ObjectDecl, outer_datum: dict | None) -> list[dict]:
    table = doc.table(decl.source_table)
    if table is None:
        raise OpError(E001_UNRESOLVED_NAME, f"collection {decl.name!r}: unknown table {decl.source_table!r}")
    rows = list(table.rows)
    init = scene.initial_data
    if init is not None and init.table == table.name and init.where is not None:
        rows = [r for r in rows if predicate_matches(init.where, _row_resolver(r))]
    if outer_datum is not None:
        # nested collection: keep rows matching the outer row on shared group fields
        shared = [f for f in outer_datum if table.field_kind(f) is not None]
        group = shared[0] if shared else None
        if group is not None:
            rows = [r for r in rows if r[group] == outer_datum[group]]
    return rows


def _row_resolver(row: dict):
    from .model import _MISSING

    return lambda v: row.get(v, _MISSING)


class _Builder:
    def __init__(self, doc: Document):
        self.doc = doc
        self.index: dict[str, VisualObject] = {}
        self.parents: dict[str, str] = {}

    def add(self, obj: VisualObject, parent: str | None) -> VisualObject:
        if obj.id in self.index:
            raise OpError(E001_UNRESOLVED_NAME, f"duplicate object id {obj.id!r}")
        self.index[obj.id] = obj
        if parent is not None:
            self.parents[obj.id] = parent
            self.index[parent].children.append(obj.id)
        return obj

    def expand(self, decl: ObjectDecl, oid: str, parent: str | None, scene: SceneSpec,
               datum: dict | None, row_key: str | None, rows_out: dict) -> VisualObject:
        ch = ChannelSet()
        for k, v in decl.channels.items():
            ch.set(k, v, decl.mark_shape)
        obj = VisualObject(
            id=oid, kind=decl.kind, decl_name=decl.name or decl.kind, mark_shape=decl.mark_shape,
            channels=ch, datum=datum, source_table=decl.source_table, row_key=row_key,
            label=decl.label, label_plural=decl.label_plural,
        )
        self.add(obj, parent)
        if decl.kind == "collection":
            rows = _active_rows(self.doc, scene, decl, datum)
            rows_out[oid] = rows
            table = self.doc.table(decl.source_table)
            for row in rows:
                key = _row_key(table, decl, row)
                self.expand(decl.template, f"{oid}/{key}", oid, scene, dict(row), key, rows_out)
        for j, child in enumerate(decl.children):
            cid = f"{oid}/{child.name or j}"
            self.expand(child, cid, oid, scene, datum, row_key, rows_out)
        return obj


def build_scene_graph(doc: Document) -> SceneGraph:
    """Expand a validated Document into its scene graph.

    Collections get one child per active row, in row order; identical
    documents always expand to identical graphs.
    """
    b = _Builder(doc)
    root = VisualObject(id="/root", kind="section", decl_name="/root")
    b.add(root, None)
    rows: dict[str, list[dict]] = {}
    scales = {sd.id: realize_scale(doc, sd) for sd in doc.scales}
    for spec in doc.scenes:
        scene_obj = VisualObject(
            id=spec.name, kind="scene", decl_name=spec.name,
            channels=ChannelSet(x=spec.x, y=spec.y, width=spec.width, height=spec.height),
        )
        b.add(scene_obj, "/root")
        for decl in spec.objects:
            b.expand(decl, decl.name, spec.name, spec, None, None, rows)
    table_rows = {t.name: [dict(r) for r in t.rows] for t in doc.data}
    graph = SceneGraph(root=root, index=b.index, parents=b.parents, scales=scales, doc=doc,
                       rows=rows, table_rows=table_rows)
    apply_encodings(graph)
    return graph


def _encoding_targets(graph: SceneGraph, enc: EncodingDecl) -> list[VisualObject]:
    """Instances the encoding applies to: direct members of the target
    collection, or any expanded object declared under the target name
    (named glyph parts, single marks). All carry a datum."""
    out = []
    for obj in graph.walk():
        if obj.datum is None:
            continue
        parent = graph.parent(obj.id)
        if parent is not None and parent.kind == "collection" and parent.decl_name == enc.target:
            out.append(obj)
        elif obj.decl_name == enc.target and obj.kind != "collection":
            out.append(obj)
    return out


def apply_encodings(graph: SceneGraph, encodings: list[EncodingDecl] | None = None,
                    scales: dict[str, Scale] | None = None) -> list[ChannelDiff]:
    """Set each encoded child's channel to scale(field value). Returns the
    actual changes; re-applying with nothing changed returns []."""
    scales = scales or graph.scales
    if encodings is None:
        encodings = [e for sc in graph.doc.scenes for e in sc.encodings]
    diffs: list[ChannelDiff] = []
    for enc in encodings:
        scale = scales.get(enc.scale)
        if scale is None:
            raise OpError(E001_UNRESOLVED_NAME, f"encoding {enc.id}: unknown scale {enc.scale!r}")
        for obj in _encoding_targets(graph, enc):
            if enc.field not in (obj.datum or {}):
                raise OpError(E020_UNKNOWN_FIELD, f"encoding {enc.id}: field {enc.field!r} missing on {obj.id}")
            new = scale(obj.datum[enc.field])
            old = obj.channels.get(enc.channel)
            if old != new:
                obj.channels.set(enc.channel, new, obj.mark_shape)
                diffs.append((obj.id, enc.channel, old, new))
    return diffs


@dataclass
class StructuralDiff:
    added: list[str] = field(default_factory=list)
    removed: list[str] = field(default_factory=list)


def _collection_decl(graph: SceneGraph, cid: str) -> tuple[SceneSpec, ObjectDecl]:
    """Declaration behind a collection instance, nested templates included."""
    obj = graph.get(cid)
    base = cid.split("/")[0] if "/" in cid else cid
    hit = graph.doc.object_decl(base)
    if hit is None:
        raise OpError(E001_UNRESOLVED_NAME, f"unknown collection {cid!r}")
    scene, decl = hit
    if obj.decl_name != (decl.name or decl.kind):
        for d in _walk_decls_local(decl):
            if d.kind == "collection" and (d.name or d.kind) == obj.decl_name:
                decl = d
                break
    if decl.kind != "collection":
        raise OpError(E023_SCHEMA_MISMATCH, f"{cid!r} is not a collection")
    return scene, decl


def _walk_decls_local(decl: ObjectDecl):
    yield decl
    if decl.template is not None:
        yield from _walk_decls_local(decl.template)
    for c in decl.children:
        yield from _walk_decls_local(c)


def update_object_data(graph: SceneGraph, target_id: str, new_rows: list[dict]) -> tuple[StructuralDiff, list[ChannelDiff]]:
    """Re-expand a collection against new rows, keyed by the stable row key.

    Surviving children keep their objects (datum replaced, encodings
    re-applied); the diff lists objects entered/exited and channels changed.
    """
    obj = graph.get(target_id)
    if obj.kind == "scene":
        raise OpError(E023_SCHEMA_MISMATCH, "scene-level updates must name the collection to update")
    if obj.kind != "collection":
        raise OpError(E023_SCHEMA_MISMATCH, f"{target_id!r} is not a collection or scene")
    scene_spec, decl = _collection_decl(graph, target_id)
    table = graph.doc.table(obj.source_table)
    fieldnames = {f for f, _ in table.fields}
    for r in new_rows:
        if set(r.keys()) != fieldnames:
            raise OpError(E023_SCHEMA_MISMATCH, f"row {r!r} does not match schema of {table.name!r}")

    old_keys = {graph.get(c).row_key: c for c in obj.children}
    new_keys = [_row_key(table, decl, r) for r in new_rows]
    if len(set(new_keys)) != len(new_keys):
        raise OpError(E023_SCHEMA_MISMATCH, f"duplicate row keys in update of {target_id!r}")

    structural = StructuralDiff()
    b = _Builder(graph.doc)
    b.index = graph.index
    b.parents = graph.parents

    # exit
    new_key_set = set(new_keys)
    for key, cid in old_keys.items():
        if key not in new_key_set:
            _remove_subtree(graph, cid)
            structural.removed.append(cid)
    # enter + reorder + rebind
    obj.children = []
    for row, key in zip(new_rows, new_keys):
        cid = f"{target_id}/{key}"
        if key in old_keys:
            child = graph.index[cid]
            obj.children.append(cid)
            _rebind(graph, child, decl.template, dict(row), scene_spec, structural)
        else:
            b.expand(decl.template, cid, None, scene_spec, dict(row), key, graph.rows)
            graph.parents[cid] = target_id
            obj.children.append(cid)
            structural.added.append(cid)
    graph.rows[target_id] = [dict(r) for r in new_rows]

    encodings = [e for sc in graph.doc.scenes for e in sc.encodings]
    diffs = apply_encodings(graph, encodings)
    # report channel changes of surviving objects only; new objects carry
    # their full state in the structural diff
    added = set()
    for a in structural.added:
        for o in graph.walk(a):
            added.add(o.id)
    diffs = [d for d in diffs if d[0] not in added]
    return structural, diffs


def _rebind(graph: SceneGraph, obj: VisualObject, decl: ObjectDecl, row: dict,
            scene_spec: SceneSpec, structural: StructuralDiff) -> None:
    obj.datum = row
    if obj.kind == "collection":
        # nested collections re-expand against the new group row
        rows = _active_rows(graph.doc, scene_spec, decl, row)
        table = graph.doc.table(decl.source_table)
        inner_keys = {graph.get(c).row_key: c for c in obj.children}
        b = _Builder(graph.doc)
        b.index = graph.index
        b.parents = graph.parents
        obj.children = []
        fresh = {_row_key(table, decl, r) for r in rows}
        for key, cid in inner_keys.items():
            if key not in fresh:
                _remove_subtree(graph, cid)
                structural.removed.append(cid)
        for r in rows:
            key = _row_key(table, decl, r)
            cid = f"{obj.id}/{key}"
            if key in inner_keys:
                obj.children.append(cid)
                _rebind(graph, graph.get(cid), decl.template, dict(r), scene_spec, structural)
            else:
                b.expand(decl.template, cid, None, scene_spec, dict(r), key, graph.rows)
                graph.parents[cid] = obj.id
                obj.children.append(cid)
                structural.added.append(cid)
        graph.rows[obj.id] = [dict(r) for r in rows]
        return
    for j, cid in enumerate(obj.children):
        child_decl = decl.children[j] if j < len(decl.children) else decl
        _rebind(graph, graph.get(cid), child_decl, row, scene_spec, structural)


def _remove_subtree(graph: SceneGraph, oid: str) -> None:
    obj = graph.index.get(oid)
    if obj is None:
        return
    for cid in list(obj.children):
        _remove_subtree(graph, cid)
    parent = graph.parents.pop(oid, None)
    if parent and oid in graph.index[parent].children:
        graph.index[parent].children.remove(oid)
    graph.rows.pop(oid, None)
    del graph.index[oid]


def query_objects(graph: SceneGraph, selector) -> list[str]:
    """Resolve a selector to object ids in document order.

    Accepts a model.Selector or a raw selector value. ``names`` match ids or
    declaration names; ``collection`` selects the members of a collection;
    ``scene`` the scene object; ``object_kind`` every object of that kind.
    """
    from .model import Selector

    if not isinstance(selector, Selector):
        selector = Selector.from_raw(selector)
    out: list[str] = []
    if selector.kind == "names":
        known = set(graph.index) | {o.decl_name for o in graph.index.values()}
        for nm in selector.value:
            if nm not in known:
                raise OpError(E001_UNRESOLVED_NAME, f"selector does not resolve: {nm!r}")
        wanted = set(selector.value)
        for obj in graph.walk():
            if obj.id in wanted or obj.decl_name in wanted:
                out.append(obj.id)
    elif selector.kind == "collection":
        coll = graph.get(selector.value)
        out = list(coll.children)
    elif selector.kind == "scene":
        out = [graph.get(selector.value).id]
    elif selector.kind == "object_kind":
        out = [o.id for o in graph.walk() if o.kind == selector.value]
    return out


# ---------------------------------------------------------------------------
# SVG element mapping (rect -> <rect>, circle -> <circle>, line/path/arc ->
# <path>, text -> <text>). Channel-to-attribute names are fixed.


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def svg_element(graph: SceneGraph, obj: VisualObject) -> str | None:
    """Markup for one mark-like object, positioned in scene coordinates."""
    ox, oy = graph.origin(obj.id)
    ch = obj.channels
    style = (
        f'fill="{ch.fill}" stroke="{ch.stroke}" stroke-width="{_fmt(ch.strokeWidth)}" '
        f'opacity="{_fmt(ch.opacity)}"'
    )
    hidden = ' display="none"' if not ch.visible else ""
    ident = f'id="{obj.id}"'
    x, y = ox + ch.x, oy + ch.y
    if obj.mark_shape == "rect":
        return (f'<rect {ident} x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(ch.width)}" '
                f'height="{_fmt(ch.height)}" {style}{hidden}/>')
    if obj.mark_shape == "circle":
        return f'<circle {ident} cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(ch.radius)}" {style}{hidden}/>'
    if obj.mark_shape in ("line", "path"):
        return (f'<path {ident} d="M {_fmt(x)} {_fmt(y)} L {_fmt(x + ch.width)} {_fmt(y + ch.height)}" '
                f'{style}{hidden}/>')
    if obj.mark_shape == "arc":
        return f'<path {ident} d="{_arc_path(x, y, ch)}" {style}{hidden}/>'
    if obj.mark_shape == "text":
        return f'<text {ident} x="{_fmt(x)}" y="{_fmt(y)}" {style}{hidden}>{_esc(ch.text)}</text>'
    if obj.mark_shape == "image":
        return (f'<rect {ident} x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(ch.width)}" '
                f'height="{_fmt(ch.height)}" {style}{hidden}/>')
    return None


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _arc_path(cx: float, cy: float, ch: ChannelSet) -> str:
    import math

    a0, a1 = ch.startAngle, ch.endAngle
    r, ri = ch.radius, ch.innerRadius
    large = "1" if (a1 - a0) % (2 * math.pi) > math.pi else "0"

    def pt(r_: float, a: float) -> str:
        return f"{_fmt(cx + r_ * math.cos(a))} {_fmt(cy + r_ * math.sin(a))}"

    outer = f"M {pt(r, a0)} A {_fmt(r)} {_fmt(r)} 0 {large} 1 {pt(r, a1)}"
    if ri <= 0:
        return f"{outer} L {_fmt(cx)} {_fmt(cy)} Z"
    return (f"{outer} L {pt(ri, a1)} A {_fmt(ri)} {_fmt(ri)} 0 {large} 0 {pt(ri, a0)} Z")


def axis_markup(graph: SceneGraph, obj: VisualObject) -> str:
    """Declarative axis/legend: ticks from the bound scale (5 for linear,
    one per category otherwise)."""
    decl = graph.doc.object_decl(obj.decl_name)
    scale = graph.scales.get(decl[1].scale) if decl else None
    scene = graph.scene_of(obj.id)
    if scale is None or scene is None:
        return f'<g id="{obj.id}"/>'
    orient = (decl[1].orient or ("left" if obj.kind == "legend" else "bottom"))
    if scale.kind == "linear":
        d0, d1 = scale._num_domain()
        raw = [d0 + i * (d1 - d0) / 4 for i in range(5)]
        ticks = [(_num_date(v) if scale.date_domain else v, scale(_num_date(v)) if scale.date_domain else scale(v)) for v in raw]
    else:
        ticks = [(c, scale(c) + (scale.bandwidth / 2 if scale.kind == "band" else 0)) for c in scale.domain]
    parts = [f'<g id="{obj.id}" class="axis">']
    h, w = scene.channels.height, scene.channels.width
    base = obj.channels.y if orient == "bottom" else obj.channels.x
    if orient == "bottom":
        y = base or h - 30
        lo, hi = scale.range[0], scale.range[1]
        parts.append(f'<path d="M {_fmt(min(lo, hi))} {_fmt(y)} L {_fmt(max(lo, hi))} {_fmt(y)}" stroke="#333" fill="none" stroke-width="1.000" opacity="1.000"/>')
        for label, pos in ticks:
            parts.append(f'<text x="{_fmt(pos)}" y="{_fmt(y + 14)}" fill="#333" stroke="none" stroke-width="1.000" opacity="1.000">{_esc(_tick(label))}</text>')
    else:
        x = base or 30
        lo, hi = scale.range[0], scale.range[1]
        parts.append(f'<path d="M {_fmt(x)} {_fmt(min(lo, hi))} L {_fmt(x)} {_fmt(max(lo, hi))}" stroke="#333" fill="none" stroke-width="1.000" opacity="1.000"/>')
        for label, pos in ticks:
            parts.append(f'<text x="{_fmt(x - 6)}" y="{_fmt(pos)}" fill="#333" stroke="none" stroke-width="1.000" opacity="1.000">{_esc(_tick(label))}</text>')
    parts.append("</g>")
    return "".join(parts)


def _tick(v) -> str:
    if isinstance(v, float):
        return _fmt(v) if not v.is_integer() else str(int(v))
    return str(v)
