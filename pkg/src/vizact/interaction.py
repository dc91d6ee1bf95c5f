"""Observable and internal interaction components: events, listeners, hit
testing, cameras, state variables, target evaluators and evaluation scales.

Everything here is pure; the runtime owns all mutation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

from .model import (
    E030_UNRESOLVED_VARIABLE,
    E031_ANCHOR_NOT_IN_TARGETS,
    E032_KIND_MISMATCH,
    E033_BAD_ZOOM_FACTOR,
    OpError,
    Predicate,
    _MISSING,
    predicate_matches,
)
from .scene import ChannelDiff, ChannelSet, SceneGraph, VisualObject, check_channel_value

MIN_ZOOM = 0.1
MAX_ZOOM = 40.0
LINE_HIT_TOLERANCE = 3.0  # px, distance-to-segment for line/path marks


@dataclass(frozen=True)
class Event:
    """One scripted or live input event. Ticks increase strictly."""

    tick: int
    kind: str
    x: float | None = None
    y: float | None = None
    dx: float | None = None
    dy: float | None = None
    delta: float | None = None
    key: str | None = None
    control: str | None = None
    value: Any = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"tick": self.tick, "kind": self.kind}
        for k in ("x", "y", "dx", "dy", "delta", "key", "control", "value"):
            v = getattr(self, k)
            if v is not None:
                d[k] = v
        return d

    @staticmethod
    def from_dict(raw: dict) -> Event:
        return Event(
            tick=raw["tick"], kind=raw["kind"],
            x=raw.get("x"), y=raw.get("y"), dx=raw.get("dx"), dy=raw.get("dy"),
            delta=raw.get("delta"), key=raw.get("key"),
            control=raw.get("control"), value=raw.get("value"),
        )


@dataclass
class Listener:
    name: str
    kind: str  # canvas | button | dropdown | slider | checkbox | tab | breadcrumb | scroller
    bound_scene: str | None = None
    options: list = field(default_factory=list)
    domain: list | None = None
    label: str | None = None
    value_label: str | None = None


@dataclass(frozen=True)
class HitObject:
    object_id: str
    local_x: float  # world coordinates
    local_y: float


@dataclass(frozen=True)
class Camera:
    """Per-scene vantage point; the derived view box is
    (focus - viewport/(2 zoom), viewport/zoom)."""

    focus_x: float
    focus_y: float
    zoom: float = 1.0
    rotation: float = 0.0
    viewport_w: float = 400.0
    viewport_h: float = 300.0

    def view_box(self) -> tuple[float, float, float, float]:
        return (
            self.focus_x - self.viewport_w / (2 * self.zoom),
            self.focus_y - self.viewport_h / (2 * self.zoom),
            self.viewport_w / self.zoom,
            self.viewport_h / self.zoom,
        )

    def to_world(self, sx: float, sy: float) -> tuple[float, float]:
        dx = (sx - self.viewport_w / 2) / self.zoom
        dy = (sy - self.viewport_h / 2) / self.zoom
        if self.rotation:
            c, s = math.cos(-self.rotation), math.sin(-self.rotation)
            dx, dy = dx * c - dy * s, dx * s + dy * c
        return (self.focus_x + dx, self.focus_y + dy)

    def to_screen(self, wx: float, wy: float) -> tuple[float, float]:
        dx, dy = wx - self.focus_x, wy - self.focus_y
        if self.rotation:
            c, s = math.cos(self.rotation), math.sin(self.rotation)
            dx, dy = dx * c - dy * s, dx * s + dy * c
        return (dx * self.zoom + self.viewport_w / 2, dy * self.zoom + self.viewport_h / 2)


def default_camera(width: float, height: float) -> Camera:
    return Camera(focus_x=width / 2, focus_y=height / 2, viewport_w=width, viewport_h=height)


def camera_pan(c: Camera, dx: float, dy: float) -> Camera:
    """Shift the focus point by a screen-space drag; zoom and rotation stay."""
    wx, wy = dx / c.zoom, dy / c.zoom
    if c.rotation:
        co, s = math.cos(-c.rotation), math.sin(-c.rotation)
        wx, wy = wx * co - wy * s, wx * s + wy * co
    return replace(c, focus_x=c.focus_x - wx, focus_y=c.focus_y - wy)


def camera_zoom(c: Camera, factor: float, anchor_x: float, anchor_y: float) -> Camera:
    """Zoom about a screen anchor: the world point under the anchor stays put."""
    if factor <= 0:
        raise OpError(E033_BAD_ZOOM_FACTOR, f"zoom factor must be positive, got {factor!r}")
    new_zoom = min(MAX_ZOOM, max(MIN_ZOOM, c.zoom * factor))
    wx, wy = c.to_world(anchor_x, anchor_y)
    moved = replace(c, zoom=new_zoom)
    ax, ay = moved.to_world(anchor_x, anchor_y)
    return replace(moved, focus_x=moved.focus_x + (wx - ax), focus_y=moved.focus_y + (wy - ay))


# ---------------------------------------------------------------------------
# State variables


@dataclass
class StateVariable:
    """Named state: a predicate, a field reference, a component reference,
    or a plain scalar."""

    name: str
    kind: str  # predicate | field_reference | component_reference | scalar
    value: Any = None  # Predicate for predicate kind; payload otherwise
    label: str | None = None  # display role, e.g. "logical operator"

    def snapshot(self):
        if self.kind == "predicate" and isinstance(self.value, Predicate):
            return self.value.to_dict()
        return self.value


# ---------------------------------------------------------------------------
# Hit testing


def _contains(graph: SceneGraph, obj: VisualObject, wx: float, wy: float) -> bool:
    ox, oy = graph.origin(obj.id)
    ch = obj.channels
    x, y = ox + ch.x, oy + ch.y
    shape = obj.mark_shape
    if shape == "rect" or shape == "image":
        return x <= wx <= x + ch.width and y <= wy <= y + ch.height
    if shape == "circle":
        return (wx - x) ** 2 + (wy - y) ** 2 <= ch.radius ** 2
    if shape in ("line", "path"):
        return _seg_dist(wx, wy, x, y, x + ch.width, y + ch.height) <= LINE_HIT_TOLERANCE
    if shape == "arc":
        dx, dy = wx - x, wy - y
        r = math.hypot(dx, dy)
        if not (ch.innerRadius <= r <= ch.radius):
            return False
        ang = math.atan2(dy, dx) % (2 * math.pi)
        a0 = ch.startAngle % (2 * math.pi)
        span = ch.endAngle - ch.startAngle
        if span >= 2 * math.pi:
            return True
        rel = (ang - a0) % (2 * math.pi)
        return rel <= span
    if shape == "text":
        w = ch.width or 8.0 * max(1, len(ch.text))
        h = ch.height or 14.0
        return x <= wx <= x + w and y - h <= wy <= y
    return False


def _seg_dist(px: float, py: float, x0: float, y0: float, x1: float, y1: float) -> float:
    vx, vy = x1 - x0, y1 - y0
    l2 = vx * vx + vy * vy
    if l2 == 0:
        return math.hypot(px - x0, py - y0)
    t = max(0.0, min(1.0, ((px - x0) * vx + (py - y0) * vy) / l2))
    return math.hypot(px - (x0 + t * vx), py - (y0 + t * vy))


def hit_test(graph: SceneGraph, camera: Camera, x: float, y: float,
             scene_id: str | None = None) -> HitObject | None:
    """Top-most mark or glyph under a screen point, or None for background.

    The point is inverse-transformed through the camera; overlaps resolve to
    the later-painted object. A mark inside a glyph reports the glyph.
    """
    wx, wy = camera.to_world(x, y)
    order = list(graph.walk(scene_id) if scene_id else graph.walk())
    for obj in reversed(order):
        if obj.kind != "mark" or not obj.visible:
            continue
        parent = graph.parent(obj.id)
        if parent is not None and not parent.visible:
            continue
        if _contains(graph, obj, wx, wy):
            if parent is not None and parent.kind == "glyph":
                return HitObject(parent.id, wx, wy)
            return HitObject(obj.id, wx, wy)
    return None


# ---------------------------------------------------------------------------
# Predicates over objects


def _subject_resolver(obj: VisualObject):
    def resolve(variable: str):
        if variable.startswith("@"):
            ch = variable[1:]
            if not hasattr(obj.channels, ch):
                return _MISSING
            return obj.channels.get(ch)
        if obj.datum is None or variable not in obj.datum:
            return _MISSING
        return obj.datum[variable]

    return resolve


def eval_predicate(p: Predicate, subject) -> bool:
    """TRUE/FALSE for one subject: a row dict, a ChannelSet, or a
    VisualObject (fields from its datum, ``@name`` from its channels)."""
    if isinstance(subject, VisualObject):
        return predicate_matches(p, _subject_resolver(subject))
    if isinstance(subject, ChannelSet):
        return predicate_matches(
            p, lambda v: subject.get(v[1:]) if v.startswith("@") and hasattr(subject, v[1:]) else _MISSING
        )
    if isinstance(subject, dict):
        return predicate_matches(p, lambda v: subject.get(v, _MISSING))
    raise OpError(E030_UNRESOLVED_VARIABLE, f"cannot evaluate predicate on {type(subject).__name__}")


# ---------------------------------------------------------------------------
# Target evaluators


@dataclass
class TargetEvaluator:
    """A function over a target list: booleans (predicate), a permutation
    (order), numbers (distance), or positions (layout)."""

    kind: str  # predicate | order | distance | layout
    predicate: str | Predicate | None = None  # predicate kind: state variable name or literal
    field_ref: str | None = None  # order kind: field or state variable holding one
    direction: str = "asc"
    metric: str = "index"  # distance kind: index | euclidean
    anchor: Any = None  # hit object id, object id, or (x, y) point
    layout_policy: str | None = None  # layout kind: grid_swap | magnet_attraction


def evaluate_targets(targets: list[VisualObject], pred) -> list[bool]:
    """result[i] = eval_predicate(p, targets[i]); length preserved. Accepts a
    Predicate or a predicate-kind TargetEvaluator."""
    if isinstance(pred, TargetEvaluator):
        pred = pred.predicate
    if not isinstance(pred, Predicate):
        raise OpError(E030_UNRESOLVED_VARIABLE, f"no literal predicate to evaluate: {pred!r}")
    return [eval_predicate(pred, t) for t in targets]


def order_targets(targets: list[VisualObject], by, direction: str = "asc") -> list[int]:
    """Stable sort by a datum field; returns a permutation of target indices.
    Ties keep their original relative order in either direction. Accepts a
    field name or an order-kind TargetEvaluator."""
    if isinstance(by, TargetEvaluator):
        direction = by.direction
        by = by.field_ref
    field_name = by

    def sort_key(i: int):
        t = targets[i]
        if t.datum is None or field_name not in t.datum:
            raise OpError(E030_UNRESOLVED_VARIABLE, f"field {field_name!r} does not resolve on {t.id}")
        return t.datum[field_name]

    return sorted(range(len(targets)), key=sort_key, reverse=(direction == "desc"))


def _center(graph: SceneGraph, obj: VisualObject) -> tuple[float, float]:
    ox, oy = graph.origin(obj.id)
    ch = obj.channels
    if obj.mark_shape in ("circle", "arc"):
        return (ox + ch.x, oy + ch.y)
    return (ox + ch.x + ch.width / 2, oy + ch.y + ch.height / 2)


def distance_targets(graph: SceneGraph, targets: list[VisualObject], metric: str,
                     anchor) -> list[float]:
    """index: |i - i_anchor| per target; euclidean: world-space distance of
    centers to the anchor object or point."""
    if metric == "index":
        ids = [t.id for t in targets]
        anchor_id = anchor.object_id if isinstance(anchor, HitObject) else anchor
        if anchor_id not in ids:
            raise OpError(E031_ANCHOR_NOT_IN_TARGETS, f"anchor {anchor_id!r} not among targets")
        ai = ids.index(anchor_id)
        return [float(abs(i - ai)) for i in range(len(targets))]
    if isinstance(anchor, HitObject):
        ax, ay = _center(graph, graph.get(anchor.object_id))
    elif isinstance(anchor, (tuple, list)):
        ax, ay = anchor
    else:
        ax, ay = _center(graph, graph.get(anchor))
    return [math.hypot(cx - ax, cy - ay) for cx, cy in (_center(graph, t) for t in targets)]


# ---------------------------------------------------------------------------
# Evaluation scales


@dataclass
class EvaluationScale:
    """Maps evaluator results (not data values) to channel updates.

    boolean: trueProps/falseProps channel maps. number/rank: clamp to the
    domain, then per-channel linear interpolation or threshold bins.
    Channels absent from the maps stay untouched.
    """

    input_kind: str  # boolean | number | rank
    true_props: dict = field(default_factory=dict)
    false_props: dict = field(default_factory=dict)
    domain: list | None = None  # [lo, hi]
    outputs: dict = field(default_factory=dict)  # channel -> [a, b] | {"bins": [...], "values": [...]}

    def __post_init__(self):
        for props in (self.true_props, self.false_props):
            for chan, val in props.items():
                check_channel_value(chan, val)
        if self.input_kind in ("number", "rank") and self.domain is not None:
            if len(self.domain) != 2 or not self.domain[0] < self.domain[1]:
                raise OpError(E032_KIND_MISMATCH, "number scale domain must be an increasing pair")


def apply_evaluation_scale(results: list, scale: EvaluationScale,
                           targets: list[VisualObject]) -> list[ChannelDiff]:
    """Apply evaluator results to targets; emits only actual changes."""
    if len(results) != len(targets):
        raise OpError(E032_KIND_MISMATCH, "results and targets differ in length")
    diffs: list[ChannelDiff] = []
    if scale.input_kind == "boolean":
        for r, t in zip(results, targets):
            if not isinstance(r, bool):
                raise OpError(E032_KIND_MISMATCH, f"boolean scale got {r!r}")
            props = scale.true_props if r else scale.false_props
            diffs.extend(_apply_props(t, props))
        return diffs
    if scale.input_kind not in ("number", "rank"):
        raise OpError(E032_KIND_MISMATCH, f"unknown evaluation-scale input {scale.input_kind!r}")
    lo, hi = scale.domain if scale.domain else (0.0, max(1.0, float(len(targets) - 1)))
    for r, t in zip(results, targets):
        if isinstance(r, bool) or not isinstance(r, (int, float)):
            raise OpError(E032_KIND_MISMATCH, f"number scale got {r!r}")
        v = min(hi, max(lo, float(r)))
        frac = (v - lo) / (hi - lo)
        for chan, out in scale.outputs.items():
            if isinstance(out, dict):
                new = _bin_value(v, out["bins"], out["values"])
            else:
                a, b = out
                new = a + frac * (b - a)
            old = t.channels.get(chan)
            if old != new:
                t.channels.set(chan, new, t.mark_shape)
                diffs.append((t.id, chan, old, new))
    return diffs


def _apply_props(t: VisualObject, props: dict) -> list[ChannelDiff]:
    diffs = []
    for chan, val in props.items():
        old = t.channels.get(chan)
        if old != val:
            t.channels.set(chan, val, t.mark_shape)
            diffs.append((t.id, chan, old, val))
    return diffs


def _bin_value(v: float, bins: list, values: list):
    for threshold, out in zip(bins, values):
        if v <= threshold:
            return out
    return values[-1]
