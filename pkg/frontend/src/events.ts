/** Translate native browser input into protocol event records.
 * Coordinates arrive in the scene viewport's CSS space and pass through
 * unchanged; events outside the viewport are dropped. */

import { EventRecord } from "./protocol.js";

export interface Viewport {
  left: number;
  top: number;
  width: number;
  height: number;
}

interface PointerLike {
  clientX: number;
  clientY: number;
}

interface WheelLike extends PointerLike {
  deltaY: number;
}

interface KeyLike {
  key: string;
}

type Stamp = Omit<EventRecord, "tick">;

function within(vp: Viewport, x: number, y: number): boolean {
  return x >= 0 && y >= 0 && x <= vp.width && y <= vp.height;
}

function canvasPoint(vp: Viewport, e: PointerLike): { x: number; y: number } {
  return { x: e.clientX - vp.left, y: e.clientY - vp.top };
}

export function pointerEvent(
  kind: "pointer_down" | "pointer_up" | "pointer_move" | "click" | "double_click",
  e: PointerLike,
  vp: Viewport,
): Stamp | null {
  const { x, y } = canvasPoint(vp, e);
  if (!within(vp, x, y)) return null;
  return { kind, x, y };
}

export function wheelEvent(e: WheelLike, vp: Viewport): Stamp | null {
  const { x, y } = canvasPoint(vp, e);
  if (!within(vp, x, y)) return null;
  // one wheel notch = |delta| 1, negative means zoom in
  return { kind: "wheel", x, y, delta: Math.sign(e.deltaY) };
}

export function scrollEvent(delta: number): Stamp {
  return { kind: "scroll", delta };
}

export function keyEvent(kind: "key_down" | "key_up", e: KeyLike): Stamp {
  return { kind, key: e.key };
}

export function controlChange(control: string, value: unknown): Stamp {
  return { kind: "ui_change", control, value };
}
