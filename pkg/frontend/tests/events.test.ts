import { describe, expect, it } from "vitest";

import { controlChange, keyEvent, pointerEvent, wheelEvent } from "../src/events.js";
import { controlsOf } from "../src/controls.js";

const VP = { left: 40, top: 10, width: 400, height: 300 };

describe("event forwarding", () => {
  it("passes canvas coordinates through", () => {
    const stamp = pointerEvent("click", { clientX: 160, clientY: 50 }, VP);
    expect(stamp).toEqual({ kind: "click", x: 120, y: 40 });
  });

  it("drops events outside the viewport", () => {
    expect(pointerEvent("click", { clientX: 10, clientY: 10 }, VP)).toBeNull();
    expect(pointerEvent("pointer_move", { clientX: 500, clientY: 50 }, VP)).toBeNull();
  });

  it("normalizes wheel notches to unit deltas", () => {
    const stamp = wheelEvent({ clientX: 140, clientY: 60, deltaY: -120 }, VP);
    expect(stamp).toEqual({ kind: "wheel", x: 100, y: 50, delta: -1 });
  });

  it("builds ui_change records for widget interactions", () => {
    expect(controlChange("baseMenu", "CHF")).toEqual({
      kind: "ui_change", control: "baseMenu", value: "CHF",
    });
  });

  it("keyboard events keep their key", () => {
    expect(keyEvent("key_down", { key: "Escape" })).toEqual({ kind: "key_down", key: "Escape" });
  });
});

describe("control widget generation", () => {
  it("collects declared controls across scenes", () => {
    const doc = JSON.stringify({
      scenes: [
        { name: "a", controls: [{ name: "m", kind: "dropdown", options: ["x", "y"] }] },
        { name: "b", controls: [{ name: "s", kind: "slider", domain: [0, 10] }] },
      ],
    });
    const specs = controlsOf(doc);
    expect(specs.map((s) => s.name)).toEqual(["m", "s"]);
    expect(specs[1]?.domain).toEqual([0, 10]);
  });

  it("tolerates malformed documents", () => {
    expect(controlsOf("{nope")).toEqual([]);
    expect(controlsOf("{}")).toEqual([]);
  });
});
