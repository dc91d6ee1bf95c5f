import { describe, expect, it } from "vitest";

import { viewFor } from "../src/inspector.js";
import { InspectReport, TraceEntry } from "../src/protocol.js";

const REPORT: InspectReport = {
  unit: "highlight",
  technique: "point_select",
  userIntents: ["select"],
  authoringIntents: ["AI1"],
  provenance: "technique",
  classification: {},
  signature: [
    { term: "hit_object | predicate", kind: "one_of", satisfied: true },
    { term: "evaluator", kind: "required", satisfied: true },
    { term: "evaluation_scale", kind: "required", satisfied: true },
  ],
  variables: { sel: { variable: "country", op: "eq", operand: "USA" } },
  graph: {
    stateVariables: [{ name: "sel", kind: "predicate" }],
    rules: [{ rule: "set_var" }, { rule: "run_evaluator" }, { rule: "apply_scale" }],
  },
  lastEntry: null,
};

const ENTRY: TraceEntry = {
  tick: 3, matched: ["highlight"], hit: "bars/USA",
  channels: [], state: [["sel", null, "Canada"]], data: [], camera: [], errors: [],
};

describe("inspector levels", () => {
  it("intent level shows the intent badges", () => {
    const view = viewFor(REPORT, "intent", null);
    expect(view).toEqual({
      level: "intent", unit: "highlight",
      userIntents: ["select"], authoringIntents: ["AI1"],
    });
  });

  it("technique level shows signature chips", () => {
    const view = viewFor(REPORT, "technique", null);
    expect(view.level).toBe("technique");
    if (view.level !== "technique") return;
    expect(view.terms.map((t) => t.term)).toEqual([
      "hit_object | predicate", "evaluator", "evaluation_scale",
    ]);
    expect(view.terms.every((t) => t.satisfied)).toBe(true);
  });

  it("component level lists graph parts with live values", () => {
    const view = viewFor(REPORT, "component", ENTRY);
    expect(view.level).toBe("component");
    if (view.level !== "component") return;
    const sel = view.nodes.find((n) => n.label === "sel");
    expect(sel?.value).toBe("Canada"); // latest trace entry wins
    expect(view.nodes.filter((n) => n.role === "rule")).toHaveLength(3);
  });

  it("component level falls back to reported operand", () => {
    const view = viewFor(REPORT, "component", null);
    if (view.level !== "component") return;
    const sel = view.nodes.find((n) => n.label === "sel");
    expect(sel?.value).toBe("USA");
  });
});
