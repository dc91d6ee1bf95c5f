/** Inspector view models: one interaction unit seen at each of the three
 * authoring abstraction levels. */

import { InspectReport, SignatureTermView, TraceEntry } from "./protocol.js";

export interface IntentView {
  level: "intent";
  unit: string;
  userIntents: string[];
  authoringIntents: string[];
}

export interface TechniqueView {
  level: "technique";
  unit: string;
  technique: string;
  terms: SignatureTermView[];
}

export interface ComponentNode {
  role: string; // state variable | rule
  label: string;
  value: unknown;
}

export interface ComponentView {
  level: "component";
  unit: string;
  nodes: ComponentNode[];
}

export type InspectorView = IntentView | TechniqueView | ComponentView;

export function intentView(report: InspectReport): IntentView {
  return {
    level: "intent",
    unit: report.unit,
    userIntents: report.userIntents,
    authoringIntents: report.authoringIntents,
  };
}

export function techniqueView(report: InspectReport): TechniqueView {
  return {
    level: "technique",
    unit: report.unit,
    technique: report.technique,
    terms: report.signature,
  };
}

/** Component level: the graph's parts with live state-variable values taken
 * from the latest trace entry when it touched them. */
export function componentView(report: InspectReport, latest: TraceEntry | null): ComponentView {
  const liveValues = new Map<string, unknown>();
  if (latest) {
    for (const [name, , next] of latest.state) liveValues.set(name, next);
  }
  const nodes: ComponentNode[] = [];
  const vars = (report.graph.stateVariables as Record<string, unknown>[] | undefined) ?? [];
  for (const v of vars) {
    const name = String(v.name);
    const reported = report.variables[name];
    const operand =
      typeof reported === "object" && reported !== null && "operand" in reported
        ? (reported as { operand: unknown }).operand
        : reported;
    nodes.push({
      role: `state variable (${String(v.kind ?? "scalar")})`,
      label: name,
      value: liveValues.has(name) ? liveValues.get(name) : operand,
    });
  }
  const rules = (report.graph.rules as Record<string, unknown>[] | undefined) ?? [];
  for (const rule of rules) {
    nodes.push({ role: "rule", label: String(rule.rule), value: rule });
  }
  return { level: "component", unit: report.unit, nodes };
}

export function viewFor(
  report: InspectReport,
  level: "intent" | "technique" | "component",
  latest: TraceEntry | null,
): InspectorView {
  if (level === "intent") return intentView(report);
  if (level === "technique") return techniqueView(report);
  return componentView(report, latest);
}
