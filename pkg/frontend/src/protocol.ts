/** Wire types for the vizact serve protocol (JSON over a WebSocket). */

export interface EventRecord {
  tick: number;
  kind: string;
  x?: number;
  y?: number;
  dx?: number;
  dy?: number;
  delta?: number;
  key?: string;
  control?: string;
  value?: unknown;
}

export interface Diagnostic {
  severity: "error" | "warning" | "hint";
  code: string;
  path: string;
  message: string;
}

export interface TraceEntry {
  tick: number;
  matched: string[];
  hit: string | null;
  channels: [string, string, unknown, unknown][];
  state: [string, unknown, unknown][];
  data: [string, string[], string[]][];
  camera: [string, string, number, number][];
  errors: [string, string][];
}

export interface SignatureTermView {
  term: string;
  kind: "required" | "optional" | "one_of";
  satisfied: boolean;
}

export interface InspectReport {
  unit: string;
  technique: string;
  userIntents: string[];
  authoringIntents: string[];
  provenance: string;
  classification: Record<string, unknown>;
  signature: SignatureTermView[];
  variables: Record<string, unknown>;
  graph: Record<string, unknown>;
  lastEntry: TraceEntry | null;
}

export type ClientMessage =
  | { op: "load"; doc: unknown }
  | { op: "event"; event: EventRecord }
  | { op: "inspect"; unit: string };

export type ServerMessage =
  | { op: "scene"; svg: string }
  | { op: "trace"; entry: TraceEntry }
  | { op: "report"; report: InspectReport }
  | { op: "diagnostics"; diagnostics: Diagnostic[] };

export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null || !("op" in data)) return null;
  const op = (data as { op: unknown }).op;
  if (op === "scene" || op === "trace" || op === "report" || op === "diagnostics") {
    return data as ServerMessage;
  }
  return null;
}
