/** Playground session: document text, live scene, append-only trace log,
 * inspector state. Semantically stateless: every visual change originates
 * from a server message, so replaying the exported script headlessly must
 * reproduce the session's trace. */

import {
  ClientMessage,
  Diagnostic,
  EventRecord,
  InspectReport,
  ServerMessage,
  parseServerMessage,
} from "./protocol.js";

export type SendFn = (message: ClientMessage) => void;

export interface SessionHooks {
  onScene?: (svg: string) => void;
  onDiagnostics?: (diags: Diagnostic[]) => void;
  onTrace?: (entry: ServerMessage & { op: "trace" }) => void;
  onReport?: (report: InspectReport) => void;
}

export type InspectorLevel = "intent" | "technique" | "component";

export class Session {
  docText = "";
  currentSvg = "";
  readonly traceLog: import("./protocol.js").TraceEntry[] = [];
  readonly sentEvents: EventRecord[] = [];
  diagnostics: Diagnostic[] = [];
  selectedUnit: string | null = null;
  inspectorLevel: InspectorLevel = "technique";
  lastReport: InspectReport | null = null;

  private nextTick = 1;
  private loadPending = false;

  constructor(private send: SendFn, private hooks: SessionHooks = {}) {}

  /** Send the edited document; the scene swaps only on success. */
  loadDocument(docText: string): void {
    this.docText = docText;
    this.loadPending = true;
    let doc: unknown = docText;
    try {
      doc = JSON.parse(docText);
    } catch {
      // let the server produce the E000 diagnostic
    }
    this.send({ op: "load", doc });
  }

  /** Assign the next client-side tick and forward one event. */
  sendEvent(event: Omit<EventRecord, "tick">): EventRecord {
    const stamped: EventRecord = { tick: this.nextTick++, ...event };
    this.sentEvents.push(stamped);
    this.send({ op: "event", event: stamped });
    return stamped;
  }

  inspect(unit: string, level: InspectorLevel = this.inspectorLevel): void {
    this.selectedUnit = unit;
    this.inspectorLevel = level;
    this.send({ op: "inspect", unit });
  }

  /** Feed one raw server message into the session. */
  receive(raw: string): void {
    const message = parseServerMessage(raw);
    if (message === null) return;
    switch (message.op) {
      case "scene":
        this.currentSvg = message.svg;
        if (this.loadPending) {
          this.loadPending = false;
          this.diagnostics = [];
        }
        this.hooks.onScene?.(message.svg);
        break;
      case "trace":
        this.traceLog.push(message.entry); // append-only
        this.hooks.onTrace?.(message);
        break;
      case "report":
        this.lastReport = message.report;
        this.hooks.onReport?.(message.report);
        break;
      case "diagnostics":
        this.diagnostics = message.diagnostics;
        this.loadPending = false; // previous scene is retained
        this.hooks.onDiagnostics?.(message.diagnostics);
        break;
    }
  }

  /** Every manual exploration becomes a reproducible headless run. */
  exportScript(name: string): { name: string; events: EventRecord[] } {
    return { name, events: [...this.sentEvents] };
  }
}
