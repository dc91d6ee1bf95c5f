/** Browser wiring: editor, live scene, generated control widgets, unit
 * inspector, trace log, session export. Everything semantic happens on the
 * server; this file only moves messages and renders what comes back. */

import { controlsOf } from "./controls.js";
import {
  controlChange,
  keyEvent,
  pointerEvent,
  scrollEvent,
  wheelEvent,
  Viewport,
} from "./events.js";
import { viewFor } from "./inspector.js";
import { ClientMessage, InspectReport } from "./protocol.js";
import { InspectorLevel, Session } from "./session.js";
import { Transport } from "./transport.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function viewport(scene: HTMLElement): Viewport {
  const rect = scene.getBoundingClientRect();
  return { left: rect.left, top: rect.top, width: rect.width, height: rect.height };
}

export function boot(url: string): void {
  const editor = el<HTMLTextAreaElement>("editor");
  const sceneHost = el<HTMLDivElement>("scene");
  const controlsHost = el<HTMLDivElement>("controls");
  const unitsHost = el<HTMLDivElement>("units");
  const inspectorHost = el<HTMLPreElement>("inspector");
  const diagnosticsHost = el<HTMLPreElement>("diagnostics");
  const traceHost = el<HTMLPreElement>("tracelog");
  const banner = el<HTMLDivElement>("banner");

  const transport = new Transport(
    url,
    {
      onMessage: (raw) => session.receive(raw),
      onStatus: (status, attempt) => {
        banner.textContent = status === "connected" ? "" : `${status} (attempt ${attempt})`;
        banner.style.display = status === "connected" ? "none" : "block";
      },
    },
    (u) => new WebSocket(u) as never,
  );

  const session = new Session(
    (message: ClientMessage) => transport.send(JSON.stringify(message)),
    {
      onScene: (svg) => {
        sceneHost.innerHTML = svg;
        diagnosticsHost.textContent = "";
      },
      onDiagnostics: (diags) => {
        diagnosticsHost.textContent = diags
          .map((d) => `${d.severity} ${d.code} at ${d.path}: ${d.message}`)
          .join("\n");
      },
      onTrace: (message) => {
        traceHost.textContent += JSON.stringify(message.entry) + "\n";
      },
      onReport: (report) => renderInspector(report),
    },
  );
  transport.connect();

  function renderInspector(report: InspectReport): void {
    const latest = session.traceLog[session.traceLog.length - 1] ?? null;
    const view = viewFor(report, session.inspectorLevel, latest);
    inspectorHost.textContent = JSON.stringify(view, null, 2);
  }

  function rebuildWidgets(): void {
    controlsHost.innerHTML = "";
    unitsHost.innerHTML = "";
    for (const spec of controlsOf(session.docText)) {
      const wrap = document.createElement("label");
      wrap.textContent = `${spec.label ?? spec.name} `;
      if (spec.kind === "slider" || spec.kind === "scroller") {
        const input = document.createElement("input");
        input.type = "range";
        input.min = String(spec.domain?.[0] ?? 0);
        input.max = String(spec.domain?.[1] ?? 100);
        input.oninput = () => session.sendEvent(controlChange(spec.name, Number(input.value)));
        wrap.appendChild(input);
      } else if (spec.kind === "checkbox") {
        const input = document.createElement("input");
        input.type = "checkbox";
        input.onchange = () => session.sendEvent(controlChange(spec.name, input.checked));
        wrap.appendChild(input);
      } else {
        const select = document.createElement("select");
        for (const option of spec.options) {
          const item = document.createElement("option");
          item.value = String(option);
          item.textContent = String(option);
          select.appendChild(item);
        }
        select.onchange = () => session.sendEvent(controlChange(spec.name, select.value));
        wrap.appendChild(select);
      }
      controlsHost.appendChild(wrap);
    }
    let doc: { interactions?: { name?: string }[] } = {};
    try {
      doc = JSON.parse(session.docText);
    } catch {
      return;
    }
    for (const unit of doc.interactions ?? []) {
      if (!unit.name) continue;
      const name = unit.name;
      const btn = document.createElement("button");
      btn.textContent = name;
      btn.onclick = () => session.inspect(name, levelPicker.value as InspectorLevel);
      unitsHost.appendChild(btn);
    }
  }

  const levelPicker = el<HTMLSelectElement>("level");
  levelPicker.onchange = () => {
    if (session.selectedUnit) session.inspect(session.selectedUnit, levelPicker.value as InspectorLevel);
  };

  el<HTMLButtonElement>("load").onclick = () => {
    session.loadDocument(editor.value);
    traceHost.textContent = "";
    rebuildWidgets();
  };

  el<HTMLButtonElement>("export").onclick = () => {
    const script = session.exportScript("session");
    const blob = new Blob([JSON.stringify(script, null, 2)], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "session.script.json";
    link.click();
  };

  const forward = (stamp: ReturnType<typeof pointerEvent>) => {
    if (stamp) session.sendEvent(stamp);
  };
  sceneHost.addEventListener("pointerdown", (e) => forward(pointerEvent("pointer_down", e, viewport(sceneHost))));
  sceneHost.addEventListener("pointerup", (e) => forward(pointerEvent("pointer_up", e, viewport(sceneHost))));
  sceneHost.addEventListener("pointermove", (e) => forward(pointerEvent("pointer_move", e, viewport(sceneHost))));
  sceneHost.addEventListener("click", (e) => forward(pointerEvent("click", e, viewport(sceneHost))));
  sceneHost.addEventListener("dblclick", (e) => forward(pointerEvent("double_click", e, viewport(sceneHost))));
  sceneHost.addEventListener("wheel", (e) => {
    e.preventDefault();
    forward(wheelEvent(e, viewport(sceneHost)));
  });
  window.addEventListener("keydown", (e) => session.sendEvent(keyEvent("key_down", e)));
  window.addEventListener("scroll", () => session.sendEvent(scrollEvent(window.scrollY)));
}
