/** Widgets for the UI-control listeners a document declares: each control in
 * `scenes[].controls` becomes a live widget emitting ui_change events. */

export interface ControlSpec {
  name: string;
  kind: string;
  options: unknown[];
  domain: [number, number] | null;
  label: string | null;
}

export function controlsOf(docText: string): ControlSpec[] {
  let doc: unknown;
  try {
    doc = JSON.parse(docText);
  } catch {
    return [];
  }
  const scenes = (doc as { scenes?: unknown[] })?.scenes ?? [];
  const out: ControlSpec[] = [];
  for (const scene of scenes) {
    const controls = (scene as { controls?: unknown[] })?.controls ?? [];
    for (const raw of controls) {
      const c = raw as Record<string, unknown>;
      if (typeof c.name !== "string" || typeof c.kind !== "string") continue;
      out.push({
        name: c.name,
        kind: c.kind,
        options: Array.isArray(c.options) ? c.options : [],
        domain: Array.isArray(c.domain) && c.domain.length === 2
          ? [Number(c.domain[0]), Number(c.domain[1])]
          : null,
        label: typeof c.label === "string" ? c.label : null,
      });
    }
  }
  return out;
}
