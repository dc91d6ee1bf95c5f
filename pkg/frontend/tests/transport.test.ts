import { describe, expect, it } from "vitest";

import { Transport, TransportStatus, WebSocketLike } from "../src/transport.js";

class FakeSocket implements WebSocketLike {
  sent: string[] = [];
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;
  send(data: string) { this.sent.push(data); }
  close() { this.onclose?.(); }
}

function harness() {
  const sockets: FakeSocket[] = [];
  const statuses: [TransportStatus, number][] = [];
  const delays: number[] = [];
  const pending: (() => void)[] = [];
  const transport = new Transport(
    "ws://test",
    { onMessage: () => undefined, onStatus: (s, n) => statuses.push([s, n]) },
    () => { const s = new FakeSocket(); sockets.push(s); return s; },
    (fn, ms) => { delays.push(ms); pending.push(fn); },
  );
  return { transport, sockets, statuses, delays, tick: () => pending.shift()?.() };
}

describe("Transport", () => {
  it("queues messages until the socket opens", () => {
    const { transport, sockets } = harness();
    transport.connect();
    transport.send("a");
    expect(sockets[0]?.sent).toEqual([]);
    sockets[0]?.onopen?.();
    expect(sockets[0]?.sent).toEqual(["a"]);
  });

  it("reconnects with exponential backoff", () => {
    const { transport, sockets, delays, tick, statuses } = harness();
    transport.connect();
    sockets[0]?.onopen?.();
    sockets[0]?.onclose?.();     // connection lost
    tick();
    sockets[1]?.onclose?.();     // still down
    tick();
    expect(delays).toEqual([250, 500]);
    expect(statuses.some(([s]) => s === "reconnecting")).toBe(true);
    sockets[2]?.onopen?.();
    expect(statuses[statuses.length - 1]).toEqual(["connected", 0]);
  });

  it("stops retrying after close", () => {
    const { transport, sockets, delays } = harness();
    transport.connect();
    sockets[0]?.onopen?.();
    transport.close();
    expect(delays).toEqual([]);
  });
});
