/** WebSocket transport with reconnection and exponential backoff. The
 * socket factory is injectable so tests can run without a network. */

export type SocketFactory = (url: string) => WebSocketLike;

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type TransportStatus = "connecting" | "connected" | "reconnecting" | "closed";

export interface TransportHooks {
  onMessage: (raw: string) => void;
  onStatus?: (status: TransportStatus, attempt: number) => void;
}

const BASE_DELAY_MS = 250;
const MAX_DELAY_MS = 8000;

export class Transport {
  private socket: WebSocketLike | null = null;
  private ready = false;
  private attempt = 0;
  private stopped = false;
  private queue: string[] = [];

  constructor(
    private url: string,
    private hooks: TransportHooks,
    private factory: SocketFactory,
    private schedule: (fn: () => void, ms: number) => void = (fn, ms) => setTimeout(fn, ms),
  ) {}

  connect(): void {
    this.stopped = false;
    this.open();
  }

  private open(): void {
    this.hooks.onStatus?.(this.attempt === 0 ? "connecting" : "reconnecting", this.attempt);
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.attempt = 0;
      this.ready = true;
      this.hooks.onStatus?.("connected", 0);
      const pending = this.queue;
      this.queue = [];
      for (const raw of pending) socket.send(raw);
    };
    socket.onmessage = (ev) => this.hooks.onMessage(String(ev.data));
    socket.onclose = () => this.retry();
    socket.onerror = () => {
      /* close follows */
    };
  }

  private retry(): void {
    if (this.stopped) return;
    this.socket = null;
    this.ready = false;
    const delay = Math.min(MAX_DELAY_MS, BASE_DELAY_MS * 2 ** this.attempt);
    this.attempt += 1;
    this.schedule(() => this.open(), delay);
  }

  send(raw: string): void {
    if (this.socket === null || !this.ready) {
      this.queue.push(raw);
      return;
    }
    try {
      this.socket.send(raw);
    } catch {
      this.queue.push(raw);
    }
  }

  close(): void {
    this.stopped = true;
    this.ready = false;
    this.hooks.onStatus?.("closed", this.attempt);
    this.socket?.close();
    this.socket = null;
  }
}
