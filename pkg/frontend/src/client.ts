/**
 * Server connection: websocket wrapper with automatic reconnect and a
 * stall detector.  The console is a pure view over the snapshot stream:
 * if no snapshot arrives for `stallAfterMs` the connection is flagged
 * stalled and inputs are suppressed.
 */

import {
  InboundMessage,
  ServerFrame,
  Snapshot,
  parseFrame,
  serialize,
} from "./protocol.js";

/** Minimal constructor surface shared by browser WebSocket and ws. */
export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

export type ConnectionStatus = "connecting" | "live" | "stalled" | "closed";

export interface ClientOptions {
  url: string;
  makeSocket: WebSocketFactory;
  /** Stall indicator threshold; the release criterion is 1 s. */
  stallAfterMs?: number;
  reconnectDelayMs?: number;
  now?: () => number;
  setTimer?: (fn: () => void, ms: number) => unknown;
  clearTimer?: (handle: unknown) => void;
}

export interface ClientEvents {
  onSnapshot?: (snapshot: Snapshot) => void;
  onStatus?: (status: ConnectionStatus) => void;
  onError?: (error: { error: string; field: string }) => void;
}

export class TeleopClient {
  status: ConnectionStatus = "closed";
  latest: Snapshot | null = null;
  lastSnapshotAt: number | null = null;

  private socket: WebSocketLike | null = null;
  private stallHandle: unknown = null;
  private reconnectHandle: unknown = null;
  private stopped = false;

  private readonly stallAfterMs: number;
  private readonly reconnectDelayMs: number;
  private readonly now: () => number;
  private readonly setTimer: (fn: () => void, ms: number) => unknown;
  private readonly clearTimer: (handle: unknown) => void;

  constructor(private opts: ClientOptions, private events: ClientEvents = {}) {
    this.stallAfterMs = opts.stallAfterMs ?? 1000;
    this.reconnectDelayMs = opts.reconnectDelayMs ?? 500;
    this.now = opts.now ?? (() => Date.now());
    this.setTimer = opts.setTimer ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimer = opts.clearTimer ?? ((h) => clearTimeout(h as never));
  }

  connect(): void {
    this.stopped = false;
    this.open();
  }

  close(): void {
    this.stopped = true;
    this.cancelTimers();
    this.socket?.close();
    this.socket = null;
    this.setStatus("closed");
  }

  /** True only when snapshots are flowing; inputs are suppressed otherwise. */
  get canSend(): boolean {
    return this.status === "live" && this.socket !== null;
  }

  /**
   * Server-timeline timestamp for outgoing messages, in ms.  Gesture
   * windows (multi-click, hold) are measured on the server's tick
   * clock, so inputs must be stamped on that timeline rather than the
   * client's wall clock.
   */
  serverTimeMs(tickRateHz = 20): number {
    return this.latest ? (this.latest.tick * 1000) / tickRateHz : 0;
  }

  send(msg: InboundMessage): boolean {
    if (!this.canSend) return false;
    this.socket!.send(serialize(msg));
    return true;
  }

  private open(): void {
    this.setStatus("connecting");
    const socket = this.opts.makeSocket(this.opts.url);
    this.socket = socket;
    socket.onopen = () => {
      // Status flips to "live" on the first snapshot, not on open:
      // an open socket with no ticks is still a stalled console.
      this.armStallTimer();
    };
    socket.onmessage = (ev) => this.handleFrame(String(ev.data));
    socket.onclose = () => this.handleDrop();
    socket.onerror = () => {
      /* onclose follows; nothing to do here */
    };
  }

  private handleFrame(raw: string): void {
    let frame: ServerFrame;
    try {
      frame = parseFrame(raw);
    } catch {
      return; // tolerate junk frames; the stall timer covers real outages
    }
    if (frame.kind === "error") {
      this.events.onError?.(frame.error);
      return;
    }
    this.latest = frame.snapshot;
    this.lastSnapshotAt = this.now();
    this.setStatus("live");
    this.armStallTimer();
    this.events.onSnapshot?.(frame.snapshot);
  }

  private handleDrop(): void {
    if (this.stopped) return;
    this.setStatus("stalled");
    this.cancelTimers();
    this.reconnectHandle = this.setTimer(() => this.open(),
                                         this.reconnectDelayMs);
  }

  private armStallTimer(): void {
    if (this.stallHandle !== null) this.clearTimer(this.stallHandle);
    this.stallHandle = this.setTimer(() => {
      if (this.status === "live" || this.status === "connecting") {
        this.setStatus("stalled");
      }
    }, this.stallAfterMs);
  }

  private cancelTimers(): void {
    if (this.stallHandle !== null) this.clearTimer(this.stallHandle);
    if (this.reconnectHandle !== null) this.clearTimer(this.reconnectHandle);
    this.stallHandle = null;
    this.reconnectHandle = null;
  }

  private setStatus(status: ConnectionStatus): void {
    if (status === this.status) return;
    this.status = status;
    this.events.onStatus?.(status);
  }
}
