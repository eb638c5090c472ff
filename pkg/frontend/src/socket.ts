// Websocket client: validates outbound frames, parses inbound ones, and
// reconnects with a capped backoff.

import { parseServerMsg, validateClientMsg, type ClientMsg, type ServerMsg } from "./protocol.js";

export interface SocketEvents {
  onMessage: (msg: ServerMsg) => void;
  onStatus: (connected: boolean) => void;
}

export class TrainerSocket {
  private ws: WebSocket | null = null;
  private attempts = 0;
  private closed = false;

  constructor(private url: string, private events: SocketEvents) {}

  connect(): void {
    if (this.closed) return;
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.attempts = 0;
      this.events.onStatus(true);
    };
    this.ws.onmessage = (ev) => {
      const msg = parseServerMsg(String(ev.data));
      if (msg) this.events.onMessage(msg);
    };
    this.ws.onclose = () => {
      this.events.onStatus(false);
      this.ws = null;
      if (!this.closed) this.reconnect();
    };
  }

  private reconnect(): void {
    const waitMs = Math.min(500 * 2 ** this.attempts, 10_000);
    this.attempts += 1;
    setTimeout(() => this.connect(), waitMs);
  }

  send(msg: ClientMsg): boolean {
    if (!validateClientMsg(msg)) return false;
    if (!this.ws || this.ws.readyState !== WebSocket.OPEN) return false;
    this.ws.send(JSON.stringify(msg));
    return true;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
