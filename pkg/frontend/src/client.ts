// WebSocket transport: connects to the gateway, subscribes, and feeds every
// frame into the view state. Reconnects with a capped backoff.

import { ViewState } from "./store.js";

export class GatewayClient {
  private ws: WebSocket | null = null;
  private backoff = 500;
  private closed = false;

  constructor(
    private url: string,
    private state: ViewState,
    private onChange: () => void,
  ) {
    state.attach((line) => {
      if (this.ws === null || this.ws.readyState !== WebSocket.OPEN) return false;
      this.ws.send(line);
      return true;
    });
  }

  connect(): void {
    this.closed = false;
    this.state.status = "connecting";
    this.onChange();
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.backoff = 500;
      this.state.status = "connected";
      this.state.dispatch({ kind: "subscribe" });
      this.onChange();
    };
    ws.onmessage = (event) => {
      for (const line of String(event.data).split("\n")) {
        if (line.trim()) this.state.receiveLine(line);
      }
      this.onChange();
    };
    ws.onclose = () => {
      this.state.status = "disconnected";
      this.onChange();
      if (!this.closed) {
        setTimeout(() => this.connect(), this.backoff);
        this.backoff = Math.min(this.backoff * 2, 10_000);
      }
    };
    ws.onerror = () => {
      ws.close();
    };
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
