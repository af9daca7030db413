// ViewState: the single mutable store behind the UI. Rendered state always
// derives from the latest server snapshot; a gesture only marks its command
// as pending until the matching ack or error arrives, so local edits are
// reconciled (ack) or rolled back (error) rather than trusted.

import { Gesture, messageFor } from "./gestures.js";
import { ClientMessage, ServerMessage, decodeServer } from "./protocol.js";
import { Scene, SchemaError, render, validateSnapshot } from "./viewmodel.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface LogEntry {
  tick: number;
  text: string;
}

export interface SendResult {
  sent: boolean;
  message: ClientMessage | null;
  notice: string | null;
}

const SCROLLBACK_LIMIT = 250;

export class ViewState {
  status: ConnectionStatus = "disconnected";
  scene: Scene | null = null;
  pending = new Map<number, ClientMessage>();
  log: LogEntry[] = [];
  banner: string | null = null;
  paused = false;
  tps = 10;
  private seq = 0;
  private transmit: ((line: string) => boolean) | null = null;

  attach(transmit: (line: string) => boolean): void {
    this.transmit = transmit;
  }

  /** One gesture, one message. Refused with a visible notice when offline. */
  dispatch(gesture: Gesture): SendResult {
    if (this.status !== "connected" || this.transmit === null) {
      this.banner = `not connected: ${gesture.kind} not sent`;
      return { sent: false, message: null, notice: this.banner };
    }
    const message = messageFor(gesture, ++this.seq);
    if (!this.transmit(JSON.stringify(message))) {
      this.banner = `send failed: ${gesture.kind}`;
      return { sent: false, message: null, notice: this.banner };
    }
    this.pending.set(message.seq, message);
    if (gesture.kind === "pause") this.paused = true;
    if (gesture.kind === "resume") this.paused = false;
    if (gesture.kind === "speed") this.tps = gesture.tps;
    return { sent: true, message, notice: null };
  }

  receiveLine(line: string): void {
    let msg: ServerMessage;
    try {
      msg = decodeServer(line);
    } catch (err) {
      this.banner = String(err);
      return;
    }
    this.receive(msg);
  }

  receive(msg: ServerMessage): void {
    switch (msg.type) {
      case "ack":
        if (msg.seq !== undefined) this.pending.delete(msg.seq);
        return;
      case "error": {
        const rolledBack = msg.seq !== undefined ? this.pending.get(msg.seq) : undefined;
        if (msg.seq !== undefined) this.pending.delete(msg.seq);
        const what = rolledBack ? ` (${rolledBack.type} rolled back)` : "";
        this.banner = `server error: ${msg.payload["code"] ?? "?"} ${msg.payload["detail"] ?? ""}${what}`;
        return;
      }
      case "snapshot":
        try {
          this.scene = render(validateSnapshot(msg.payload));
          this.banner = null;
        } catch (err) {
          if (err instanceof SchemaError) {
            // keep the last good scene, surface the mismatch
            this.banner = `bad snapshot: ${err.message}`;
          } else {
            throw err;
          }
        }
        return;
      case "trace_event":
        this.appendTrace(msg);
        return;
    }
  }

  private appendTrace(msg: ServerMessage): void {
    const kind = msg.payload["kind"];
    const inner = (msg.payload["payload"] ?? {}) as Record<string, unknown>;
    let text: string | null = null;
    if (kind === "rule_fired") {
      text = `rule ${inner["rule"]} fired ${JSON.stringify(inner["binding"])}`;
    } else if (kind === "fact_added" || kind === "fact_removed") {
      const fact = inner["fact"] as unknown[];
      const sign = kind === "fact_added" ? "+" : "-";
      text = `${sign} ${Array.isArray(fact) ? fact.join(" ") : ""}`;
    } else if (kind === "error") {
      text = `error: ${inner["code"]} ${inner["detail"] ?? ""}`;
    }
    if (text !== null) {
      this.log.push({ tick: msg.tick, text });
      if (this.log.length > SCROLLBACK_LIMIT) {
        this.log.splice(0, this.log.length - SCROLLBACK_LIMIT);
      }
    }
  }
}
