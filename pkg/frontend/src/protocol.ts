// Wire protocol for the gateway: newline-delimited JSON documents, one per
// WebSocket text frame. Mirrors the server's schema; numeric fields are
// canonicalized to 2 decimals exactly like the server's decoder, so the
// message we display as "sent" equals what the trace will record.

export type WeatherKind = "rain" | "snow" | "hot" | "cloudy";
export const WEATHER_KINDS: WeatherKind[] = ["rain", "snow", "hot", "cloudy"];

export type PropertyName = "power" | "mode" | "setpoint" | "channel" | "open";
export type PropertyValue = string | number | boolean;

export interface SetWeatherMessage {
  type: "set_weather";
  seq: number;
  weather: WeatherKind;
}

export interface MovePersonMessage {
  type: "move_person";
  seq: number;
  person: string;
  x: number;
  y: number;
}

export interface AuthenticateMessage {
  type: "authenticate";
  seq: number;
  person: string;
  credential: string;
}

export interface OverrideMessage {
  type: "override";
  seq: number;
  appliance: string;
  property: PropertyName;
  value: PropertyValue;
}

export interface StepMessage {
  type: "step";
  seq: number;
  n: number;
}

export interface SetSpeedMessage {
  type: "set_speed";
  seq: number;
  tps: number;
}

export interface BareMessage {
  type: "pause" | "resume" | "subscribe";
  seq: number;
}

export type ClientMessage =
  | SetWeatherMessage
  | MovePersonMessage
  | AuthenticateMessage
  | OverrideMessage
  | StepMessage
  | SetSpeedMessage
  | BareMessage;

export type ServerMessageType = "snapshot" | "trace_event" | "ack" | "error";

export interface ServerMessage {
  type: ServerMessageType;
  tick: number;
  seq?: number;
  payload: Record<string, unknown>;
}

export class ProtocolError extends Error {}

/** Two-decimal canonicalization, matching the server's decoder. */
export function round2(x: number): number {
  return Math.round(x * 100) / 100;
}

export function encodeClient(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

const SERVER_TYPES: ServerMessageType[] = ["snapshot", "trace_event", "ack", "error"];

export function decodeServer(line: string): ServerMessage {
  let doc: unknown;
  try {
    doc = JSON.parse(line);
  } catch (err) {
    throw new ProtocolError(`server line is not JSON: ${err}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new ProtocolError("server message must be an object");
  }
  const rec = doc as Record<string, unknown>;
  const type = rec["type"];
  if (typeof type !== "string" || !SERVER_TYPES.includes(type as ServerMessageType)) {
    throw new ProtocolError(`unknown server message type ${JSON.stringify(type)}`);
  }
  const tick = rec["tick"];
  if (typeof tick !== "number" || !Number.isInteger(tick)) {
    throw new ProtocolError("server message tick must be an integer");
  }
  const payload = rec["payload"] ?? {};
  if (typeof payload !== "object" || payload === null || Array.isArray(payload)) {
    throw new ProtocolError("server message payload must be an object");
  }
  const seq = rec["seq"];
  if (seq !== undefined && (typeof seq !== "number" || !Number.isInteger(seq))) {
    throw new ProtocolError("server message seq must be an integer");
  }
  const out: ServerMessage = {
    type: type as ServerMessageType,
    tick,
    payload: payload as Record<string, unknown>,
  };
  if (seq !== undefined) out.seq = seq as number;
  return out;
}
