// Every user gesture maps to exactly one protocol message. The seq is
// allocated by the caller (the view state), so this module stays pure.

import {
  ClientMessage,
  PropertyName,
  PropertyValue,
  WeatherKind,
  round2,
} from "./protocol.js";

export type Gesture =
  | { kind: "drag_person"; person: string; x: number; y: number }
  | { kind: "weather"; weather: WeatherKind }
  | { kind: "override"; appliance: string; property: PropertyName; value: PropertyValue }
  | { kind: "authenticate"; person: string; credential: string }
  | { kind: "pause" }
  | { kind: "resume" }
  | { kind: "step"; n?: number }
  | { kind: "speed"; tps: number }
  | { kind: "subscribe" };

export function messageFor(gesture: Gesture, seq: number): ClientMessage {
  switch (gesture.kind) {
    case "drag_person":
      return {
        type: "move_person",
        seq,
        person: gesture.person,
        x: round2(gesture.x),
        y: round2(gesture.y),
      };
    case "weather":
      return { type: "set_weather", seq, weather: gesture.weather };
    case "override":
      return {
        type: "override",
        seq,
        appliance: gesture.appliance,
        property: gesture.property,
        value: typeof gesture.value === "number" ? round2(gesture.value) : gesture.value,
      };
    case "authenticate":
      return { type: "authenticate", seq, person: gesture.person, credential: gesture.credential };
    case "pause":
      return { type: "pause", seq };
    case "resume":
      return { type: "resume", seq };
    case "step":
      return { type: "step", seq, n: gesture.n ?? 1 };
    case "speed":
      return { type: "set_speed", seq, tps: round2(gesture.tps) };
    case "subscribe":
      return { type: "subscribe", seq };
  }
}
