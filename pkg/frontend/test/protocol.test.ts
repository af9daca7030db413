import { describe, expect, it } from "vitest";

import { ProtocolError, decodeServer, encodeClient, round2 } from "../src/protocol.js";

describe("round2", () => {
  it("matches the server's two-decimal canonicalization", () => {
    expect(round2(3.14159)).toBe(3.14);
    expect(round2(2.005)).toBe(2.01);
    expect(round2(-7.999)).toBe(-8);
    expect(round2(25)).toBe(25);
  });
});

describe("client encoding", () => {
  it("is plain JSON with type and seq", () => {
    const line = encodeClient({ type: "set_weather", seq: 3, weather: "hot" });
    expect(JSON.parse(line)).toEqual({ type: "set_weather", seq: 3, weather: "hot" });
  });
});

describe("server decoding", () => {
  it("accepts the four server message types", () => {
    const ack = decodeServer('{"type":"ack","tick":5,"seq":2,"payload":{}}');
    expect(ack).toEqual({ type: "ack", tick: 5, seq: 2, payload: {} });
    const err = decodeServer('{"type":"error","tick":1,"payload":{"code":"bad_message","detail":"x"}}');
    expect(err.seq).toBeUndefined();
    expect(err.payload["code"]).toBe("bad_message");
  });

  it("rejects malformed lines", () => {
    expect(() => decodeServer("{oops")).toThrow(ProtocolError);
    expect(() => decodeServer('{"type":"party","tick":1}')).toThrow(ProtocolError);
    expect(() => decodeServer('{"type":"ack","tick":"one"}')).toThrow(ProtocolError);
    expect(() => decodeServer('{"type":"ack","tick":1,"payload":[1]}')).toThrow(ProtocolError);
  });
});
