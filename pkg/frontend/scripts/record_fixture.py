#!/usr/bin/env python3
"""Record the UI test fixture from a real gateway session.

Runs the packaged lee_autumn scenario behind a paused gateway, steps through
the canonical moments (before entry / after entry / on the sofa / after
departure), and captures the exact snapshot payloads a subscribed client
receives. Gesture expectations are canonicalized through the server-side
protocol codec so the UI tests assert against what the wire really carries.

Usage: python scripts/record_fixture.py  (writes test/fixtures/session.json)
"""

import json
import pathlib
import socket
import sys

import homesim
from homesim import protocol
from homesim.gateway import Gateway


class Client:
    def __init__(self, host, port):
        self.sock = socket.create_connection((host, port), timeout=10)
        self.buf = b""
        self.seq = 0

    def request(self, mtype, **fields):
        self.seq += 1
        line = json.dumps({"type": mtype, "seq": self.seq, **fields}) + "\n"
        self.sock.sendall(line.encode())
        return self.seq

    def read(self):
        while b"\n" not in self.buf:
            self.buf += self.sock.recv(65536)
        line, self.buf = self.buf.split(b"\n", 1)
        return json.loads(line)

    def read_until(self, pred):
        while True:
            msg = self.read()
            if pred(msg):
                return msg

    def snapshot_at(self, tick):
        return self.read_until(lambda m: m["type"] == "snapshot" and m["tick"] == tick)

    def step_to(self, tick, world):
        n = tick - world.tick
        assert n > 0
        self.request("step", n=n)
        return self.snapshot_at(tick)["payload"]


def canonical_gesture(gesture, message):
    """Round-trip a client message through the server codec; the stored
    expectation is exactly what the server accepts (seq stripped)."""
    decoded = protocol.decode(protocol.encode_client(protocol.ClientMessage(message["type"], 1, {k: v for k, v in message.items() if k != "type"})))
    return {"gesture": gesture, "expected": {"type": decoded.type, **decoded.body}}


def main():
    world = homesim.load_builtin("lee_autumn")
    gw = Gateway(world, port=0, tps=100.0, start_paused=True)
    host, port = gw.start()
    try:
        c = Client(host, port)
        c.request("subscribe")
        initial = c.read_until(lambda m: m["type"] == "snapshot" and m["tick"] == 0)["payload"]
        after_entry = c.step_to(21, world)   # schedule: authenticate @18, enter @20
        after_sofa = c.step_to(42, world)    # sofa move @40, dwell 2 -> TV on @41
        after_depart = c.step_to(122, world) # departure @120 -> everything off
    finally:
        gw.stop()

    gestures = [
        canonical_gesture(
            {"kind": "drag_person", "person": "lee", "x": 3.3, "y": 2.2},
            {"type": "move_person", "person": "lee", "x": 3.3, "y": 2.2},
        ),
        canonical_gesture(
            {"kind": "weather", "weather": "snow"},
            {"type": "set_weather", "weather": "snow"},
        ),
        canonical_gesture(
            {"kind": "override", "appliance": "tv", "property": "channel", "value": 11},
            {"type": "override", "appliance": "tv", "property": "channel", "value": 11},
        ),
        canonical_gesture(
            {"kind": "authenticate", "person": "lee", "credential": "1234"},
            {"type": "authenticate", "person": "lee", "credential": "1234"},
        ),
        canonical_gesture(
            {"kind": "drag_person", "person": "lee", "x": 3.14159, "y": 2.71828},
            {"type": "move_person", "person": "lee", "x": 3.14159, "y": 2.71828},
        ),
    ]

    fixture = {
        "scenario": "lee_autumn",
        "snapshots": {
            "initial": initial,
            "after_entry": after_entry,
            "after_sofa": after_sofa,
            "after_depart": after_depart,
        },
        "gestures": gestures,
    }
    out = pathlib.Path(__file__).resolve().parent.parent / "test" / "fixtures" / "session.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(fixture, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")
    print(f"snapshots at ticks 0/21/42/122; {len(gestures)} gesture expectations")


if __name__ == "__main__":
    sys.exit(main())
