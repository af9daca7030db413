# The message gateway, driven by a scripted client.
#
# Starts the server paused on an ephemeral port, connects a plain TCP
# client speaking the newline-delimited JSON protocol, and steers the
# simulation one step at a time: subscribe, change the weather, authenticate
# Lee, walk him to the sofa, and watch the snapshots change.
# Run: python demos/04_live_gateway.py

import json
import socket

import homesim
from homesim.gateway import Gateway


class Client:
    def __init__(self, host, port):
        self.sock = socket.create_connection((host, port), timeout=5)
        self.buf = b""
        self.seq = 0

    def send(self, mtype, **fields):
        self.seq += 1
        line = json.dumps({"type": mtype, "seq": self.seq, **fields}) + "\n"
        self.sock.sendall(line.encode())

    def recv(self):
        while b"\n" not in self.buf:
            self.buf += self.sock.recv(4096)
        line, self.buf = self.buf.split(b"\n", 1)
        return json.loads(line)

    def recv_snapshot(self):
        while True:
            msg = self.recv()
            if msg["type"] == "snapshot":
                return msg["payload"]


gw = Gateway(homesim.load_builtin("lee_autumn"), port=0, tps=10.0, start_paused=True)
host, port = gw.start()
print(f"gateway listening on {host}:{port} (paused; stepping manually)\n")

c = Client(host, port)
c.send("subscribe")
snap = c.recv_snapshot()
print(f"tick {snap['tick']}: weather={snap['weather']}, "
      f"lee in {next(f['space'] for f in snap['factors'] if f['id'] == 'lee')}")

c.send("set_weather", weather="hot")
c.send("authenticate", person="lee", credential="1234")
c.send("step")
snap = c.recv_snapshot()
gate = next(f for f in snap["factors"] if f["id"] == "gate")
print(f"tick {snap['tick']}: weather={snap['weather']}, gate open={gate['open']}")

c.send("move_person", person="lee", x=4.8, y=2.8)
c.send("step", n=2)
snap = c.recv_snapshot()
snap = c.recv_snapshot()
light = next(f for f in snap["factors"] if f["id"] == "light_living")
print(f"tick {snap['tick']}: lee entered, light_living power={light['power']}")

c.send("move_person", person="lee", x=3.3, y=2.2)
c.send("step", n=3)
for _ in range(3):
    snap = c.recv_snapshot()
tv = next(f for f in snap["factors"] if f["id"] == "tv")
print(f"tick {snap['tick']}: lee on the sofa, tv power={tv['power']} channel={tv['channel']}")

gw.stop()
print("\ngateway stopped")
