"""Socket helpers for gateway tests: a line client and a minimal WebSocket
client (client frames are masked per RFC 6455)."""

from __future__ import annotations

import base64
import json
import os
import socket
import struct


class LineClient:
    def __init__(self, host: str, port: int, timeout: float = 5.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        self.sock.settimeout(timeout)
        self.buf = b""
        self.seq = 0

    def send(self, doc: dict) -> None:
        self.sock.sendall((json.dumps(doc) + "\n").encode("utf-8"))

    def send_raw(self, data: bytes) -> None:
        self.sock.sendall(data)

    def next_seq(self) -> int:
        self.seq += 1
        return self.seq

    def request(self, mtype: str, **fields) -> int:
        seq = self.next_seq()
        self.send({"type": mtype, "seq": seq, **fields})
        return seq

    def read_msg(self, timeout: float | None = None):
        if timeout is not None:
            self.sock.settimeout(timeout)
        while b"\n" not in self.buf:
            chunk = self.sock.recv(4096)
            if not chunk:
                raise ConnectionError("server closed")
            self.buf += chunk
        line, self.buf = self.buf.split(b"\n", 1)
        return json.loads(line.decode("utf-8"))

    def read_until(self, pred, limit: int = 500):
        for _ in range(limit):
            msg = self.read_msg()
            if pred(msg):
                return msg
        raise AssertionError("expected message not seen")

    def expect_ack(self, seq: int):
        return self.read_until(lambda m: m["type"] in ("ack", "error") and m.get("seq") == seq)

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass


class WsClient:
    def __init__(self, host: str, port: int, timeout: float = 5.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        self.sock.settimeout(timeout)
        key = base64.b64encode(os.urandom(16)).decode("ascii")
        request = (
            f"GET /ws HTTP/1.1\r\nHost: {host}:{port}\r\n"
            "Upgrade: websocket\r\nConnection: Upgrade\r\n"
            f"Sec-WebSocket-Key: {key}\r\nSec-WebSocket-Version: 13\r\n\r\n"
        )
        self.sock.sendall(request.encode("ascii"))
        headers = b""
        while b"\r\n\r\n" not in headers:
            headers += self.sock.recv(4096)
        assert b"101" in headers.split(b"\r\n", 1)[0]
        self.seq = 0

    def send_text(self, text: str) -> None:
        payload = text.encode("utf-8")
        mask = os.urandom(4)
        head = bytes([0x81])
        n = len(payload)
        if n < 126:
            head += bytes([0x80 | n])
        elif n < (1 << 16):
            head += bytes([0x80 | 126]) + struct.pack(">H", n)
        else:
            head += bytes([0x80 | 127]) + struct.pack(">Q", n)
        body = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        self.sock.sendall(head + mask + body)

    def request(self, mtype: str, **fields) -> int:
        self.seq += 1
        self.send_text(json.dumps({"type": mtype, "seq": self.seq, **fields}))
        return self.seq

    def _exact(self, n: int) -> bytes:
        buf = b""
        while len(buf) < n:
            chunk = self.sock.recv(n - len(buf))
            if not chunk:
                raise ConnectionError("server closed")
            buf += chunk
        return buf

    def recv_msg(self):
        head = self._exact(2)
        opcode = head[0] & 0x0F
        n = head[1] & 0x7F
        if n == 126:
            n = struct.unpack(">H", self._exact(2))[0]
        elif n == 127:
            n = struct.unpack(">Q", self._exact(8))[0]
        payload = self._exact(n) if n else b""
        if opcode == 0x8:
            raise ConnectionError("server sent close")
        return json.loads(payload.decode("utf-8"))

    def read_until(self, pred, limit: int = 500):
        for _ in range(limit):
            msg = self.recv_msg()
            if pred(msg):
                return msg
        raise AssertionError("expected message not seen")

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass
