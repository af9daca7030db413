"""Message gateway: socket server, real-time pacing, trace persistence, and
the pluggable weather provider.

Transport is newline-delimited JSON over a plain TCP socket; the same port
also accepts WebSocket upgrades (the browser UI path) by sniffing the first
line for an HTTP GET. I/O threads communicate with the engine only through
an ordered inbound command queue and immutable outbound lines; the engine
thread is the sole owner of the World.
"""

from __future__ import annotations

import base64
import hashlib
import json
import queue
import socket
import struct
import threading
import time
import urllib.request
from dataclasses import dataclass
from fnmatch import fnmatch

from . import engine, protocol
from .engine import World
from .errors import BadMessage, Unsupported, WeatherUnavailable

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


# ---------------------------------------------------------------------------
# Weather provider
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeatherProvider:
    """stub mode echoes the configured kind and never touches the network;
    live mode fetches a condition string and maps it through glob patterns
    onto the four weather kinds."""

    mode: str = "stub"  # stub | live
    kind: str = "cloudy"  # stub result
    region_code: str = "KWANGJU"
    url_template: str = ""
    condition_field: str = "condition"
    mapping: tuple[tuple[str, str], ...] = (
        # first match wins: snow before the generic *shower* rain pattern
        ("snow*", "snow"),
        ("*snow*", "snow"),
        ("*sleet*", "snow"),
        ("*rain*", "rain"),
        ("*shower*", "rain"),
        ("*drizzle*", "rain"),
        ("*hot*", "hot"),
        ("*sunny*", "hot"),
        ("*clear*", "hot"),
        ("*cloud*", "cloudy"),
        ("*overcast*", "cloudy"),
        ("*fog*", "cloudy"),
    )
    timeout: float = 3.0


def map_condition(provider: WeatherProvider, condition: str) -> str:
    needle = condition.strip().lower()
    for pattern, kind in provider.mapping:
        if fnmatch(needle, pattern):
            return kind
    raise WeatherUnavailable(f"no mapping for condition {condition!r}")


def fetch_weather(provider: WeatherProvider) -> str:
    """Current weather kind per the provider; raises WeatherUnavailable on
    any network or mapping failure so the caller keeps the last known kind."""
    if provider.mode == "stub":
        return provider.kind
    url = provider.url_template.format(region=provider.region_code)
    try:
        with urllib.request.urlopen(url, timeout=provider.timeout) as resp:
            doc = json.loads(resp.read().decode("utf-8"))
        condition = doc[provider.condition_field]
    except WeatherUnavailable:
        raise
    except Exception as err:  # URLError, timeout, JSON, missing field
        raise WeatherUnavailable(f"provider fetch failed: {err}") from err
    if not isinstance(condition, str):
        raise WeatherUnavailable(f"condition field {provider.condition_field!r} is not a string")
    return map_condition(provider, condition)


# ---------------------------------------------------------------------------
# WebSocket framing (server side, text frames)
# ---------------------------------------------------------------------------


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError("peer closed")
        buf += chunk
    return buf


def ws_accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + _WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def ws_read_message(sock: socket.socket) -> str | None:
    """Read one text message (handling ping/close). None means closed."""
    while True:
        head = _recv_exact(sock, 2)
        opcode = head[0] & 0x0F
        masked = bool(head[1] & 0x80)
        length = head[1] & 0x7F
        if length == 126:
            length = struct.unpack(">H", _recv_exact(sock, 2))[0]
        elif length == 127:
            length = struct.unpack(">Q", _recv_exact(sock, 8))[0]
        mask = _recv_exact(sock, 4) if masked else b"\x00" * 4
        payload = _recv_exact(sock, length) if length else b""
        if masked:
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        if opcode == 0x8:  # close
            try:
                sock.sendall(ws_frame(b"", opcode=0x8))
            except OSError:
                pass
            return None
        if opcode == 0x9:  # ping -> pong
            sock.sendall(ws_frame(payload, opcode=0xA))
            continue
        if opcode in (0x1, 0x2):
            return payload.decode("utf-8")
        # continuation frames are not expected from our single-frame clients


def ws_frame(payload: bytes, opcode: int = 0x1) -> bytes:
    head = bytes([0x80 | opcode])
    n = len(payload)
    if n < 126:
        head += bytes([n])
    elif n < (1 << 16):
        head += bytes([126]) + struct.pack(">H", n)
    else:
        head += bytes([127]) + struct.pack(">Q", n)
    return head + payload


# ---------------------------------------------------------------------------
# Gateway
# ---------------------------------------------------------------------------


class _Conn:
    def __init__(self, sock: socket.socket, cid: int):
        self.sock = sock
        self.id = cid
        self.ws = False
        self.subscribed = False
        self.last_seq = -1
        self.out: queue.Queue[str | None] = queue.Queue()
        self.alive = True
        self._rbuf = b""

    def send(self, line: str) -> None:
        if self.alive:
            self.out.put(line)

    def close(self) -> None:
        self.alive = False
        self.out.put(None)
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass


@dataclass
class GatewayStats:
    ticks: int = 0
    connections: int = 0
    messages: int = 0
    errors: int = 0


class Gateway:
    """Owns the engine thread and the socket listeners for one simulation."""

    def __init__(
        self,
        world: World,
        host: str = "127.0.0.1",
        port: int = 0,
        tps: float = 10.0,
        trace_path: str | None = None,
        provider: WeatherProvider | None = None,
        start_paused: bool = False,
    ):
        self.world = world
        self.host, self.port = host, port
        self.tps = tps
        self.trace_path = trace_path
        self.provider = provider
        self.stats = GatewayStats()
        self._inbox: queue.Queue[tuple[str, dict]] = queue.Queue()
        self._conns: dict[int, _Conn] = {}
        self._conn_lock = threading.Lock()
        self._cond = threading.Condition()
        self._paused = start_paused
        self._pending_steps = 0
        self._stop = threading.Event()
        self._listener: socket.socket | None = None
        self._threads: list[threading.Thread] = []
        self._trace_file = None
        self._snapshot_msg = ""
        self._next_cid = 0

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> tuple[str, int]:
        listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((self.host, self.port))
        listener.listen(16)
        listener.settimeout(0.2)  # lets the accept loop notice shutdown
        self._listener = listener
        self.host, self.port = listener.getsockname()[:2]
        if self.trace_path:
            self._trace_file = open(self.trace_path, "w", encoding="utf-8")
        self._snapshot_msg = protocol.encode(
            protocol.ServerMessage("snapshot", self.world.tick, engine.snapshot(self.world))
        )
        if self.provider is not None:
            try:
                kind = fetch_weather(self.provider)
                self._inbox.put(("weather_provider", {"type": "set_weather", "weather": kind}))
            except WeatherUnavailable as err:
                self._inbox.put(
                    ("weather_provider", {"type": "report_error", "code": err.code, "detail": str(err)})
                )
        for target in (self._accept_loop, self._engine_loop):
            th = threading.Thread(target=target, daemon=True)
            th.start()
            self._threads.append(th)
        return self.host, self.port

    def stop(self) -> None:
        self._stop.set()
        with self._cond:
            self._cond.notify_all()
        if self._listener is not None:
            try:
                self._listener.close()
            except OSError:
                pass
        with self._conn_lock:
            conns = list(self._conns.values())
        for conn in conns:
            conn.close()
        for th in self._threads:
            th.join(timeout=5)
        if self._trace_file is not None:
            self._trace_file.close()
            self._trace_file = None

    # -- engine thread ------------------------------------------------------

    def _engine_loop(self) -> None:
        deadline = time.monotonic()
        while not self._stop.is_set():
            stepping = False
            with self._cond:
                while not self._stop.is_set() and self._paused and self._pending_steps == 0:
                    self._cond.wait(0.05)
                if self._stop.is_set():
                    return
                if self._pending_steps > 0:
                    self._pending_steps -= 1
                    stepping = True
            if not stepping:
                now = time.monotonic()
                if deadline > now:
                    time.sleep(min(deadline - now, 0.05))
                    if time.monotonic() < deadline:
                        continue
                deadline = max(deadline + 1.0 / self.tps, time.monotonic())
                with self._cond:
                    if self._paused and self._pending_steps == 0:
                        continue
                    if self._pending_steps > 0:
                        self._pending_steps -= 1
            externals: list[tuple[str, dict]] = []
            try:
                while True:
                    externals.append(self._inbox.get_nowait())
            except queue.Empty:
                pass
            events = engine.tick(self.world, externals)
            self.stats.ticks += 1
            if self._trace_file is not None:
                for e in events:
                    self._trace_file.write(engine.event_line(e) + "\n")
                self._trace_file.flush()
            snap = protocol.encode(
                protocol.ServerMessage("snapshot", self.world.tick, engine.snapshot(self.world))
            )
            self._snapshot_msg = snap
            event_lines = [
                protocol.encode(
                    protocol.ServerMessage(
                        "trace_event",
                        e.tick,
                        {"stage": e.stage, "kind": e.kind, "payload": e.payload},
                    )
                )
                for e in events
            ]
            with self._conn_lock:
                subscribers = [c for c in self._conns.values() if c.subscribed]
            for conn in subscribers:
                for line in event_lines:
                    conn.send(line)
                conn.send(snap)

    # -- connection threads --------------------------------------------------

    def _accept_loop(self) -> None:
        assert self._listener is not None
        while not self._stop.is_set():
            try:
                sock, _addr = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            sock.settimeout(None)
            conn = _Conn(sock, self._next_cid)
            self._next_cid += 1
            with self._conn_lock:
                self._conns[conn.id] = conn
            self.stats.connections += 1
            threading.Thread(target=self._writer_loop, args=(conn,), daemon=True).start()
            threading.Thread(target=self._reader_loop, args=(conn,), daemon=True).start()

    def _writer_loop(self, conn: _Conn) -> None:
        while True:
            line = conn.out.get()
            if line is None:
                return
            try:
                if conn.ws:
                    conn.sock.sendall(ws_frame(line.rstrip("\n").encode("utf-8")))
                else:
                    conn.sock.sendall(line.encode("utf-8"))
            except OSError:
                self._drop(conn)
                return

    def _reader_loop(self, conn: _Conn) -> None:
        try:
            first = self._read_line(conn)
            if first is None:
                self._drop(conn)
                return
            if first.startswith("GET "):
                if not self._ws_handshake(conn):
                    self._drop(conn)
                    return
                conn.ws = True
                while not self._stop.is_set():
                    msg = ws_read_message(conn.sock)
                    if msg is None:
                        break
                    for line in msg.split("\n"):
                        if line.strip():
                            self._dispatch(line, conn)
            else:
                self._dispatch(first, conn)
                while not self._stop.is_set():
                    line = self._read_line(conn)
                    if line is None:
                        break
                    if line.strip():
                        self._dispatch(line, conn)
        except (ConnectionError, OSError):
            pass
        finally:
            self._drop(conn)

    def _read_line(self, conn: _Conn) -> str | None:
        buf = conn._rbuf
        while b"\n" not in buf:
            try:
                chunk = conn.sock.recv(4096)
            except OSError:
                return None
            if not chunk:
                return None
            buf += chunk
        line, rest = buf.split(b"\n", 1)
        conn._rbuf = rest
        try:
            return line.decode("utf-8")
        except UnicodeDecodeError:
            return line.decode("utf-8", errors="replace")

    def _ws_handshake(self, conn: _Conn) -> bool:
        key = None
        while True:
            line = self._read_line(conn)
            if line is None:
                return False
            line = line.rstrip("\r")
            if not line:
                break
            if ":" in line:
                name, value = line.split(":", 1)
                if name.strip().lower() == "sec-websocket-key":
                    key = value.strip()
        if key is None:
            return False
        response = (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {ws_accept_key(key)}\r\n"
            "\r\n"
        )
        conn.sock.sendall(response.encode("ascii"))
        return True

    def _drop(self, conn: _Conn) -> None:
        with self._conn_lock:
            self._conns.pop(conn.id, None)
        conn.close()

    # -- message dispatch -----------------------------------------------------

    def _dispatch(self, raw: str, conn: _Conn) -> None:
        tick = self.world.tick
        self.stats.messages += 1
        try:
            msg = protocol.decode(raw)
        except (BadMessage, Unsupported) as err:
            self.stats.errors += 1
            conn.send(protocol.encode(protocol.error_reply(_best_effort_seq(raw), tick, err.code, str(err))))
            return
        if msg.seq <= conn.last_seq:
            self.stats.errors += 1
            conn.send(
                protocol.encode(
                    protocol.error_reply(
                        msg.seq, tick, "bad_seq", f"seq must exceed {conn.last_seq}"
                    )
                )
            )
            return
        conn.last_seq = msg.seq
        if msg.type in protocol.WORLD_TYPES:
            self._inbox.put(("client", protocol.world_command(msg)))
        elif msg.type == "subscribe":
            conn.subscribed = True
        elif msg.type == "pause":
            with self._cond:
                self._paused = True
        elif msg.type == "resume":
            with self._cond:
                self._paused = False
                self._cond.notify_all()
        elif msg.type == "step":
            with self._cond:
                self._pending_steps += int(msg.body.get("n", 1))
                self._cond.notify_all()
        elif msg.type == "set_speed":
            self.tps = float(msg.body["tps"])
        conn.send(protocol.encode(protocol.ack(msg.seq, tick)))
        if msg.type == "subscribe":
            conn.send(self._snapshot_msg)


def _best_effort_seq(raw: str):
    try:
        doc = json.loads(raw)
        seq = doc.get("seq")
        if isinstance(seq, int) and not isinstance(seq, bool) and seq >= 0:
            return seq
    except Exception:
        pass
    return None


def serve(
    world: World,
    listen: tuple[str, int] = ("127.0.0.1", 8765),
    tps: float = 10.0,
    trace_path: str | None = None,
    provider: WeatherProvider | None = None,
) -> Gateway:
    """Start a gateway and return it; runs until .stop() is called."""
    gw = Gateway(world, listen[0], listen[1], tps=tps, trace_path=trace_path, provider=provider)
    gw.start()
    return gw
