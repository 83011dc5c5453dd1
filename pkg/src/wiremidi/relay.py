"""WebSocket pub/sub relay: topic fan-out for wire envelopes.

Clients open a WebSocket and introduce themselves with a hello control
frame, e.g. ``{"op":"hello","mode":"sub","topics":["midiTransport-1"]}``.
Publishers then send wire envelopes as text frames; every envelope is
validated and fanned out, in per-publisher order, to the bounded queue of
every subscriber of its ``event`` topic. On overflow the oldest queued
frame is dropped (the newest control position is the one that matters).
With coalescing enabled a queue holds at most one pending frame per control
key (topic, msbx, msby, channel); a newer value replaces a stale queued one
and moves to the back of the line, so delivery order still follows send
order.

The relay answers a valid hello with ``{"op":"welcome"}`` so clients can
tell when their subscription is live, and answers ``{"op":"ping"}`` with
``{"op":"pong"}`` as an application-level keepalive next to the protocol
pings it sends on its own.
"""

from __future__ import annotations

import asyncio
import json
import logging
import signal
import sys
import threading
from collections import OrderedDict, deque
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Dict, Optional, Set

from websockets.asyncio.server import serve
from websockets.exceptions import ConnectionClosed

from .wire import WireError, from_payload, validate_topic

log = logging.getLogger("wiremidi.relay")

MAX_FRAME_BYTES = 1 << 16
HELLO_TIMEOUT = 10.0


@dataclass
class RelayConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    queue_cap: int = 256
    coalesce: bool = False          # default for clients that do not say
    token: Optional[str] = None     # require this in hellos when set
    heartbeat_secs: float = 20.0    # protocol ping interval; 2 misses = close
    stats_port: Optional[int] = None
    write_limit: Optional[int] = None  # outgoing buffer high-water mark, for tests


class _HelloError(Exception):
    pass


class _OutQueue:
    """Bounded per-session buffer, drop-oldest, optionally coalescing.

    Control frames (welcome, pong) ride a separate priority lane that is
    never dropped or coalesced and does not show up in the relay counters.
    """

    def __init__(self, capacity: int, coalesce: bool, relay: "Relay"):
        self._cap = capacity
        self._coalesce = coalesce
        self._relay = relay
        self._control: deque = deque()
        self._fifo: deque = deque()
        self._keyed: "OrderedDict[tuple, str]" = OrderedDict()
        self._ready = asyncio.Event()

    def __len__(self) -> int:
        data = len(self._keyed) if self._coalesce else len(self._fifo)
        return len(self._control) + data

    def push_control(self, raw: str) -> None:
        self._control.append(raw)
        self._ready.set()

    def push(self, key: tuple, raw: str) -> None:
        if self._coalesce:
            if key in self._keyed:
                del self._keyed[key]  # re-insert at the tail, in send order
                self._relay._elided += 1
            elif len(self._keyed) >= self._cap:
                self._keyed.popitem(last=False)
                self._relay._dropped += 1
            self._keyed[key] = raw
        else:
            if len(self._fifo) >= self._cap:
                self._fifo.popleft()
                self._relay._dropped += 1
            self._fifo.append(raw)
        self._ready.set()

    async def pop(self) -> tuple:
        """Return (frame, is_data), control frames first."""
        while not len(self):
            self._ready.clear()
            await self._ready.wait()
        if self._control:
            return self._control.popleft(), False
        if self._coalesce:
            _, raw = self._keyed.popitem(last=False)
        else:
            raw = self._fifo.popleft()
        return raw, True


class _Session:
    def __init__(self, ws, mode: str, topics: list, queue: _OutQueue):
        self.ws = ws
        self.mode = mode
        self.topics = topics
        self.queue = queue
        self.writer: Optional[asyncio.Task] = None

    @property
    def can_publish(self) -> bool:
        return self.mode in ("pub", "both")

    @property
    def is_subscriber(self) -> bool:
        return self.mode in ("sub", "both")

    async def send(self, raw: str) -> None:
        await self.ws.send(raw)


class Relay:
    """The pub/sub server. start()/stop() for embedding, serve_forever() for the CLI."""

    def __init__(self, config: Optional[RelayConfig] = None):
        self._cfg = config or RelayConfig()
        self._server = None
        self._stats_httpd: Optional[ThreadingHTTPServer] = None
        self._loop: Optional[asyncio.AbstractEventLoop] = None
        self._sessions: Set[_Session] = set()
        self._topics: Dict[str, Set[_Session]] = {}
        self._received = 0
        self._routed = 0
        self._dropped = 0
        self._elided = 0
        self._invalid = 0

    @property
    def port(self) -> int:
        """The bound port (useful when configured with port 0)."""
        if self._server is None:
            raise RuntimeError("relay is not running")
        return self._server.sockets[0].getsockname()[1]

    @property
    def url(self) -> str:
        return f"ws://{self._cfg.host}:{self.port}"

    async def start(self) -> None:
        cfg = self._cfg
        kwargs = {}
        if cfg.write_limit is not None:
            kwargs["write_limit"] = cfg.write_limit
        self._loop = asyncio.get_running_loop()
        self._server = await serve(
            self._handler,
            cfg.host,
            cfg.port,
            ping_interval=cfg.heartbeat_secs,
            ping_timeout=2 * cfg.heartbeat_secs,  # two missed pongs
            max_size=MAX_FRAME_BYTES,
            **kwargs,
        )
        if cfg.stats_port is not None:
            self._start_stats_server()
        log.info("relay listening on ws://%s:%d", cfg.host, self.port)

    async def stop(self) -> None:
        if self._stats_httpd is not None:
            self._stats_httpd.shutdown()
            self._stats_httpd = None
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None

    async def serve_forever(self) -> None:
        """Run until SIGINT/SIGTERM; SIGUSR1 dumps counters to stderr."""
        await self.start()
        stop = asyncio.Event()
        loop = asyncio.get_running_loop()
        for signame in ("SIGINT", "SIGTERM"):
            try:
                loop.add_signal_handler(getattr(signal, signame), stop.set)
            except (NotImplementedError, AttributeError):
                pass
        if hasattr(signal, "SIGUSR1"):
            try:
                loop.add_signal_handler(
                    signal.SIGUSR1, lambda: print(self.stats_text(), file=sys.stderr)
                )
            except NotImplementedError:
                pass
        try:
            await stop.wait()
        finally:
            await self.stop()

    # -- stats ---------------------------------------------------------------

    def stats(self) -> dict:
        """Snapshot of the relay counters."""
        return {
            "connections": len(self._sessions),
            "received": self._received,
            "routed": self._routed,
            "dropped": self._dropped,
            "coalesce_elided": self._elided,
            "invalid": self._invalid,
            "subscribers": {t: len(s) for t, s in self._topics.items() if s},
        }

    def stats_text(self) -> str:
        snap = self.stats()
        subscribers = snap.pop("subscribers")
        lines = [f"{name} {value}" for name, value in snap.items()]
        lines += [f"subscribers.{topic} {count}" for topic, count in sorted(subscribers.items())]
        return "\n".join(lines)

    def _start_stats_server(self) -> None:
        relay = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                if self.path != "/stats":
                    self.send_error(404)
                    return
                future = asyncio.run_coroutine_threadsafe(relay._stats_async(), relay._loop)
                body = json.dumps(future.result(timeout=5)).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, _format, *_args):
                pass

        self._stats_httpd = ThreadingHTTPServer((self._cfg.host, self._cfg.stats_port), Handler)
        threading.Thread(target=self._stats_httpd.serve_forever, daemon=True).start()

    async def _stats_async(self) -> dict:
        return self.stats()

    # -- connection handling ---------------------------------------------------

    async def _handler(self, ws) -> None:
        try:
            raw = await asyncio.wait_for(ws.recv(), HELLO_TIMEOUT)
        except (asyncio.TimeoutError, ConnectionClosed):
            return
        try:
            session = self._open_session(ws, raw)
        except _HelloError as exc:
            log.info("rejecting client: %s", exc)
            await ws.close(code=1008, reason=str(exc)[:120])
            return
        # The reader must never block on a send: all outgoing traffic goes
        # through the session queue, drained by the writer task. A peer that
        # publishes a burst and closes straight away still gets every frame
        # routed before the connection winds down.
        try:
            session.queue.push_control('{"op":"welcome"}')
            async for frame in ws:
                self._on_frame(session, frame)
        except ConnectionClosed:
            pass
        finally:
            await self._close_session(session)

    def _open_session(self, ws, raw) -> _Session:
        if isinstance(raw, (bytes, bytearray)):
            raise _HelloError("hello must be a text frame")
        try:
            obj = json.loads(raw)
        except ValueError:
            raise _HelloError("hello is not valid JSON") from None
        if not isinstance(obj, dict) or obj.get("op") != "hello":
            raise _HelloError('first frame must be {"op":"hello",...}')
        mode = obj.get("mode")
        if mode not in ("pub", "sub", "both"):
            raise _HelloError("mode must be pub, sub or both")
        topics_raw = obj.get("topics", [])
        if not isinstance(topics_raw, list):
            raise _HelloError("topics must be a list")
        try:
            topics = [validate_topic(t, field="topics") for t in topics_raw]
        except WireError as exc:
            raise _HelloError(str(exc)) from None
        coalesce = obj.get("coalesce", self._cfg.coalesce)
        if not isinstance(coalesce, bool):
            raise _HelloError("coalesce must be a boolean")
        if self._cfg.token is not None and obj.get("token") != self._cfg.token:
            raise _HelloError("bad or missing token")

        queue = _OutQueue(self._cfg.queue_cap, coalesce, self)
        session = _Session(ws, mode, topics, queue)
        if session.is_subscriber:
            for topic in topics:
                self._topics.setdefault(topic, set()).add(session)
        session.writer = asyncio.create_task(self._drain(session))
        self._sessions.add(session)
        return session

    async def _close_session(self, session: _Session) -> None:
        self._sessions.discard(session)
        for topic in session.topics:
            subs = self._topics.get(topic)
            if subs is not None:
                subs.discard(session)
                if not subs:
                    del self._topics[topic]
        if session.writer is not None:
            session.writer.cancel()
            try:
                await session.writer
            except (asyncio.CancelledError, ConnectionClosed):
                pass

    async def _drain(self, session: _Session) -> None:
        try:
            while True:
                raw, is_data = await session.queue.pop()
                await session.send(raw)
                if is_data:
                    self._routed += 1
        except ConnectionClosed:
            pass

    def _on_frame(self, session: _Session, raw) -> None:
        if isinstance(raw, (bytes, bytearray)):
            self._invalid += 1
            return
        try:
            obj = json.loads(raw)
        except (ValueError, RecursionError):
            self._invalid += 1
            return
        if isinstance(obj, dict) and "op" in obj:
            if obj["op"] == "ping":
                session.queue.push_control('{"op":"pong"}')
            return  # pong and unknown ops are ignored
        if not session.can_publish:
            self._invalid += 1
            return
        try:
            msg = from_payload(obj)
        except WireError as exc:
            self._invalid += 1
            log.debug("dropping invalid frame: %s", exc)
            return
        self._received += 1
        subs = self._topics.get(msg.event)
        if not subs:
            return
        key = (msg.event, msg.msbx, msg.msby, msg.channel)
        for sub in subs:
            sub.queue.push(key, raw)
