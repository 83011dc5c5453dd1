"""Subscriber-side client: incoming envelopes become NRPN bytes and CV floats.

A Bridge connects to the relay, subscribes to one or more topics, and runs
each arriving message through an ordered list of RouteRules. A rule can emit
the message as a 12-byte NRPN group to a MIDI sink, as a normalized
control-voltage float on a text stream, or both. The CV mapping is a
power-law taper pinned to out_min at 0 and out_max at 16383 (defaults 0.0
and 0.9, exponent 2.0).
"""

from __future__ import annotations

import asyncio
import json
import logging
import sys
import time
from dataclasses import dataclass
from typing import IO, Optional, Sequence, Tuple

import websockets
from websockets.exceptions import ConnectionClosed, InvalidHandshake

from .midi14 import NrpnParam, check_value14, encode_nrpn, hex_dump
from .wire import WireError, WireMessage, from_payload, validate_topic

log = logging.getLogger("wiremidi.bridge")

BACKOFF_BASE = 0.5  # seconds, doubles per failed attempt
BACKOFF_CAP = 30.0

VALUE14_SPAN = 16383


@dataclass(frozen=True)
class CurveSpec:
    """Power-law value-to-CV taper; endpoints are hit exactly."""

    out_min: float = 0.0
    out_max: float = 0.9
    exponent: float = 2.0

    def __post_init__(self) -> None:
        if not self.out_min < self.out_max:
            raise ValueError(f"out_min must be < out_max, got {self.out_min}..{self.out_max}")
        if not self.exponent > 0:
            raise ValueError(f"exponent must be > 0, got {self.exponent}")


DEFAULT_CURVE = CurveSpec()


def map_to_cv(value: int, curve: CurveSpec = DEFAULT_CURVE) -> float:
    """Map a 14-bit value onto the curve: out_min + span * (value/16383)^exp.

    The endpoints return out_min and out_max exactly, whatever the exponent.
    """
    check_value14(value)
    if value == 0:
        return curve.out_min
    if value == VALUE14_SPAN:
        return curve.out_max
    t = (value / VALUE14_SPAN) ** curve.exponent
    return curve.out_min + (curve.out_max - curve.out_min) * t


class MidiSink:
    """Destination for encoded MIDI bytes.

    Each write() call carries one whole message group; implementations must
    not interleave groups from separate calls.
    """

    def write(self, data: bytes) -> None:
        raise NotImplementedError

    def reopen(self) -> None:
        """Try to recover after a write failure; default is a no-op."""

    def close(self) -> None:
        pass


class HexDumpSink(MidiSink):
    """Writes one uppercase hex line per message group, e.g. ``B0 63 26 ...``."""

    def __init__(self, stream: Optional[IO[str]] = None, path: Optional[str] = None):
        if stream is not None and path is not None:
            raise ValueError("pass either a stream or a path, not both")
        self._path = path
        self._stream = stream if stream is not None else (open(path, "a") if path else sys.stdout)

    def write(self, data: bytes) -> None:
        self._stream.write(hex_dump(data) + "\n")
        self._stream.flush()

    def reopen(self) -> None:
        if self._path is not None:
            try:
                self._stream.close()
            except OSError:
                pass
            self._stream = open(self._path, "a")

    def close(self) -> None:
        if self._path is not None:
            self._stream.close()


class RawFileSink(MidiSink):
    """Appends raw MIDI bytes to a file, one atomic write per message group."""

    def __init__(self, path: str):
        self._path = path
        self._file = open(path, "ab")

    def write(self, data: bytes) -> None:
        self._file.write(data)
        self._file.flush()

    def reopen(self) -> None:
        try:
            self._file.close()
        except OSError:
            pass
        self._file = open(self._path, "ab")

    def close(self) -> None:
        self._file.close()


class DevicePortSink(MidiSink):
    """Sends to a system MIDI output port via python-rtmidi (optional extra).

    Matches the first port whose name contains ``port_name``; if none exists,
    opens a virtual output port under that name where the backend allows it.
    """

    def __init__(self, port_name: str):
        try:
            import rtmidi
        except ImportError:
            raise RuntimeError(
                "python-rtmidi is not installed; port sinks need the [midiport] extra"
            ) from None
        self._out = rtmidi.MidiOut()
        names = self._out.get_ports()
        for index, name in enumerate(names):
            if port_name in name:
                self._out.open_port(index)
                break
        else:
            self._out.open_virtual_port(port_name)

    def write(self, data: bytes) -> None:
        if len(data) % 3:
            raise ValueError(f"expected whole 3-byte CC messages, got {len(data)} bytes")
        for i in range(0, len(data), 3):
            self._out.send_message(list(data[i : i + 3]))

    def close(self) -> None:
        self._out.close_port()


def open_sink(spec: str) -> MidiSink:
    """Build a sink from its CLI/config form: ``hex``, ``file:PATH`` or ``port:NAME``."""
    if spec == "hex":
        return HexDumpSink()
    if spec.startswith("file:"):
        return RawFileSink(spec[len("file:") :])
    if spec.startswith("port:"):
        return DevicePortSink(spec[len("port:") :])
    raise ValueError(f"unknown sink {spec!r}, expected hex, file:PATH or port:NAME")


@dataclass(frozen=True)
class RouteRule:
    """One routing entry; None in a match field means "any".

    ``param_override`` replaces the message's (msbx, msby) pair as the NRPN
    parameter number when emitting.
    """

    topic: Optional[str] = None
    channel: Optional[int] = None
    param: Optional[Tuple[int, int]] = None
    actions: Tuple[str, ...] = ("nrpn",)
    sink: Optional[MidiSink] = None
    curve: Optional[CurveSpec] = None
    param_override: Optional[Tuple[int, int]] = None

    def __post_init__(self) -> None:
        for action in self.actions:
            if action not in ("nrpn", "cv"):
                raise ValueError(f"unknown action {action!r}, expected 'nrpn' or 'cv'")

    def matches(self, msg: WireMessage) -> bool:
        if self.topic is not None and msg.event != self.topic:
            return False
        if self.channel is not None and msg.channel != self.channel:
            return False
        if self.param is not None and (msg.msbx, msg.msby) != self.param:
            return False
        return True


class RouteConfigError(ValueError):
    """Route configuration could not be loaded; message carries diagnostics."""


def _rule_from_obj(obj: object, where: str, default_sink: Optional[MidiSink]) -> RouteRule:
    if not isinstance(obj, dict):
        raise RouteConfigError(f"{where}: rule must be an object")
    known = {"match", "actions", "sink", "curve", "param_override"}
    for key in obj:
        if key not in known:
            raise RouteConfigError(f"{where}.{key}: unknown key")
    match = obj.get("match", {})
    if not isinstance(match, dict):
        raise RouteConfigError(f"{where}.match: must be an object")
    topic = match.get("topic")
    channel = match.get("channel")
    param = match.get("param")
    if topic is not None and not isinstance(topic, str):
        raise RouteConfigError(f"{where}.match.topic: must be a string")
    if channel is not None and (not isinstance(channel, int) or not 1 <= channel <= 16):
        raise RouteConfigError(f"{where}.match.channel: must be 1..16")
    if param is not None:
        if not (isinstance(param, list) and len(param) == 2 and all(isinstance(p, int) for p in param)):
            raise RouteConfigError(f"{where}.match.param: must be [msb, lsb]")
        param = (param[0], param[1])
    actions = obj.get("actions", ["nrpn"])
    if not isinstance(actions, list) or not actions:
        raise RouteConfigError(f"{where}.actions: must be a non-empty list")
    sink = default_sink
    if "sink" in obj:
        try:
            sink = open_sink(obj["sink"])
        except (ValueError, OSError, RuntimeError) as exc:
            raise RouteConfigError(f"{where}.sink: {exc}") from None
    curve = None
    if "curve" in obj:
        spec = obj["curve"]
        if not isinstance(spec, dict):
            raise RouteConfigError(f"{where}.curve: must be an object")
        try:
            curve = CurveSpec(
                out_min=float(spec.get("min", 0.0)),
                out_max=float(spec.get("max", 0.9)),
                exponent=float(spec.get("exp", 2.0)),
            )
        except (TypeError, ValueError) as exc:
            raise RouteConfigError(f"{where}.curve: {exc}") from None
    override = obj.get("param_override")
    if override is not None:
        if not (isinstance(override, list) and len(override) == 2 and all(isinstance(p, int) for p in override)):
            raise RouteConfigError(f"{where}.param_override: must be [msb, lsb]")
        override = (override[0], override[1])
    try:
        return RouteRule(
            topic=topic,
            channel=channel,
            param=param,
            actions=tuple(actions),
            sink=sink,
            curve=curve,
            param_override=override,
        )
    except ValueError as exc:
        raise RouteConfigError(f"{where}: {exc}") from None


def load_routes(path: str, default_sink: Optional[MidiSink] = None) -> list[RouteRule]:
    """Load RouteRules from a JSON config file; failures carry line/field info."""
    with open(path) as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RouteConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict) or "rules" not in obj:
        raise RouteConfigError(f"{path}: top level must be an object with a 'rules' list")
    rules = obj["rules"]
    if not isinstance(rules, list):
        raise RouteConfigError(f"{path}: 'rules' must be a list")
    return [
        _rule_from_obj(rule, f"{path}: rules[{i}]", default_sink)
        for i, rule in enumerate(rules)
    ]


class Bridge:
    """Turns relayed envelopes into sink writes and CV lines.

    The message path is strictly sequential per instance: receive, decode,
    route, write. All counters are plain attributes, safe to read at any
    point between messages.
    """

    def __init__(
        self,
        relay_url: str,
        topics: Sequence[str],
        rules: Optional[Sequence[RouteRule]] = None,
        *,
        default_sink: Optional[MidiSink] = None,
        cv_stream: Optional[IO[str]] = None,
        default_curve: CurveSpec = DEFAULT_CURVE,
    ):
        if not topics:
            raise ValueError("at least one topic is required")
        self._topics = [validate_topic(t, field="topic") for t in topics]
        self._url = relay_url
        self._rules = list(rules) if rules is not None else [RouteRule()]
        self._default_sink = default_sink
        self._cv_stream = cv_stream
        self._default_curve = default_curve
        self._t0 = time.monotonic()
        self._overlap_warned = False
        self.received = 0
        self.skipped = 0
        self.unmatched = 0
        self.nrpn_out = 0
        self.cv_out = 0
        self.sink_dropped = 0
        self.connects = 0

    # -- message path -------------------------------------------------------

    def on_frame(self, raw: str | bytes) -> None:
        """Handle one incoming WebSocket frame (data or relay control chatter)."""
        try:
            obj = json.loads(raw)
        except (ValueError, UnicodeDecodeError, RecursionError):
            self.skipped += 1
            return
        if isinstance(obj, dict) and "op" in obj:
            return  # welcome/pong and friends
        try:
            msg = from_payload(obj)
        except WireError as exc:
            self.skipped += 1
            log.debug("skipping invalid frame: %s", exc)
            return
        self.on_message(msg)

    def on_message(self, msg: WireMessage) -> None:
        """Route one validated message through the rule list."""
        self.received += 1
        rule = self._first_match(msg)
        if rule is None:
            self.unmatched += 1
            return
        if "nrpn" in rule.actions:
            self._emit_nrpn(rule, msg)
        if "cv" in rule.actions:
            self._emit_cv(rule, msg)

    def _first_match(self, msg: WireMessage) -> Optional[RouteRule]:
        for i, rule in enumerate(self._rules):
            if rule.matches(msg):
                if not self._overlap_warned and any(
                    later.matches(msg) for later in self._rules[i + 1 :]
                ):
                    self._overlap_warned = True
                    log.warning("multiple rules match %s; using the first", msg)
                return rule
        return None

    def _emit_nrpn(self, rule: RouteRule, msg: WireMessage) -> None:
        pair = rule.param_override if rule.param_override is not None else (msg.msbx, msg.msby)
        try:
            data = encode_nrpn(NrpnParam(*pair), msg.value14, msg.channel)
        except ValueError as exc:
            self.skipped += 1
            log.debug("cannot encode %s: %s", msg, exc)
            return
        sink = rule.sink if rule.sink is not None else self._default_sink
        if sink is None:
            sink = self._default_sink = HexDumpSink()
        self._write_sink(sink, data)

    def _write_sink(self, sink: MidiSink, data: bytes) -> None:
        for attempt in range(2):
            try:
                sink.write(data)
                self.nrpn_out += 1
                return
            except OSError as exc:
                log.warning("sink write failed (attempt %d): %s", attempt + 1, exc)
                try:
                    sink.reopen()
                except OSError:
                    pass
        self.sink_dropped += 1

    def _emit_cv(self, rule: RouteRule, msg: WireMessage) -> None:
        curve = rule.curve if rule.curve is not None else self._default_curve
        cv = map_to_cv(msg.value14, curve)
        ms = int((time.monotonic() - self._t0) * 1000)
        stream = self._cv_stream if self._cv_stream is not None else sys.stdout
        stream.write(f"{ms} {msg.event}/{msg.channel}/{msg.msbx}.{msg.msby} {cv:.6f}\n")
        stream.flush()
        self.cv_out += 1

    # -- connection loop ----------------------------------------------------

    def hello_frame(self) -> str:
        return json.dumps({"op": "hello", "mode": "sub", "topics": self._topics})

    async def run(self, stop: Optional[asyncio.Event] = None) -> None:
        """Connect, subscribe and dispatch until cancelled or ``stop`` is set.

        Reconnects after any connection loss with exponential backoff
        (base 0.5 s, doubling, capped at 30 s; reset on success).
        """
        attempt = 0
        while stop is None or not stop.is_set():
            try:
                async with websockets.connect(self._url, max_size=1 << 16) as ws:
                    await ws.send(self.hello_frame())
                    self.connects += 1
                    attempt = 0
                    async for raw in ws:
                        self.on_frame(raw)
                        if stop is not None and stop.is_set():
                            break
            except (OSError, ConnectionClosed, InvalidHandshake, asyncio.TimeoutError, EOFError) as exc:
                log.info("relay connection lost (%s), retrying", exc)
            if stop is not None and stop.is_set():
                return
            delay = min(BACKOFF_BASE * (2 ** attempt), BACKOFF_CAP)
            attempt += 1
            if stop is None:
                await asyncio.sleep(delay)
            else:
                try:
                    await asyncio.wait_for(stop.wait(), timeout=delay)
                except asyncio.TimeoutError:
                    pass
