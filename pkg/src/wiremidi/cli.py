"""Command line entry point: relay, bridge, send and monitor subcommands.

The whole pipeline runs from two terminals:

    wiremidi relay --bind 127.0.0.1:8765
    wiremidi bridge --relay ws://127.0.0.1:8765 --topic midiTransport-1 --sink hex

plus `wiremidi send` to publish single values or sweeps and
`wiremidi monitor` to watch traffic. Exit codes: 0 success, 1 runtime
failure, 2 usage error. The relay address can also come from the
WIREMIDI_RELAY environment variable.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import os
import sys
import time
from typing import List, Optional, Tuple

import websockets

from .bridge import Bridge, CurveSpec, RouteConfigError, RouteRule, load_routes, map_to_cv, open_sink
from .midi14 import VALUE14_MAX
from .relay import Relay, RelayConfig
from .wire import DEFAULT_TOPIC, WireError, build_message, encode_wire, from_payload

ENV_RELAY = "WIREMIDI_RELAY"
DEFAULT_RELAY = "ws://127.0.0.1:8765"


class UsageError(Exception):
    pass


def _relay_default() -> str:
    return os.environ.get(ENV_RELAY, DEFAULT_RELAY)


def parse_sweep(spec: str) -> Tuple[List[int], int]:
    """Parse ``start:end:step:interval-ms`` into (values, interval).

    The end value is always emitted, even when the step does not land on it,
    so a sweep reliably finishes on its target position.
    """
    parts = spec.split(":")
    if len(parts) != 4:
        raise UsageError(f"sweep must be start:end:step:interval-ms, got {spec!r}")
    try:
        start, end, step, interval = (int(p) for p in parts)
    except ValueError:
        raise UsageError(f"sweep fields must be integers, got {spec!r}") from None
    for name, value in (("start", start), ("end", end)):
        if not 0 <= value <= VALUE14_MAX:
            raise UsageError(f"sweep {name} out of range 0..16383: {value}")
    if step <= 0:
        raise UsageError(f"sweep step must be positive, got {step}")
    if interval < 0:
        raise UsageError(f"sweep interval must be >= 0, got {interval}")
    if start <= end:
        values = list(range(start, end + 1, step))
    else:
        values = list(range(start, end - 1, -step))
    if values[-1] != end:
        values.append(end)
    return values, interval


def parse_bind(spec: str) -> Tuple[str, int]:
    host, sep, port = spec.rpartition(":")
    if not sep or not port.isdigit():
        raise UsageError(f"bind address must be host:port, got {spec!r}")
    return host or "127.0.0.1", int(port)


def _hello(mode: str, topics: List[str]) -> str:
    return json.dumps({"op": "hello", "mode": mode, "topics": topics})


# -- subcommands --------------------------------------------------------------


def _cmd_relay(args) -> int:
    try:
        host, port = parse_bind(args.bind)
        config = RelayConfig(
            host=host,
            port=port,
            queue_cap=args.queue_cap,
            coalesce=args.coalesce,
            token=args.token,
            heartbeat_secs=args.heartbeat_secs,
            stats_port=args.stats_port,
        )
        asyncio.run(Relay(config).serve_forever())
    except OSError as exc:
        raise RuntimeError(f"cannot start relay: {exc}") from None
    return 0


def _cmd_bridge(args) -> int:
    try:
        sink = open_sink(args.sink)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    curve = CurveSpec(exponent=args.curve_exp)
    cv_stream = None
    if args.cv_out is not None:
        cv_stream = sys.stdout if args.cv_out == "-" else open(args.cv_out, "a")
    if args.config is not None:
        try:
            rules = load_routes(args.config, default_sink=sink)
        except RouteConfigError as exc:
            raise UsageError(str(exc)) from None
    else:
        actions = ["nrpn"] + (["cv"] if cv_stream is not None else [])
        rules = [RouteRule(actions=tuple(actions))]
    try:
        bridge = Bridge(
            args.relay,
            args.topic,
            rules,
            default_sink=sink,
            cv_stream=cv_stream,
            default_curve=curve,
        )
    except (ValueError, WireError) as exc:
        raise UsageError(str(exc)) from None
    asyncio.run(bridge.run())
    return 0


def _cmd_send(args) -> int:
    if (args.value is None) == (args.sweep is None):
        raise UsageError("exactly one of --value or --sweep is required")
    if args.sweep is not None:
        values, interval = parse_sweep(args.sweep)
    else:
        values, interval = [args.value], 0
    try:
        frames = [
            encode_wire(build_message(args.x, args.y, v, args.channel, args.topic))
            for v in values
        ]
    except WireError as exc:
        raise UsageError(str(exc)) from None

    async def publish() -> None:
        async with websockets.connect(args.relay) as ws:
            await ws.send(_hello("pub", [args.topic]))
            for frame in frames:
                await ws.send(frame)
                if args.verbose:
                    print(frame)
                if interval:
                    await asyncio.sleep(interval / 1000)

    asyncio.run(publish())
    return 0


def _cmd_monitor(args) -> int:
    topics = args.topic or [DEFAULT_TOPIC]

    async def watch() -> None:
        skipped = 0
        t0 = time.monotonic()
        try:
            async with websockets.connect(args.relay) as ws:
                await ws.send(_hello("sub", topics))
                async for raw in ws:
                    try:
                        obj = json.loads(raw)
                    except (ValueError, UnicodeDecodeError):
                        skipped += 1
                        continue
                    if isinstance(obj, dict) and "op" in obj:
                        continue
                    try:
                        msg = from_payload(obj)
                    except WireError:
                        skipped += 1
                        continue
                    value = msg.value14
                    ms = int((time.monotonic() - t0) * 1000)
                    print(
                        f"{ms} {msg.event} ch={msg.channel} param={msg.msbx}.{msg.msby} "
                        f"value={value} cv={map_to_cv(value):.6f}",
                        flush=True,
                    )
        finally:
            if skipped:
                print(f"skipped {skipped} malformed frame(s)", file=sys.stderr)

    asyncio.run(watch())
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wiremidi",
        description="14-bit MIDI over WebSockets: relay, bridge, test publisher, monitor.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("relay", help="run the pub/sub relay server")
    p.add_argument("--bind", default="127.0.0.1:8765", help="host:port to listen on")
    p.add_argument("--coalesce", action="store_true", help="latest-value coalescing by default")
    p.add_argument("--queue-cap", type=int, default=256, help="per-subscriber queue capacity")
    p.add_argument("--token", default=None, help="require this token in client hellos")
    p.add_argument("--heartbeat-secs", type=float, default=20.0, help="ping interval")
    p.add_argument("--stats-port", type=int, default=None, help="HTTP port for GET /stats")
    p.set_defaults(func=_cmd_relay)

    p = sub.add_parser("bridge", help="subscribe and emit NRPN bytes / CV floats")
    p.add_argument("--relay", default=_relay_default(), help="relay WebSocket URL")
    p.add_argument("--topic", action="append", default=None, help="topic to subscribe (repeatable)")
    p.add_argument("--config", default=None, help="route rules JSON file")
    p.add_argument("--sink", default="hex", help="hex | file:PATH | port:NAME")
    p.add_argument("--curve-exp", type=float, default=2.0, help="CV curve exponent")
    p.add_argument("--cv-out", default=None, help="CV stream file path, or - for stdout")
    p.set_defaults(func=_cmd_bridge)

    p = sub.add_parser("send", help="publish one value or a sweep")
    p.add_argument("--relay", default=_relay_default(), help="relay WebSocket URL")
    p.add_argument("--topic", default=DEFAULT_TOPIC, help="topic to publish on")
    p.add_argument("--x", type=int, default=38, help="first CC/param number (msbx)")
    p.add_argument("--y", type=int, default=6, help="second CC/param number (msby)")
    p.add_argument("--channel", type=int, default=1, help="MIDI channel 1..16")
    p.add_argument("--value", type=int, default=None, help="14-bit value to send once")
    p.add_argument("--sweep", default=None, help="start:end:step:interval-ms")
    p.add_argument("--verbose", action="store_true", help="print each encoded frame")
    p.set_defaults(func=_cmd_send)

    p = sub.add_parser("monitor", help="subscribe and print one line per message")
    p.add_argument("--relay", default=_relay_default(), help="relay WebSocket URL")
    p.add_argument("--topic", action="append", default=None, help="topic to watch (repeatable)")
    p.set_defaults(func=_cmd_monitor)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")
    args = build_parser().parse_args(argv)
    if getattr(args, "topic", None) is None and args.command == "bridge":
        args.topic = [DEFAULT_TOPIC]
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 0
    except Exception as exc:  # connection refused, handshake failures, ...
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
