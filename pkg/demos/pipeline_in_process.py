"""The full pipeline in one process: publisher -> relay -> bridge -> MIDI + CV.

Run with: python demos/pipeline_in_process.py

The same wiring works across machines with the CLI:

    terminal 1:  wiremidi relay --bind 0.0.0.0:8765
    terminal 2:  wiremidi bridge --relay ws://HOST:8765 --sink hex --cv-out -
    terminal 3:  wiremidi send --relay ws://HOST:8765 --sweep 0:16383:2048:5
"""

import asyncio
import io
import json

import websockets

from wiremidi import Bridge, HexDumpSink, NrpnReceiver, RouteRule, parse_hex_dump
from wiremidi.relay import Relay, RelayConfig
from wiremidi.wire import build_message, encode_wire


async def main():
    # a relay on an ephemeral port, a bridge subscribed to the default topic
    relay = Relay(RelayConfig(port=0))
    await relay.start()
    sink_capture = io.StringIO()
    cv_capture = io.StringIO()
    bridge = Bridge(
        relay.url,
        ["midiTransport-1"],
        rules=[RouteRule(actions=("nrpn", "cv"))],
        default_sink=HexDumpSink(stream=sink_capture),
        cv_stream=cv_capture,
    )
    bridge_task = asyncio.create_task(bridge.run())

    while relay.stats()["subscribers"].get("midiTransport-1") != 1:
        await asyncio.sleep(0.01)

    # a quick slider gesture: eight positions from silence to full
    values = [0, 300, 2048, 4096, 8191, 12288, 16000, 16383]
    async with websockets.connect(relay.url) as ws:
        await ws.send(json.dumps({"op": "hello", "mode": "pub", "topics": []}))
        for value in values:
            await ws.send(encode_wire(build_message(38, 6, value, 1)))

    while bridge.nrpn_out < len(values):
        await asyncio.sleep(0.01)

    print("hex sink received:")
    for line in sink_capture.getvalue().splitlines():
        print(f"  {line}")

    print("\nCV stream:")
    for line in cv_capture.getvalue().splitlines():
        print(f"  {line}")

    decoded = NrpnReceiver().feed_bytes(parse_hex_dump(sink_capture.getvalue()))
    arrived = [e.value for e in decoded if e.complete]
    print(f"\ndecoded values: {arrived}")
    assert arrived == values, "transcript must match what was sent"
    print("transcript matches the published gesture")

    bridge_task.cancel()
    await asyncio.gather(bridge_task, return_exceptions=True)
    await relay.stop()
    print(f"\nrelay counters at shutdown: {relay.stats()}")


if __name__ == "__main__":
    asyncio.run(main())
