"""14-bit MIDI over WebSockets.

Control values in 0..16383 are split into MSB/LSB 7-bit halves, shipped as
single-line JSON envelopes through a topic-based WebSocket relay, and turned
back into NRPN MIDI byte streams or normalized control-voltage floats on the
receiving side.
"""

from .bridge import (
    Bridge,
    CurveSpec,
    DEFAULT_CURVE,
    DevicePortSink,
    HexDumpSink,
    MidiSink,
    RawFileSink,
    RouteConfigError,
    RouteRule,
    load_routes,
    map_to_cv,
    open_sink,
)
from .midi14 import (
    ControlChange,
    NrpnEvent,
    NrpnParam,
    NrpnReceiver,
    SplitBytes,
    combine14,
    encode_cc,
    encode_nrpn,
    hex_dump,
    parse_hex_dump,
    split14,
)
from .relay import Relay, RelayConfig
from .wire import (
    DEFAULT_TOPIC,
    WireError,
    WireMessage,
    WireParseError,
    WireValidationError,
    build_message,
    decode_wire,
    encode_wire,
    from_payload,
    validate_topic,
)

__version__ = "0.1.0"

__all__ = [
    "Bridge",
    "ControlChange",
    "CurveSpec",
    "DEFAULT_CURVE",
    "DEFAULT_TOPIC",
    "DevicePortSink",
    "HexDumpSink",
    "MidiSink",
    "NrpnEvent",
    "NrpnParam",
    "NrpnReceiver",
    "RawFileSink",
    "Relay",
    "RelayConfig",
    "RouteConfigError",
    "RouteRule",
    "SplitBytes",
    "WireError",
    "WireMessage",
    "WireParseError",
    "WireValidationError",
    "build_message",
    "combine14",
    "decode_wire",
    "encode_cc",
    "encode_nrpn",
    "encode_wire",
    "from_payload",
    "hex_dump",
    "load_routes",
    "map_to_cv",
    "open_sink",
    "parse_hex_dump",
    "split14",
    "validate_topic",
]
