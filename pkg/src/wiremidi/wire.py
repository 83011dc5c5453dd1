"""The JSON envelope that carries split 14-bit values over a WebSocket.

One control update is one single-line JSON text frame:

    {"event":"midiTransport-1","data":{"msbx":38,"msby":6,"lsbx":2,"lsby":44,"channel":1}}

``msbx``/``msby`` are the two CC/parameter numbers and ``lsbx``/``lsby`` hold
the value's MSB and LSB halves; the field names are kept verbatim for wire
compatibility even though the value MSB rides in ``lsbx``. The ``event``
string doubles as the relay routing topic. Unknown extra keys (including the
reserved ``"v"``) are ignored on decode for forward compatibility.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .midi14 import combine14, split14

DEFAULT_TOPIC = "midiTransport-1"

TOPIC_MAX_LEN = 64
_TOPIC_RE = re.compile(r"^[A-Za-z0-9_-]+$")


class WireError(ValueError):
    """Base for anything wrong with an incoming or outgoing envelope."""


class WireParseError(WireError):
    """The text was not valid JSON at all."""


class WireValidationError(WireError):
    """The JSON was readable but violates the schema; names the field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def validate_topic(name: object, field: str = "event") -> str:
    """Check a topic / event name: 1..64 chars of [A-Za-z0-9_-]."""
    if not isinstance(name, str):
        raise WireValidationError(field, f"must be a string, got {name!r}")
    if not name:
        raise WireValidationError(field, "must not be empty")
    if len(name) > TOPIC_MAX_LEN:
        raise WireValidationError(field, f"longer than {TOPIC_MAX_LEN} chars")
    if not _TOPIC_RE.match(name):
        raise WireValidationError(field, f"invalid characters in {name!r}")
    return name


def _check_range(field: str, value: object, lo: int, hi: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise WireValidationError(field, f"must be an integer, got {value!r}")
    if not lo <= value <= hi:
        raise WireValidationError(field, f"out of range {lo}..{hi}: {value}")
    return value


@dataclass(frozen=True)
class WireMessage:
    """A validated envelope: routing topic, two param numbers, split value, channel."""

    event: str
    msbx: int
    msby: int
    lsbx: int
    lsby: int
    channel: int

    def __post_init__(self) -> None:
        validate_topic(self.event)
        _check_range("msbx", self.msbx, 0, 127)
        _check_range("msby", self.msby, 0, 127)
        _check_range("lsbx", self.lsbx, 0, 127)
        _check_range("lsby", self.lsby, 0, 127)
        _check_range("channel", self.channel, 1, 16)

    @property
    def value14(self) -> int:
        """The recombined 14-bit value (lsbx is the MSB half on the wire)."""
        return combine14(self.lsbx, self.lsby)


def build_message(
    x: int,
    y: int,
    value: int,
    channel: int,
    event: str = DEFAULT_TOPIC,
) -> WireMessage:
    """Package a 14-bit value for transport.

    ``x`` and ``y`` land in msbx/msby as the CC/parameter pair; ``value`` is
    split so its MSB half lands in lsbx and its LSB half in lsby.
    """
    _check_range("x", x, 0, 127)
    _check_range("y", y, 0, 127)
    _check_range("value", value, 0, 16383)
    _check_range("channel", channel, 1, 16)
    msb, lsb = split14(value)
    return WireMessage(event=event, msbx=x, msby=y, lsbx=msb, lsby=lsb, channel=channel)


def encode_wire(msg: WireMessage) -> str:
    """Encode to the single-line envelope with fixed key order, ASCII only."""
    return json.dumps(
        {
            "event": msg.event,
            "data": {
                "msbx": msg.msbx,
                "msby": msg.msby,
                "lsbx": msg.lsbx,
                "lsby": msg.lsby,
                "channel": msg.channel,
            },
        },
        separators=(",", ":"),
    )


def from_payload(obj: object) -> WireMessage:
    """Validate an already-parsed JSON value into a WireMessage."""
    if not isinstance(obj, dict):
        raise WireValidationError("message", "envelope must be a JSON object")
    if "event" not in obj:
        raise WireValidationError("event", "missing")
    if "data" not in obj:
        raise WireValidationError("data", "missing")
    data = obj["data"]
    if not isinstance(data, dict):
        raise WireValidationError("data", "must be a JSON object")
    fields = {}
    for name in ("msbx", "msby", "lsbx", "lsby", "channel"):
        if name not in data:
            raise WireValidationError(name, "missing")
        fields[name] = data[name]
    return WireMessage(event=validate_topic(obj["event"]), **fields)


def decode_wire(text: str | bytes) -> WireMessage:
    """Parse and validate an envelope.

    Raises WireParseError for anything that is not JSON and
    WireValidationError (naming the field) for schema violations. Never
    raises anything else, whatever the input bytes.
    """
    try:
        obj = json.loads(text)
    except (ValueError, UnicodeDecodeError, RecursionError) as exc:
        raise WireParseError(f"not valid JSON: {exc}") from None
    return from_payload(obj)
