"""14-bit MIDI control values and their Control Change / NRPN byte forms.

A 14-bit control value (0..16383) travels as two 7-bit halves. A plain CC
carries one 7-bit value in a 3-byte message; an NRPN update spends four CCs
on it (parameter select via CC99/CC98, then data entry via CC6/CC38), 12
bytes without running status. This module is the pure codec layer: value
splitting/combining, byte-exact encoders, and a streaming receiver that
turns raw MIDI bytes back into 14-bit parameter updates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, NamedTuple

VALUE14_MAX = 16383  # largest value expressible in two 7-bit bytes
DATA_MAX = 127       # largest single MIDI data byte

CC_STATUS = 0xB0  # Control Change status; low nibble is channel - 1

# NRPN controller numbers, MIDI 1.0 convention: CC6 carries the data-entry
# MSB and CC38 the LSB (98/99 select the parameter, LSB/MSB respectively).
CC_NRPN_PARAM_MSB = 99  # 0x63
CC_NRPN_PARAM_LSB = 98  # 0x62
CC_DATA_MSB = 6         # 0x06
CC_DATA_LSB = 38        # 0x26

# Parameter number (127, 127) is the reserved "deselect" value. Receivers
# power up with it selected and must emit nothing while it is current.
NULL_PARAM_MSB = 127
NULL_PARAM_LSB = 127


def _check_7bit(name: str, value: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if not 0 <= value <= DATA_MAX:
        raise ValueError(f"{name} out of range 0..127: {value}")
    return value


def check_value14(value: int) -> int:
    """Validate a 14-bit control value, returning it unchanged."""
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValueError(f"value must be an integer, got {value!r}")
    if not 0 <= value <= VALUE14_MAX:
        raise ValueError(f"value out of range 0..16383: {value}")
    return value


def check_channel(channel: int) -> int:
    """Validate a 1-based MIDI channel number, returning it unchanged."""
    if not isinstance(channel, int) or isinstance(channel, bool):
        raise ValueError(f"channel must be an integer, got {channel!r}")
    if not 1 <= channel <= 16:
        raise ValueError(f"channel out of range 1..16: {channel}")
    return channel


class SplitBytes(NamedTuple):
    """The two 7-bit halves of a 14-bit value."""

    msb: int
    lsb: int


def split14(value: int) -> SplitBytes:
    """Split a 14-bit value into (msb, lsb) so that msb * 128 + lsb == value."""
    check_value14(value)
    return SplitBytes(value >> 7, value & 0x7F)


def combine14(msb: int, lsb: int) -> int:
    """Recombine two 7-bit halves into the original 14-bit value.

    Rejects inputs >= 128: a high bit set in a data byte means the stream
    handed us a status byte or corrupted data.
    """
    _check_7bit("msb", msb)
    _check_7bit("lsb", lsb)
    return (msb << 7) | lsb


@dataclass(frozen=True)
class ControlChange:
    """One Control Change message: channel 1..16, controller and value 0..127."""

    channel: int
    controller: int
    value: int

    def __post_init__(self) -> None:
        check_channel(self.channel)
        _check_7bit("controller", self.controller)
        _check_7bit("value", self.value)


@dataclass(frozen=True)
class NrpnParam:
    """An NRPN parameter number as its (msb, lsb) select pair."""

    msb: int
    lsb: int

    def __post_init__(self) -> None:
        _check_7bit("param msb", self.msb)
        _check_7bit("param lsb", self.lsb)

    @property
    def is_null(self) -> bool:
        return self.msb == NULL_PARAM_MSB and self.lsb == NULL_PARAM_LSB


@dataclass(frozen=True)
class NrpnEvent:
    """A decoded 14-bit parameter update.

    ``complete`` is False when only the data MSB has arrived so far (value is
    then msb * 128 with the LSB taken as 0) and True once the LSB followed.
    """

    channel: int
    param: NrpnParam
    value: int
    complete: bool


def encode_cc(cc: ControlChange) -> bytes:
    """Serialize a ControlChange to its canonical 3 bytes, no running status."""
    return bytes((CC_STATUS | (cc.channel - 1), cc.controller, cc.value))


def encode_nrpn(param: NrpnParam, value: int, channel: int) -> bytes:
    """Serialize one full NRPN update as four CCs (12 bytes).

    Order is parameter select before data entry: CC99, CC98, CC6, CC38.
    The null parameter (127, 127) is reserved for deselection and refused.
    """
    if param.is_null:
        raise ValueError("cannot send to the null NRPN parameter (127, 127)")
    msb, lsb = split14(value)
    check_channel(channel)
    return b"".join(
        encode_cc(ControlChange(channel, controller, data))
        for controller, data in (
            (CC_NRPN_PARAM_MSB, param.msb),
            (CC_NRPN_PARAM_LSB, param.lsb),
            (CC_DATA_MSB, msb),
            (CC_DATA_LSB, lsb),
        )
    )


class _ChannelState:
    """Per-channel NRPN registers: selected parameter plus pending data MSB."""

    __slots__ = ("param_msb", "param_lsb", "data_msb")

    def __init__(self) -> None:
        # Power-on state is the null parameter with no data byte pending.
        self.param_msb = NULL_PARAM_MSB
        self.param_lsb = NULL_PARAM_LSB
        self.data_msb: int | None = None


class NrpnReceiver:
    """Streaming NRPN parser over raw MIDI bytes.

    Feed it one byte at a time (or chunks via :meth:`feed_bytes`); it yields
    :class:`NrpnEvent` updates as they complete. Running status is accepted.
    Channels are tracked independently, so interleaved streams on different
    channels do not disturb each other. Non-CC channel messages are consumed
    silently; system-realtime bytes are ignored and system-common bytes clear
    running status, per the usual stream rules.

    Data bytes arriving with no status in effect are discarded until the next
    status byte and counted in :attr:`sync_losses`.

    Single-owner contract: one stream, one receiver; not safe for concurrent
    feeds.
    """

    def __init__(self) -> None:
        self.sync_losses = 0
        self._status: int | None = None
        self._needed = 0
        self._data: List[int] = []
        self._channels = [_ChannelState() for _ in range(16)]

    def feed(self, byte: int) -> List[NrpnEvent]:
        """Consume one byte, returning any events it completed."""
        out: List[NrpnEvent] = []
        self._feed_into(byte, out)
        return out

    def feed_bytes(self, data: Iterable[int]) -> List[NrpnEvent]:
        """Consume a chunk of bytes, returning all events in stream order."""
        out: List[NrpnEvent] = []
        feed = self._feed_into
        for byte in data:
            feed(byte, out)
        return out

    def _feed_into(self, byte: int, out: List[NrpnEvent]) -> None:
        if not 0 <= byte <= 0xFF:
            raise ValueError(f"not a byte: {byte!r}")
        if byte >= 0xF8:
            return  # realtime, may appear anywhere; never disturbs state
        if byte >= 0xF0:
            # System common terminates running status. SysEx payloads then
            # arrive as status-less data bytes and are discarded below.
            self._status = None
            self._data.clear()
            return
        if byte >= 0x80:
            self._status = byte
            self._needed = 1 if 0xC0 <= byte <= 0xDF else 2
            self._data.clear()
            return
        if self._status is None:
            self.sync_losses += 1
            return
        self._data.append(byte)
        if len(self._data) < self._needed:
            return
        data = self._data
        if self._status & 0xF0 == CC_STATUS:
            self._on_cc(self._status & 0x0F, data[0], data[1], out)
        data.clear()  # running status stays in effect for the next message

    def _on_cc(self, chan0: int, controller: int, value: int, out: List[NrpnEvent]) -> None:
        state = self._channels[chan0]
        if controller == CC_NRPN_PARAM_MSB:
            state.param_msb = value
            state.data_msb = None
        elif controller == CC_NRPN_PARAM_LSB:
            state.param_lsb = value
            state.data_msb = None
        elif controller == CC_DATA_MSB:
            if state.param_msb == NULL_PARAM_MSB and state.param_lsb == NULL_PARAM_LSB:
                return  # no parameter selected
            state.data_msb = value
            out.append(
                NrpnEvent(
                    channel=chan0 + 1,
                    param=NrpnParam(state.param_msb, state.param_lsb),
                    value=value << 7,
                    complete=False,
                )
            )
        elif controller == CC_DATA_LSB:
            if state.param_msb == NULL_PARAM_MSB and state.param_lsb == NULL_PARAM_LSB:
                return
            if state.data_msb is None:
                return  # LSB with no coarse value to attach to
            out.append(
                NrpnEvent(
                    channel=chan0 + 1,
                    param=NrpnParam(state.param_msb, state.param_lsb),
                    value=(state.data_msb << 7) | value,
                    complete=True,
                )
            )
        # other controllers (RPN selects, increment/decrement, ...) pass through


def hex_dump(data: bytes) -> str:
    """Render bytes as uppercase space-separated hex, e.g. ``B0 63 26``."""
    return " ".join(f"{b:02X}" for b in data)


def parse_hex_dump(text: str) -> bytes:
    """Inverse of :func:`hex_dump`; accepts any whitespace between bytes."""
    return bytes(int(tok, 16) for tok in text.split())
