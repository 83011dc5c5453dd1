import pytest
from hypothesis import given
import hypothesis.strategies as st

from wiremidi.midi14 import (
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

value14s = st.integers(0, 16383)
data7 = st.integers(0, 127)
channels = st.integers(1, 16)
params = st.tuples(data7, data7).filter(lambda p: p != (127, 127))

# Independent oracle: CC status byte per channel, straight from the MIDI 1.0
# channel-voice table (0xB0 for channel 1 through 0xBF for channel 16).
CC_STATUS_BY_CHANNEL = {
    1: 0xB0, 2: 0xB1, 3: 0xB2, 4: 0xB3, 5: 0xB4, 6: 0xB5, 7: 0xB6, 8: 0xB7,
    9: 0xB8, 10: 0xB9, 11: 0xBA, 12: 0xBB, 13: 0xBC, 14: 0xBD, 15: 0xBE, 16: 0xBF,
}


class TestSplitCombine:
    @pytest.mark.parametrize(
        "value,expected",
        [(0, (0, 0)), (16383, (127, 127)), (300, (2, 44))],
    )
    def test_split_examples(self, value, expected):
        assert split14(value) == expected

    @pytest.mark.parametrize(
        "msb,lsb,expected",
        [(0, 0, 0), (127, 127, 16383), (2, 44, 300)],
    )
    def test_combine_examples(self, msb, lsb, expected):
        assert combine14(msb, lsb) == expected

    def test_exhaustive_round_trip(self):
        for value in range(16384):
            msb, lsb = split14(value)
            assert msb <= 127 and lsb <= 127
            assert combine14(msb, lsb) == value

    @given(value14s)
    def test_bitwise_matches_arithmetic(self, value):
        # the >>7 / &127 packing must agree with plain floor/mod arithmetic
        assert split14(value) == (value // 128, value % 128)

    @pytest.mark.parametrize("bad", [-1, 16384, 100000, 1.5, "300", None, True])
    def test_split_rejects(self, bad):
        with pytest.raises(ValueError):
            split14(bad)

    @pytest.mark.parametrize("msb,lsb", [(128, 0), (0, 128), (-1, 0), (0, -1), (255, 255)])
    def test_combine_rejects_corrupted_bytes(self, msb, lsb):
        with pytest.raises(ValueError):
            combine14(msb, lsb)

    def test_split_returns_named_tuple(self):
        result = split14(300)
        assert isinstance(result, SplitBytes)
        assert result.msb == 2 and result.lsb == 44


class TestEncodeCc:
    @pytest.mark.parametrize(
        "channel,controller,value,expected",
        [
            (1, 6, 2, "B0 06 02"),
            (16, 38, 44, "BF 26 2C"),
            (1, 0, 0, "B0 00 00"),
        ],
    )
    def test_examples(self, channel, controller, value, expected):
        assert hex_dump(encode_cc(ControlChange(channel, controller, value))) == expected

    @given(channels, data7, data7)
    def test_shape(self, channel, controller, value):
        data = encode_cc(ControlChange(channel, controller, value))
        assert len(data) == 3
        assert data[0] == CC_STATUS_BY_CHANNEL[channel]
        assert data[1] < 0x80 and data[2] < 0x80

    @pytest.mark.parametrize(
        "channel,controller,value",
        [(0, 0, 0), (17, 0, 0), (1, 128, 0), (1, 0, 128), (1, -1, 0)],
    )
    def test_rejects(self, channel, controller, value):
        with pytest.raises(ValueError):
            ControlChange(channel, controller, value)


class TestEncodeNrpn:
    @pytest.mark.parametrize(
        "param,value,channel,expected",
        [
            ((38, 6), 300, 1, "B0 63 26 B0 62 06 B0 06 02 B0 26 2C"),
            ((0, 0), 0, 1, "B0 63 00 B0 62 00 B0 06 00 B0 26 00"),
            ((1, 2), 16383, 2, "B1 63 01 B1 62 02 B1 06 7F B1 26 7F"),
        ],
    )
    def test_examples(self, param, value, channel, expected):
        # oracle: the four-CC expansion hand-encoded via encode_cc
        msb, lsb = split14(value)
        by_parts = b"".join(
            encode_cc(ControlChange(channel, ctl, val))
            for ctl, val in [(99, param[0]), (98, param[1]), (6, msb), (38, lsb)]
        )
        data = encode_nrpn(NrpnParam(*param), value, channel)
        assert data == by_parts
        assert hex_dump(data) == expected

    def test_rejects_null_param(self):
        with pytest.raises(ValueError):
            encode_nrpn(NrpnParam(127, 127), 0, 1)

    @given(params, value14s, channels)
    def test_always_twelve_bytes(self, param, value, channel):
        assert len(encode_nrpn(NrpnParam(*param), value, channel)) == 12


def compress_running_status(data: bytes) -> bytes:
    """Independent running-status compressor over 3-byte CC messages."""
    assert len(data) % 3 == 0
    out = bytearray()
    last_status = None
    for i in range(0, len(data), 3):
        status, d1, d2 = data[i : i + 3]
        if status != last_status:
            out.append(status)
            last_status = status
        out += bytes((d1, d2))
    return bytes(out)


class TestNrpnReceiver:
    def test_full_sequence(self):
        rx = NrpnReceiver()
        events = rx.feed_bytes(parse_hex_dump("B0 63 26 B0 62 06 B0 06 02 B0 26 2C"))
        assert events == [
            NrpnEvent(1, NrpnParam(38, 6), 256, complete=False),
            NrpnEvent(1, NrpnParam(38, 6), 300, complete=True),
        ]

    def test_running_status_form(self):
        canonical = parse_hex_dump("B0 63 26 B0 62 06 B0 06 02 B0 26 2C")
        compressed = compress_running_status(canonical)
        assert hex_dump(compressed) == "B0 63 26 62 06 06 02 26 2C"
        assert NrpnReceiver().feed_bytes(compressed) == NrpnReceiver().feed_bytes(canonical)

    def test_data_entry_without_param_select(self):
        assert NrpnReceiver().feed_bytes(parse_hex_dump("B0 06 05")) == []

    def test_data_entry_after_null_param_select(self):
        rx = NrpnReceiver()
        events = rx.feed_bytes(parse_hex_dump("B0 63 7F B0 62 7F B0 06 05 B0 26 05"))
        assert events == []

    def test_lsb_without_prior_msb(self):
        rx = NrpnReceiver()
        rx.feed_bytes(parse_hex_dump("B0 63 26 B0 62 06"))
        assert rx.feed_bytes(parse_hex_dump("B0 26 2C")) == []

    def test_reselect_clears_pending_data_msb(self):
        rx = NrpnReceiver()
        events = rx.feed_bytes(encode_nrpn(NrpnParam(38, 6), 300, 1)[:9])  # stop before CC38
        assert [e.complete for e in events] == [False]
        rx.feed_bytes(parse_hex_dump("B0 63 01 B0 62 02"))  # select another param
        assert rx.feed_bytes(parse_hex_dump("B0 26 2C")) == []

    def test_consecutive_msb_updates_each_emit(self):
        rx = NrpnReceiver()
        rx.feed_bytes(parse_hex_dump("B0 63 26 B0 62 06"))
        first = rx.feed_bytes(parse_hex_dump("B0 06 01"))
        second = rx.feed_bytes(parse_hex_dump("B0 06 02"))
        assert [e.value for e in first + second] == [128, 256]
        assert all(not e.complete for e in first + second)

    def test_lsb_wiggle_after_one_msb(self):
        rx = NrpnReceiver()
        rx.feed_bytes(parse_hex_dump("B0 63 26 B0 62 06 B0 06 02"))
        first = rx.feed_bytes(parse_hex_dump("B0 26 01"))
        second = rx.feed_bytes(parse_hex_dump("B0 26 02"))
        assert [(e.value, e.complete) for e in first + second] == [(257, True), (258, True)]

    def test_channels_do_not_interfere(self):
        a = encode_nrpn(NrpnParam(38, 6), 300, 1)
        b = encode_nrpn(NrpnParam(1, 2), 12345, 5)
        # interleave at CC-message granularity: a0 b0 a1 b1 ...
        mixed = b"".join(a[i : i + 3] + b[i : i + 3] for i in range(0, 12, 3))
        events = NrpnReceiver().feed_bytes(mixed)
        complete = [e for e in events if e.complete]
        assert complete == [
            NrpnEvent(1, NrpnParam(38, 6), 300, complete=True),
            NrpnEvent(5, NrpnParam(1, 2), 12345, complete=True),
        ]

    def test_sync_loss_counted_and_recovers(self):
        rx = NrpnReceiver()
        assert rx.feed_bytes(bytes([0x05, 0x06, 0x07])) == []
        assert rx.sync_losses == 3
        events = rx.feed_bytes(encode_nrpn(NrpnParam(38, 6), 300, 1))
        assert [e.value for e in events if e.complete] == [300]

    def test_system_common_clears_running_status(self):
        rx = NrpnReceiver()
        # 0xF6 (tune request) kills running status; the dangling data bytes
        # afterwards must be discarded, not misread as a CC pair
        data = parse_hex_dump("B0 63 26 F6 62 06 06 02 26 2C")
        assert rx.feed_bytes(data) == []
        assert rx.sync_losses == 6

    def test_realtime_bytes_are_transparent(self):
        plain = encode_nrpn(NrpnParam(38, 6), 300, 1)
        with_clock = bytearray()
        for byte in plain:
            with_clock += bytes([byte, 0xF8])  # MIDI clock after every byte
        rx = NrpnReceiver()
        assert rx.feed_bytes(bytes(with_clock)) == NrpnReceiver().feed_bytes(plain)
        assert rx.sync_losses == 0

    def test_other_voice_messages_consumed_silently(self):
        rx = NrpnReceiver()
        stream = bytes([0x90, 60, 100]) + encode_nrpn(NrpnParam(38, 6), 300, 1) + bytes([0xC0, 5])
        events = rx.feed_bytes(stream)
        assert [e.value for e in events if e.complete] == [300]
        assert rx.sync_losses == 0

    def test_status_interrupting_partial_message(self):
        rx = NrpnReceiver()
        # new status mid-message abandons the partial CC without drama
        events = rx.feed_bytes(parse_hex_dump("B0 63 B0 63 26 B0 62 06 B0 06 02 B0 26 2C"))
        assert [e.value for e in events if e.complete] == [300]

    def test_rejects_non_byte(self):
        with pytest.raises(ValueError):
            NrpnReceiver().feed(256)

    @given(params, value14s, channels)
    def test_encode_decode_round_trip(self, param, value, channel):
        events = NrpnReceiver().feed_bytes(encode_nrpn(NrpnParam(*param), value, channel))
        complete = [e for e in events if e.complete]
        assert complete == [NrpnEvent(channel, NrpnParam(*param), value, complete=True)]

    @given(
        st.lists(st.tuples(params, value14s), min_size=1, max_size=8),
        st.lists(st.tuples(params, value14s), min_size=1, max_size=8),
        st.randoms(use_true_random=False),
    )
    def test_interleaved_streams_equal_sequential(self, updates_a, updates_b, rng):
        stream_a = b"".join(encode_nrpn(NrpnParam(*p), v, 3) for p, v in updates_a)
        stream_b = b"".join(encode_nrpn(NrpnParam(*p), v, 9) for p, v in updates_b)
        msgs_a = [stream_a[i : i + 3] for i in range(0, len(stream_a), 3)]
        msgs_b = [stream_b[i : i + 3] for i in range(0, len(stream_b), 3)]
        mixed = bytearray()
        ia = ib = 0
        while ia < len(msgs_a) or ib < len(msgs_b):
            take_a = ia < len(msgs_a) and (ib == len(msgs_b) or rng.random() < 0.5)
            if take_a:
                mixed += msgs_a[ia]
                ia += 1
            else:
                mixed += msgs_b[ib]
                ib += 1
        mixed_events = NrpnReceiver().feed_bytes(bytes(mixed))
        sequential = NrpnReceiver().feed_bytes(stream_a) + NrpnReceiver().feed_bytes(stream_b)
        for channel in (3, 9):
            assert [e for e in mixed_events if e.channel == channel] == [
                e for e in sequential if e.channel == channel
            ]


class TestHexDump:
    def test_round_trip(self):
        data = encode_nrpn(NrpnParam(38, 6), 300, 1)
        assert parse_hex_dump(hex_dump(data)) == data

    def test_format(self):
        assert hex_dump(bytes([0xB0, 0x63, 0x26])) == "B0 63 26"

    @given(st.binary(max_size=64))
    def test_round_trip_any_bytes(self, data):
        assert parse_hex_dump(hex_dump(data)) == data
