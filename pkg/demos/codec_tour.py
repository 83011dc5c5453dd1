"""A walk through the byte-level codec: splitting, CC framing, NRPN groups.

Run with: python demos/codec_tour.py
"""

from wiremidi import NrpnParam, NrpnReceiver, combine14, encode_nrpn, hex_dump, split14

# A 14-bit control value rides in two 7-bit halves. 300 is the classic
# worked example: 300 = 2 * 128 + 44.
value = 300
msb, lsb = split14(value)
print(f"value {value} splits into msb={msb}, lsb={lsb}")
print(f"and recombines: {msb} * 128 + {lsb} = {combine14(msb, lsb)}")
print()

# On a MIDI cable the same update costs four Control Change messages:
# select the parameter number (CC99/CC98), then send both data halves
# (CC6 = coarse, CC38 = fine). Twelve bytes total.
param = NrpnParam(38, 6)
group = encode_nrpn(param, value, channel=1)
print(f"NRPN group for param ({param.msb},{param.lsb}), value {value}, channel 1:")
print(f"  {hex_dump(group)}")
print()

# The streaming receiver reverses it. Note the two events: the coarse
# half lands first (complete=False), then the fine half finishes the value.
receiver = NrpnReceiver()
for event in receiver.feed_bytes(group):
    state = "complete" if event.complete else "coarse only"
    print(f"  ch{event.channel} param=({event.param.msb},{event.param.lsb}) "
          f"value={event.value:5d}  [{state}]")
print()

# Streams survive running status (a repeated 0xB0 is elided on the wire)
# and interleaving with other channels; sweep the whole range to prove the
# codec is exact everywhere.
assert all(combine14(*split14(v)) == v for v in range(16384))
print("round trip verified for all 16384 values")
