"""Control-voltage tapers: how the exponent shapes the 0..16383 -> CV mapping.

Run with: python demos/curve_tapers.py
"""

from wiremidi import CurveSpec, map_to_cv

# The default taper is a square law into 0.0..0.9: slow start, fast finish,
# which feels natural on frequency-style controls. The endpoints are always
# hit exactly, whatever the exponent.
exponents = [0.5, 1.0, 2.0, 4.0]
steps = [0, 2048, 4096, 8191, 12288, 16383]

header = "value".rjust(7) + "".join(f"   exp={e:<4}" for e in exponents)
print(header)
print("-" * len(header))
for value in steps:
    row = f"{value:7d}"
    for exponent in exponents:
        cv = map_to_cv(value, CurveSpec(exponent=exponent))
        row += f"   {cv:8.6f}"
    print(row)

print()

# A coarse ASCII profile of the default curve.
width = 48
for value in range(0, 16384, 16384 // 16):
    cv = map_to_cv(value)
    bar = "#" * round(cv / 0.9 * width)
    print(f"{value:6d} |{bar}")
print(f"{16383:6d} |" + "#" * width)
