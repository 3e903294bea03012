"""Lateral force between deep sinusoidal gold gratings at H = 220, 230, 240 nm,
with the location and size of the force maximum for each curve."""
import numpy as np

from _common import parser, sweep

if __name__ == "__main__":
    args = parser(__doc__, "sinusoid_gold.json").parse_args()
    table = sweep(args, "fig2a_sinusoid_gold")
    for H in sorted({r.H for r in table.rows}):
        rows = [r for r in table.rows if r.H == H]
        i = int(np.argmax([abs(r.f_per_area) for r in rows]))
        print(f"H = {H * 1e9:.0f} nm: max |F|/A = {abs(rows[i].f_per_area):.3f} N/m^2 "
              f"at b = {rows[i].b:+.3f}")
