"""Lateral force between rectangular silicon gratings (f = 5/9, a = 6 um,
lambda = 9 um) at the separations listed in the config."""
from _common import parser, sweep

if __name__ == "__main__":
    args = parser(__doc__, "rectangular_silicon.json").parse_args()
    table = sweep(args, "fig2c_rectangular_silicon")
    for H in sorted({r.H for r in table.rows}):
        rows = [r for r in table.rows if r.H == H]
        plateau = [abs(r.f_per_area) for r in rows if 0.05 < r.b < 0.4]
        print(f"H = {H * 1e6:.2f} um: max |F|/A = {max(abs(r.f_per_area) for r in rows):.3e} "
              f"N/m^2, plateau variation {(max(plateau) - min(plateau)) / max(plateau):.1%}")
