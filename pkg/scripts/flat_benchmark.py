"""Flat-plate energies: ideal metals against the closed form, and the ratio of
each material pair to the ideal Casimir energy."""
import math

from casilat.constants import HBAR_C
from casilat.energy import energy_per_area, flat_plate_energy, benchmark_spec
from casilat.geometry import Flat, PlateSystem
from casilat.material import GOLD, SILICON, PerfectConductor

if __name__ == "__main__":
    pc = PerfectConductor()
    print("pair,H_m,E_flat_path,E_grating_path,ratio_to_ideal")
    for name, m in (("perfect_conductor", pc), ("gold", GOLD), ("silicon", SILICON)):
        for H in (100e-9, 200e-9, 1e-6):
            a = flat_plate_energy(m, m, H).e_per_area
            b = energy_per_area(PlateSystem(m, m, Flat(), Flat(), H, H), benchmark_spec()).e_per_area
            ideal = -math.pi**2 * HBAR_C / (720 * H**3)
            print(f"{name},{H:g},{a:.8e},{b:.8e},{a / ideal:.6f}")
    print(f"closed form E H^3/hbar c = {-69 / (640 * math.pi**2):.7f}")
