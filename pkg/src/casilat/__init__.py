"""Lateral Casimir energies and forces between corrugated dielectric plates."""

from .constants import C, HBAR
from .geometry import (
    Flat,
    PlateSystem,
    Rectangular,
    Sawtooth,
    Sinusoid,
    TabulatedPeriodic,
    height,
    height2_shifted,
    min_gap,
)
from .material import (
    DrudeLorentz,
    OscillatorSum,
    PerfectConductor,
    GOLD,
    SILICON,
    Plasma,
    Tabulated,
    cm_contrast,
    permittivity,
)
from .quad import QuadResult, QuadSpec, integrate_1d, integrate_nested
from .energy import EnergyResult, energy_per_area, energy_vs_b, flat_plate_energy
from .force import (
    ForcePoint,
    SphereSetup,
    lateral_force_curve,
    lateral_force_per_area,
    normal_force_per_area,
    pfa_sphere_force,
)

from .config import RunConfig, load_config, parse_config
from .runner import SweepPlan, SweepTable, run_sweep

__version__ = "0.1.0"
