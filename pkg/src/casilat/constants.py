"""Physical constants (CODATA 2018, SI)."""

HBAR = 1.054_571_817e-34  # J s
C = 299_792_458.0  # m/s
HBAR_C = HBAR * C

CONSTANTS_VERSION = "CODATA-2018"
