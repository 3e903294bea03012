"""Periodic uniaxial height profiles and the two-plate configuration.

Plate 1 fills z <= h1(x); plate 2 fills z >= H + h2(x). The lateral shift of
plate 2 is b*lambda, entering as h2(x; b) = base2(x + b*lambda).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .errors import ConfigError, DomainError, GeometryOverlapError
from .material import DielectricModel


def _frac(x):
    return x - np.floor(x)


@dataclass(frozen=True)
class Flat:
    def height(self, s):
        return np.zeros_like(s)

    def bounds(self):
        return 0.0, 0.0

    def jumps(self):
        return ()


@dataclass(frozen=True)
class Sinusoid:
    a: float

    def height(self, s):
        return self.a * np.sin(2.0 * np.pi * s)

    def bounds(self):
        return -self.a, self.a

    def jumps(self):
        return ()


@dataclass(frozen=True)
class Sawtooth:
    """Ramp from -a to a with a jump at each period boundary.

    ``rising=False`` mirrors the tooth (x -> -x); this reflects F(b) to -F(-b).
    """

    a: float
    rising: bool = True

    def height(self, s):
        return self.a * (2.0 * s - 1.0) if self.rising else self.a * (1.0 - 2.0 * s)

    def bounds(self):
        return -self.a, self.a

    def jumps(self):
        return (0.0,)


@dataclass(frozen=True)
class Rectangular:
    """Teeth of height a on the first fraction f of each period, 0 elsewhere."""

    a: float
    f: float

    def __post_init__(self):
        if not 0.0 < self.f < 1.0:
            raise DomainError("duty fraction f must lie in (0, 1)")

    def height(self, s):
        return np.where(s < self.f, self.a, 0.0)

    def bounds(self):
        return 0.0, self.a

    def jumps(self):
        return (0.0, self.f)


@dataclass(frozen=True)
class TabulatedPeriodic:
    """Heights sampled at x_k = k*lambda/N, k = 0..N-1, linearly interpolated."""

    samples: tuple[float, ...]

    def __post_init__(self):
        s = tuple(float(v) for v in self.samples)
        if len(s) < 2 or not all(math.isfinite(v) for v in s):
            raise DomainError("need at least two finite samples")
        object.__setattr__(self, "samples", s)

    def height(self, s):
        y = np.asarray(self.samples + self.samples[:1])
        n = len(self.samples)
        return np.interp(s * n, np.arange(n + 1), y)

    def bounds(self):
        return min(self.samples), max(self.samples)

    def jumps(self):
        # kinks, not jumps; used only as panel breakpoints
        n = len(self.samples)
        return tuple(k / n for k in range(n)) if n <= 64 else ()


Profile = Union[Flat, Sinusoid, Sawtooth, Rectangular, TabulatedPeriodic]


def _check_amplitude(profile):
    a = getattr(profile, "a", 0.0)
    if a < 0:
        raise DomainError("corrugation amplitude must be >= 0")


def height(profile: Profile, x, lam: float):
    """Base profile h(x), periodic in x with period ``lam``."""
    if not lam > 0:
        raise DomainError("period must be positive")
    s = _frac(np.asarray(x, dtype=float) / lam)
    out = profile.height(s)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class PlateSystem:
    material1: DielectricModel
    material2: DielectricModel
    profile1: Profile
    profile2: Profile
    lam: float
    H: float
    b: float = 0.0

    def __post_init__(self):
        if not (self.lam > 0 and self.H > 0):
            raise DomainError("lambda and H must be positive")
        _check_amplitude(self.profile1)
        _check_amplitude(self.profile2)

    def with_(self, **kw) -> "PlateSystem":
        return replace(self, **kw)


def height2_shifted(system: PlateSystem, x):
    """h2(x; b) = base2(x + b*lambda)."""
    return height(system.profile2, np.asarray(x, dtype=float) + system.b * system.lam,
                  system.lam)


def gap_bounds(system: PlateSystem) -> tuple[float, float]:
    lo1, hi1 = system.profile1.bounds()
    lo2, hi2 = system.profile2.bounds()
    return system.H + lo2 - hi1, system.H + hi2 - lo1


def min_gap(system: PlateSystem) -> float:
    """min over x, x' of H + h2(x; b) - h1(x'); raises if the plates overlap."""
    g = gap_bounds(system)[0]
    if not g > 0:
        raise GeometryOverlapError(f"surfaces overlap: minimum gap {g:.6g} m <= 0")
    return g


# -- config fragments ---------------------------------------------------------

_SHAPE_KEYS = {"flat": set(), "sinusoid": {"a_m"}, "sawtooth": {"a_m", "rising"},
               "rectangular": {"a_m", "f"}, "tabulated": {"samples"}}


def profile_from_config(cfg: dict, path: str = "profile") -> Profile:
    if not isinstance(cfg, dict) or "shape" not in cfg:
        raise ConfigError(path, "expected an object with a 'shape' key")
    shape = cfg["shape"]
    if shape not in _SHAPE_KEYS:
        raise ConfigError(f"{path}.shape", f"unknown shape {shape!r}")
    extra = set(cfg) - _SHAPE_KEYS[shape] - {"shape"}
    if extra:
        raise ConfigError(f"{path}.{sorted(extra)[0]}", "unknown key")
    try:
        if shape == "flat":
            return Flat()
        if shape == "sinusoid":
            p = Sinusoid(float(cfg["a_m"]))
        elif shape == "sawtooth":
            p = Sawtooth(float(cfg["a_m"]), bool(cfg.get("rising", True)))
        elif shape == "rectangular":
            p = Rectangular(float(cfg["a_m"]), float(cfg["f"]))
        else:
            p = TabulatedPeriodic(tuple(cfg["samples"]))
        _check_amplitude(p)
        return p
    except KeyError as exc:
        raise ConfigError(f"{path}.{exc.args[0]}", "missing key") from None
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(path, str(exc)) from None


def profile_to_config(p: Profile) -> dict:
    if isinstance(p, Flat):
        return {"shape": "flat"}
    if isinstance(p, Sinusoid):
        return {"shape": "sinusoid", "a_m": p.a}
    if isinstance(p, Sawtooth):
        out = {"shape": "sawtooth", "a_m": p.a}
        if not p.rising:
            out["rising"] = False
        return out
    if isinstance(p, Rectangular):
        return {"shape": "rectangular", "a_m": p.a, "f": p.f}
    return {"shape": "tabulated", "samples": list(p.samples)}
