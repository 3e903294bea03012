"""Imaginary-frequency permittivities and the Clausius-Mossotti contrast.

All functions accept scalar or array ``zeta`` (rad/s) and broadcast.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ConfigError, DomainError, ExtrapolationError


@dataclass(frozen=True)
class PerfectConductor:
    """Ideal metal, eps -> infinity at every frequency."""


@dataclass(frozen=True)
class Plasma:
    omega_p: float  # rad/s

    def __post_init__(self):
        if not self.omega_p > 0:
            raise DomainError("plasma frequency must be positive")


@dataclass(frozen=True)
class DrudeLorentz:
    eps_h: float
    eps_l: float
    omega_0: float  # rad/s

    def __post_init__(self):
        if not (self.eps_l > self.eps_h >= 1.0):
            raise DomainError("need eps_l > eps_h >= 1")
        if not self.omega_0 > 0:
            raise DomainError("omega_0 must be positive")


@dataclass(frozen=True)
class OscillatorSum:
    """eps = 1 + sum_i s_i w_i^2 / (zeta^2 + w_i^2)."""

    terms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((float(s), float(w)) for s, w in self.terms))
        for s, w in self.terms:
            if s < 0 or w <= 0:
                raise DomainError("oscillator strengths must be >= 0 and frequencies > 0")


@dataclass(frozen=True)
class Tabulated:
    """Log-linear interpolation of eps(i zeta) on a strictly increasing zeta grid.

    ``extrapolation`` is ``"error"`` (default) or ``"clamp"``; clamping holds the
    end samples constant and emits a ``RuntimeWarning`` the first time it happens.
    """

    points: tuple[tuple[float, float], ...]
    extrapolation: str = "error"
    _warned: list = field(default_factory=list, compare=False, repr=False, hash=False)

    def __post_init__(self):
        pts = tuple((float(z), float(e)) for z, e in self.points)
        object.__setattr__(self, "points", pts)
        z = np.array([p[0] for p in pts])
        e = np.array([p[1] for p in pts])
        if len(pts) < 2:
            raise DomainError("tabulated permittivity needs at least two points")
        if np.any(z <= 0) or np.any(np.diff(z) <= 0):
            raise DomainError("tabulated zeta must be positive and strictly increasing")
        if np.any(np.diff(e) > 0) or np.any(e < 1):
            raise DomainError("tabulated eps must be >= 1 and non-increasing in zeta")
        if self.extrapolation not in ("error", "clamp"):
            raise DomainError(f"unknown extrapolation policy {self.extrapolation!r}")

    @classmethod
    def from_csv(cls, path, extrapolation="error"):
        data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
        return cls(tuple(map(tuple, data[:, :2])), extrapolation)

    def _eval(self, zeta):
        z = np.array([p[0] for p in self.points])
        e = np.array([p[1] for p in self.points])
        outside = (zeta < z[0]) | (zeta > z[-1])
        if np.any(outside):
            if self.extrapolation == "error":
                raise ExtrapolationError(
                    f"zeta outside tabulated range [{z[0]:g}, {z[-1]:g}] rad/s")
            if not self._warned:
                self._warned.append(True)
                warnings.warn("tabulated permittivity clamped outside its table",
                              RuntimeWarning, stacklevel=3)
        lz = np.log(np.clip(zeta, z[0], z[-1]))
        return np.interp(lz, np.log(z), e)


DielectricModel = Union[PerfectConductor, Plasma, DrudeLorentz, OscillatorSum, Tabulated]

GOLD = Plasma(1.3e16)
SILICON = DrudeLorentz(1.035, 11.87, 6.6e15)


def _check_zeta(zeta):
    zeta = np.asarray(zeta, dtype=float)
    if np.any(zeta < 0) or np.any(np.isnan(zeta)):
        raise DomainError("imaginary frequency must be >= 0")
    return zeta


def _ret(x):
    return float(x) if np.ndim(x) == 0 else x


def permittivity(model: DielectricModel, zeta):
    """eps(i zeta). ``PerfectConductor`` yields ``inf``."""
    zeta = _check_zeta(zeta)
    if isinstance(model, PerfectConductor):
        out = np.full(zeta.shape, np.inf)
    elif isinstance(model, Plasma):
        with np.errstate(divide="ignore"):
            out = 1.0 + model.omega_p**2 / zeta**2
    elif isinstance(model, DrudeLorentz):
        w2 = model.omega_0**2
        out = model.eps_h + (model.eps_l - model.eps_h) * w2 / (zeta**2 + w2)
    elif isinstance(model, OscillatorSum):
        out = np.ones_like(zeta)
        for s, w in model.terms:
            out = out + s * w * w / (zeta**2 + w * w)
    elif isinstance(model, Tabulated):
        out = model._eval(zeta)
    else:
        raise TypeError(f"unknown dielectric model {model!r}")
    return _ret(out)


def cm_contrast(model: DielectricModel, zeta):
    """Resummed contrast 3(eps - 1)/(eps + 2), in [0, 3]."""
    zeta = _check_zeta(zeta)
    if isinstance(model, PerfectConductor):
        out = np.full(zeta.shape, 3.0)
    elif isinstance(model, Plasma):
        # rational form stays finite at zeta = 0
        wp2 = model.omega_p**2
        out = 3.0 * wp2 / (wp2 + 3.0 * zeta**2)
    else:
        eps = np.asarray(permittivity(model, zeta), dtype=float)
        out = 3.0 * (eps - 1.0) / (eps + 2.0)
    return _ret(out)


def static_contrast(model: DielectricModel) -> float:
    return float(cm_contrast(model, 0.0)) if not isinstance(model, Tabulated) else \
        float(3.0 * (model.points[0][1] - 1.0) / (model.points[0][1] + 2.0))


# -- config fragments ---------------------------------------------------------

_KEYS = {
    "perfect_conductor": set(),
    "plasma": {"omega_p"},
    "drude_lorentz": {"eps_h", "eps_l", "omega_0"},
    "oscillator_sum": {"terms"},
    "tabulated": {"table_path", "points", "extrapolation"},
}


def material_from_config(cfg: dict, path: str = "material", base_dir=None) -> DielectricModel:
    if not isinstance(cfg, dict) or "model" not in cfg:
        raise ConfigError(path, "expected an object with a 'model' key")
    kind = cfg["model"]
    if kind not in _KEYS:
        raise ConfigError(f"{path}.model", f"unknown model {kind!r}")
    extra = set(cfg) - _KEYS[kind] - {"model"}
    if extra:
        raise ConfigError(f"{path}.{sorted(extra)[0]}", "unknown key")
    try:
        if kind == "perfect_conductor":
            return PerfectConductor()
        if kind == "plasma":
            return Plasma(float(cfg["omega_p"]))
        if kind == "drude_lorentz":
            return DrudeLorentz(float(cfg["eps_h"]), float(cfg["eps_l"]), float(cfg["omega_0"]))
        if kind == "oscillator_sum":
            return OscillatorSum(tuple(tuple(t) for t in cfg["terms"]))
        if "points" in cfg:
            return Tabulated(tuple(tuple(p) for p in cfg["points"]),
                             cfg.get("extrapolation", "error"))
        tp = Path(cfg["table_path"])
        if base_dir is not None and not tp.is_absolute():
            tp = Path(base_dir) / tp
        return Tabulated.from_csv(tp, cfg.get("extrapolation", "error"))
    except KeyError as exc:
        raise ConfigError(f"{path}.{exc.args[0]}", "missing key") from None
    except (DomainError, OSError, ValueError, TypeError) as exc:
        raise ConfigError(path, str(exc)) from None


def material_to_config(model: DielectricModel) -> dict:
    if isinstance(model, PerfectConductor):
        return {"model": "perfect_conductor"}
    if isinstance(model, Plasma):
        return {"model": "plasma", "omega_p": model.omega_p}
    if isinstance(model, DrudeLorentz):
        return {"model": "drude_lorentz", "eps_h": model.eps_h, "eps_l": model.eps_l,
                "omega_0": model.omega_0}
    if isinstance(model, OscillatorSum):
        return {"model": "oscillator_sum", "terms": [list(t) for t in model.terms]}
    # tabulated data is echoed inline so the key captures its content
    return {"model": "tabulated", "points": [list(p) for p in model.points],
            "extrapolation": model.extrapolation}
