"""Lateral force from b-derivatives of the energy, normal pressure, and the
PFA plate-sphere lateral force."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .energy import EnergyEngine, _max_level, production_spec
from .geometry import PlateSystem
from .quad import QuadSpec, composite_rule

DB_STEP = 0.005


@dataclass(frozen=True)
class ForcePoint:
    b: float
    H: float
    f_per_area: float  # N/m^2
    err_est: float  # N/m^2
    converged: bool = True
    step_ok: bool = True


@dataclass(frozen=True)
class SphereSetup:
    system: PlateSystem  # H = closest mean separation
    R: float  # m
    h_max: float | None = None  # m; defaults to H + 6 lambda

    def __post_init__(self):
        if self.h_max is None:
            object.__setattr__(self, "h_max", self.system.H + 6.0 * self.system.lam)
        if not self.h_max > self.system.H:
            raise ValueError("h_max must exceed H")
        if not self.R > 0:
            raise ValueError("sphere radius must be positive")
        if self.R < 10.0 * self.system.lam:
            warnings.warn("R < 10 lambda: proximity force approximation is doubtful",
                          RuntimeWarning, stacklevel=2)


@dataclass(frozen=True)
class PFAPoint:
    b: float
    F: float  # N
    err_est: float  # N
    converged: bool = True


def _force_at(eng: EnergyEngine, b: float, spec: QuadSpec, step: float = DB_STEP):
    """Central differences at steps d and 2d on one layout plus one Richardson step.

    Returns (ForcePoint, energy at b). The quadrature error is the Kronrod-Gauss
    discrepancy of the differenced sums, so it measures the error of the
    difference itself rather than of each energy.
    """
    lam = eng.system.lam
    pf = eng.prefactor
    lmax = _max_level(spec)
    level = 0
    while True:
        s = {k: eng.sums(b + k * step, level) for k in (-2, -1, 1, 2)}
        f1k = -(s[1][0] - s[-1][0]) / (2 * step)
        f1g = -(s[1][1] - s[-1][1]) / (2 * step)
        f2k = -(s[2][0] - s[-2][0]) / (4 * step)
        f2g = -(s[2][1] - s[-2][1]) / (4 * step)
        frk = (4 * f1k - f2k) / 3
        frg = (4 * f1g - f2g) / 3
        scale = pf / lam
        F = frk * scale
        err_q = abs((frk - frg) * scale)
        e_mid = 0.5 * (s[1][0] + s[-1][0]) * pf
        ref = max(abs(F), 1e-3 * abs(e_mid) * 2 * math.pi / lam)
        conv = err_q <= max(spec.abs_tol, spec.rel_tol * ref)
        if conv or level >= lmax:
            break
        level += 1
    err_fd = abs(frk - f1k) * abs(scale)
    # |FR - F1| bounds the truncation of the plain d-stencil and is added to the
    # error bar; the step is accepted while the d and 2d stencils agree to 1%, so
    # the Richardson step works in the asymptotic O(d^2) regime
    step_ok = err_fd <= max(10 * err_q, 1e-2 * ref)
    err = err_q + err_fd
    return ForcePoint(b, eng.system.H, float(F), float(err), bool(conv), bool(step_ok)), e_mid


def lateral_force_per_area(system: PlateSystem, b: float | None = None,
                           spec: QuadSpec | None = None) -> ForcePoint:
    """F/A = -(1/lambda) d(E/A)/db; positive pushes plate 2 towards +x."""
    spec = spec or production_spec()
    b = system.b if b is None else float(b)
    return _force_at(EnergyEngine(system), b, spec)[0]


def lateral_force_curve(system: PlateSystem, b_grid, spec: QuadSpec | None = None) -> list[ForcePoint]:
    spec = spec or production_spec()
    eng = EnergyEngine(system)
    return [_force_at(eng, float(b), spec)[0] for b in sorted(float(x) for x in b_grid)]


def lateral_force_analytic(system: PlateSystem, b: float | None = None, level: int = 0) -> float:
    """F/A by differentiating under the integral sign (continuous plate-2 profiles)."""
    eng = EnergyEngine(system)
    b = system.b if b is None else float(b)
    return float(-eng.sums_db(b, level) * eng.prefactor / system.lam)


def normal_force_per_area(system: PlateSystem, spec: QuadSpec | None = None,
                          rel_step: float = 1e-3) -> ForcePoint:
    """-d(E/A)/dH by central difference; negative means attraction."""
    from .energy import energy_per_area

    spec = spec or production_spec()
    dH = rel_step * system.H
    ep = energy_per_area(system.with_(H=system.H + dH), spec)
    em = energy_per_area(system.with_(H=system.H - dH), spec)
    f = -(ep.e_per_area - em.e_per_area) / (2 * dH)
    err = (ep.err_est + em.err_est) / (2 * dH)
    return ForcePoint(system.b, system.H, float(f), float(err), ep.converged and em.converged)


def pfa_h_edges(H: float, h_max: float, first: float, ratio: float = 2.0):
    """Geometric panel edges from H to h_max."""
    edges = [H]
    d = first
    while H + d < h_max:
        edges.append(H + d)
        d = d * ratio + first
    edges.append(h_max)
    return np.array(edges)


def pfa_sphere_curve(setup: SphereSetup, b_grid, spec: QuadSpec | None = None,
                     order: int = 15) -> list[PFAPoint]:
    """F_ps(b) = (2 pi R/lambda) d/db int_H^inf E/A dH' = -2 pi R int_H^inf F_lat/A dH'.

    The H' axis uses composite Kronrod panels growing geometrically away from H;
    beyond h_max the lateral pressure is extrapolated as A exp(-2 pi H'/lambda)
    from the last two nodes.
    """
    spec = spec or production_spec()
    sysm = setup.system
    b_grid = sorted(float(b) for b in b_grid)
    from .geometry import gap_bounds

    gap0 = gap_bounds(sysm)[0]
    edges = pfa_h_edges(sysm.H, setup.h_max, 0.25 * gap0)
    hx, wk, wg = composite_rule(edges, order)
    F = np.empty((len(hx), len(b_grid)))
    E = np.empty_like(F)
    conv = np.ones_like(F, dtype=bool)
    for i, h in enumerate(hx):
        eng = EnergyEngine(sysm.with_(H=float(h)))
        for j, b in enumerate(b_grid):
            fp, e = _force_at(eng, b, spec)
            F[i, j] = fp.f_per_area
            E[i, j] = fp.err_est
            conv[i, j] = fp.converged
    integral = wk @ F
    err_int = np.abs((wk - wg) @ F) + wk @ E
    lam = sysm.lam
    out = []
    for j, b in enumerate(b_grid):
        f_a, f_b = F[-2, j], F[-1, j]
        k = 2 * math.pi / lam
        if f_a != 0 and f_b / f_a > 0:
            decay = max(k, math.log(f_a / f_b) / (hx[-1] - hx[-2]))
        else:
            decay = k
        tail = f_b * math.exp(-decay * (setup.h_max - hx[-1])) / decay
        total = integral[j] + tail
        scale = max(abs(total), 1e-300)
        if abs(tail) > 0.01 * scale and abs(total) > 0:
            raise ValueError(f"PFA tail beyond h_max is {abs(tail) / scale:.1%} of the integral; "
                             "increase h_max")
        Fps = -2 * math.pi * setup.R * total
        err = 2 * math.pi * setup.R * (err_int[j] + abs(tail))
        out.append(PFAPoint(b, float(Fps), float(err), bool(conv[:, j].all())))
    return out


def pfa_sphere_force(setup: SphereSetup, b: float, spec: QuadSpec | None = None) -> PFAPoint:
    return pfa_sphere_curve(setup, [b], spec)[0]
