"""Casimir energy per unit area of two corrugated half-spaces.

Main path: E/A = -hbar c / (8 pi^3 H^3 lam) int_0^lam dx' int_{-lam/2}^{lam/2} du
K_per(u, D), with D = 1 + h2(x' + u + b lam) - h1(x') and K_per the period-summed
pair kernel (lengths in units of H). The x' axis belongs to plate 1 and u is
the lateral offset, so panel layouts do not move with b except for the jump
positions of a discontinuous plate-2 profile.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .constants import C as C_LIGHT, HBAR_C
from .errors import GeometryOverlapError
from .geometry import Flat, PlateSystem, gap_bounds, height, min_gap
from .kernel import contrast_product, kernel_table, poly_p
from .material import DielectricModel
from .quad import QuadSpec, SemiInfiniteRational, composite_rule, graded_edges, \
    integrate_nested, subdivide


@dataclass(frozen=True)
class EnergyResult:
    e_per_area: float  # J/m^2
    err_est: float  # J/m^2
    evaluations: int
    wall_time: float  # s
    converged: bool = True
    level: int = 0


def production_spec() -> QuadSpec:
    return QuadSpec(rel_tol=1e-3, max_subdivisions=50)


def benchmark_spec() -> QuadSpec:
    return QuadSpec(rel_tol=1e-5, max_subdivisions=50)


def _max_level(spec: QuadSpec) -> int:
    # max_subdivisions caps the number of uniform refinements of the base layout
    return max(0, min(6, int(math.log2(max(spec.max_subdivisions, 1))) - 1))


class EnergyEngine:
    """Shared quadrature layout and kernel table for one geometry at fixed H.

    Everything here is independent of b; ``sums(b, level)`` evaluates the
    double integral with Kronrod and Gauss weights on the same nodes.
    """

    def __init__(self, system: PlateSystem, order: int = 15, far_scale: float = 1.0):
        self.system = system
        H = system.H
        self.lam_t = system.lam / H
        dmin = min_gap(system) / H
        dmax = gap_bounds(system)[1] / H
        self.dmin_t, self.dmax_t = dmin, dmax
        self.flat = isinstance(system.profile1, Flat) and isinstance(system.profile2, Flat)
        self.table = kernel_table(system.material1, system.material2, H, self.lam_t,
                                  round(dmin, 14), round(dmax, 14), far_scale)
        self.order = order
        self.prefactor = -HBAR_C / (8.0 * math.pi**3 * H**3 * self.lam_t)
        L = self.lam_t
        j1 = [s * L for s in system.profile1.jumps()]
        # multiple of 4 keeps the node set mirror-symmetric for symmetric profiles
        n_outer = 4 if self.flat else 4 * max(1, int(math.ceil(L / min(1.0, 1.5 * dmin) / 4)))
        self._outer0 = np.union1d(np.linspace(0.0, L, n_outer + 1), j1)
        self._inner0 = graded_edges(-0.5 * L, 0.5 * L, 0.0, min(0.5 * dmin, 0.25 * L))
        self._jumps2 = np.array([s * L for s in system.profile2.jumps()])

    def _h(self, profile, x):
        return height(profile, x * self.system.H, self.system.lam) / self.system.H

    def sums(self, b: float, level: int):
        """(Kronrod value, Gauss value, node count) of int dx' int du K_per."""
        L = self.lam_t
        sysm = self.system
        xo, wko, wgo = composite_rule(subdivide(self._outer0, 2**level), self.order)
        h1 = self._h(sysm.profile1, xo)
        inner = subdivide(self._inner0, 2**level)
        if len(self._jumps2) == 0:
            ui, wki, wgi = composite_rule(inner, self.order)
            X = xo[:, None] + ui[None, :]
            D = 1.0 + self._h(sysm.profile2, X + b * L) - h1[:, None]
            K = self.table.periodic(np.broadcast_to(ui, D.shape), D)
            ik = wko @ (K @ wki)
            ig = wgo @ (K @ wgi)
            return ik, ig, K.size
        ik = ig = 0.0
        n = 0
        rows_k, rows_g = np.empty(len(xo)), np.empty(len(xo))
        for i, x in enumerate(xo):
            uj = self._jumps2 - b * L - x
            uj = uj - L * np.round(uj / L)
            edges = np.union1d(inner, uj[(uj > -0.5 * L) & (uj < 0.5 * L)])
            ui, wki, wgi = composite_rule(edges, self.order)
            D = 1.0 + self._h(sysm.profile2, x + ui + b * L) - h1[i]
            K = self.table.periodic(ui, D)
            rows_k[i] = K @ wki
            rows_g[i] = K @ wgi
            n += len(ui)
        return wko @ rows_k, wgo @ rows_g, n

    def sums_db(self, b: float, level: int):
        """Kronrod value of d/db int dx' int du K_per, differentiating under the
        integral (smooth plate-2 profiles only)."""
        L = self.lam_t
        if len(self._jumps2):
            raise ValueError("analytic b-derivative needs a continuous plate-2 profile")
        sysm = self.system
        xo, wko, _ = composite_rule(subdivide(self._outer0, 2**level), self.order)
        h1 = self._h(sysm.profile1, xo)
        # substitute xi = x' + u + b L: b then enters only through u = xi - x' - b L
        ui, wki, _ = composite_rule(subdivide(self._inner0, 2**level), self.order)
        X = xo[:, None] + ui[None, :]
        D = 1.0 + self._h(sysm.profile2, X + b * L) - h1[:, None]
        U = np.broadcast_to(ui, D.shape)
        dK = self.table.direct_du(U, D) + self.table.images_du(U, D)
        return -L * (wko @ (dK @ wki))

    def tolerance_met(self, ik, ig, spec: QuadSpec, scale=None):
        err = abs(ik - ig)
        ref = abs(ik) if scale is None else scale
        return err <= max(spec.abs_tol / abs(self.prefactor), spec.rel_tol * ref)


def _check_overlap(system):
    min_gap(system)


def energy_per_area(system: PlateSystem, spec: QuadSpec | None = None) -> EnergyResult:
    """Casimir energy per unit area E/A (J/m^2) of ``system``."""
    return energy_vs_b(system, [system.b], spec)[0]


def energy_vs_b(system: PlateSystem, b_grid, spec: QuadSpec | None = None) -> list[EnergyResult]:
    """Energies on one shared node layout for every b in ``b_grid``.

    The refinement level is raised for all points together until each meets
    the tolerance or the level cap is reached.
    """
    spec = spec or production_spec()
    t0 = time.perf_counter()
    eng = EnergyEngine(system)
    b_grid = [float(b) for b in b_grid]
    lmax = _max_level(spec)
    level = 0
    while True:
        vals = [eng.sums(b, level) for b in b_grid]
        ok = all(eng.tolerance_met(k, g, spec) for k, g, _ in vals)
        if ok or level >= lmax:
            break
        level += 1
    dt = (time.perf_counter() - t0) / max(len(b_grid), 1)
    pf = eng.prefactor
    return [EnergyResult(float(pf * k), float(abs(pf * (k - g))), int(n), dt,
                         bool(eng.tolerance_met(k, g, spec)), level) for k, g, n in vals]


def flat_plate_energy(material1: DielectricModel, material2: DielectricModel, H: float,
                      spec: QuadSpec | None = None) -> EnergyResult:
    """Flat-plate E/A from the q = 0 kernel:

    E/A = -hbar c/(4 pi^2 H^3) int dkappa kappa^2 C(kappa) int_1^inf dp poly(p)/(8 p^3) e^(-2 p kappa),

    with p = 1/q on the inner axis.
    """
    if not H > 0:
        raise GeometryOverlapError("H must be positive")
    spec = spec or benchmark_spec()
    t0 = time.perf_counter()
    cfun = contrast_product(material1, material2, H)
    inner = QuadSpec(rel_tol=spec.rel_tol * 1e-2, max_subdivisions=200)
    outer = QuadSpec(rel_tol=spec.rel_tol, abs_tol=spec.abs_tol, max_subdivisions=200,
                     transform=SemiInfiniteRational(1.0))

    def f(kappa, q):
        q = np.asarray(q, float)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            g = (2.0 / q**3 - 2.0 / q + q) * np.exp(-2.0 * kappa / q) / 8.0
        g = np.where(q > 0, g, 0.0)
        return kappa**2 * float(cfun(kappa)) * g

    r = integrate_nested(f, [(0.0, math.inf, outer), (0.0, 1.0, inner)], vectorized=True)
    pf = -HBAR_C / (4.0 * math.pi**2 * H**3)
    return EnergyResult(float(pf * r.value), float(abs(pf) * r.err_est), r.evaluations,
                        time.perf_counter() - t0, bool(r.converged))


def flat_pc_energy_exact(H: float) -> float:
    """-69/(640 pi^2) hbar c / H^3: lowest-order resummed result for ideal metals."""
    return -69.0 / (640.0 * math.pi**2) * HBAR_C / H**3


def casimir_exact_pc(H: float) -> float:
    """-pi^2/720 hbar c / H^3."""
    return -math.pi**2 / 720.0 * HBAR_C / H**3


# -- independent path through the wave-vector kernel ------------------------------

def _psi_moment(m1, m2, H):
    """w -> int_0^1 dq (2 - 2q^2 + q^4) C(w q/2)."""
    cfun = contrast_product(m1, m2, H)
    qx, qw, _ = composite_rule(np.linspace(0, 1, 5), 21)
    wq = qw * (2 - 2 * qx**2 + qx**4)

    def psi(w):
        w = np.asarray(w, float)
        return cfun(0.5 * w[..., None] * qx) @ wq

    return psi


def energy_kernel_path(system: PlateSystem, n_x: int = 64, mode_cut: float = 36.0,
                       with_db: bool = False):
    """E/A (and optionally dE/db per unit area) from the wave-vector kernel.

    The y-integrated, period-summed kernel is a Fourier series over q_m = 2 pi m/lam
    (Poisson summation), so no images or Bessel functions appear:

    E/A = -hbar c/(256 pi^2 H^3 lam^2) int_0^inf dw w^5 Psi(w) int int dx dx'
          sum_m cos(q_m (x - x')) exp(-D sqrt(w^2 + q_m^2)) / (w^2 + q_m^2)^(3/2).

    Lateral axes use the trapezoid rule, which is spectrally accurate for these
    smooth periodic integrands; intended for smooth profiles with moderate gaps.
    """
    H = system.H
    L = system.lam / H
    dmin = min_gap(system) / H
    psi = _psi_moment(system.material1, system.material2, H)
    x = np.arange(n_x) * L / n_x  # plate-2 coordinate xi = x + b L
    h2 = height(system.profile2, x * H, system.lam) / H
    h1 = height(system.profile1, x * H, system.lam) / H
    D = 1.0 + h2[:, None] - h1[None, :]  # (xi, x')
    offs = x[:, None] - x[None, :] - system.b * L  # u = xi - x' - b L
    m_max = int(math.ceil(mode_cut / dmin * L / (2 * math.pi)))
    qm = 2 * math.pi * np.arange(m_max + 1) / L
    edges = np.concatenate([[0.0], np.geomspace(0.05, 1.0, 8) * (mode_cut / dmin)])
    wx, wk, _ = composite_rule(edges, 21)
    wt = wk * wx**5 * psi(wx)
    tot = 0.0
    dtot = 0.0
    for m, q in enumerate(qm):
        g = np.sqrt(wx**2 + q * q)
        F = np.exp(-D[..., None] * g) / g**3 @ wt  # (xi, x')
        mult = 1.0 if m == 0 else 2.0
        tot += mult * np.sum(np.cos(q * offs) * F)
        if with_db and m:
            dtot += mult * q * L * np.sum(np.sin(q * offs) * F)
    cell = (L / n_x) ** 2
    pf = -HBAR_C / (256.0 * math.pi**2 * H**3 * L**2)
    e = pf * tot * cell
    if with_db:
        return e, pf * dtot * cell
    return e
