"""Built-in acceptance checks shared by ``casilat validate`` and the test suite.

Each check returns a :class:`Check` holding the verdict and the numbers behind
it, so failures can be reported without re-running anything.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .constants import HBAR_C
from .energy import (EnergyEngine, benchmark_spec, energy_kernel_path, energy_per_area,
                     energy_vs_b, flat_plate_energy, production_spec)
from .force import (SphereSetup, _force_at, lateral_force_analytic, lateral_force_curve,
                    pfa_sphere_curve)
from .geometry import Flat, PlateSystem, Rectangular, Sawtooth, Sinusoid
from .kernel import s_integral_log
from .material import GOLD, SILICON, PerfectConductor
from .quad import QuadSpec, SemiInfiniteRational, integrate_1d
from .runner import SweepPlan, run_sweep

FLAT_PC_TARGET = -69.0 / (640.0 * math.pi**2)
IDEAL_CASIMIR = -math.pi**2 / 720.0


@dataclass
class Check:
    number: int
    name: str
    passed: bool = True
    parts: dict = field(default_factory=dict)
    seconds: float = 0.0

    def require(self, label: str, ok: bool, detail: str):
        self.parts[label] = (bool(ok), detail)
        self.passed = self.passed and bool(ok)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        bad = [f"{k} ({d})" for k, (ok, d) in self.parts.items() if not ok]
        tail = "; failing: " + "; ".join(bad) if bad else ""
        return f"[{status}] criterion {self.number}: {self.name} [{self.seconds:.1f} s]{tail}"

    def report(self) -> str:
        rows = [self.line()]
        rows += [f"    {'ok ' if ok else 'BAD'} {k}: {d}" for k, (ok, d) in self.parts.items()]
        return "\n".join(rows)


def _timed(fn):
    def run(*a, **kw):
        t0 = time.perf_counter()
        c = fn(*a, **kw)
        c.seconds = time.perf_counter() - t0
        return c
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# -- figure geometries ---------------------------------------------------------

def sinusoid_gold(H: float) -> PlateSystem:
    return PlateSystem(GOLD, GOLD, Sinusoid(120e-9), Sinusoid(80e-9), 500e-9, H)


def sawtooth_gold(H: float = 140e-9, rising: bool = True) -> PlateSystem:
    return PlateSystem(GOLD, GOLD, Sawtooth(55e-9, rising), Sawtooth(70e-9, rising), 530e-9, H)


def rectangular_silicon(H: float = 6.5e-6) -> PlateSystem:
    return PlateSystem(SILICON, SILICON, Rectangular(6e-6, 5 / 9), Rectangular(6e-6, 5 / 9),
                       9e-6, H)


def pfa_gold(R: float = 97e-6) -> SphereSetup:
    sysm = PlateSystem(GOLD, GOLD, Sinusoid(85.4e-9), Sinusoid(25.5e-9), 574.7e-9, 134e-9)
    return SphereSetup(sysm, R)


def sign_changes(system: PlateSystem, grid, spec: QuadSpec | None = None):
    """Roots of F(b) on ``grid`` refined by Brent's method on a shared layout."""
    spec = spec or production_spec()
    eng = EnergyEngine(system)
    force = lambda b: _force_at(eng, float(b), spec)[0].f_per_area  # noqa: E731
    vals = [force(b) for b in grid]
    roots = []
    for (b0, f0), (b1, f1) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if f0 == 0.0:
            roots.append(float(b0))
        elif f0 * f1 < 0:
            roots.append(brentq(force, b0, b1, xtol=1e-4))
    return roots, vals


# -- criteria ----------------------------------------------------------------

@_timed
def check_flat_benchmark() -> Check:
    c = Check(1, "flat perfect-conductor benchmark")
    pc = PerfectConductor()
    for H in (100e-9, 1e-6):
        r = flat_plate_energy(pc, pc, H, benchmark_spec())
        sysm = PlateSystem(pc, pc, Flat(), Flat(), H, H)
        m = energy_per_area(sysm, benchmark_spec())
        for tag, e in (("flat path", r.e_per_area), ("grating path", m.e_per_area)):
            x = e * H**3 / HBAR_C
            c.require(f"E H^3/hbar c, {tag}, H={H:g}", abs(x / FLAT_PC_TARGET - 1) < 5e-3,
                      f"{x:.7f} vs {FLAT_PC_TARGET:.7f}")
            ratio = x / IDEAL_CASIMIR
            c.require(f"ratio to ideal, {tag}, H={H:g}", abs(ratio - 0.797) <= 0.005,
                      f"{ratio:.5f}")
    return c


@_timed
def check_s_integral(samples: int = 100, seed: int = 2024) -> Check:
    c = Check(2, "closed-form s-integral vs numeric quadrature")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for A, B in 10.0 ** rng.uniform(-3, 3, size=(samples, 2)):
        m, z = s_integral_log(A, B)
        s0 = math.sqrt(A / B)

        def f(s, A=A, B=B, z=z):
            safe = np.where(s > 0, s, 1.0)
            return np.where(s > 0, np.exp(-A / safe - B * s + z), 0.0)

        lo = integrate_1d(f, 0.0, s0, QuadSpec(1e-12), vectorized=True)
        hi = integrate_1d(f, s0, math.inf, QuadSpec(1e-12, transform=SemiInfiniteRational(s0)),
                          vectorized=True)
        worst = max(worst, abs((lo.value + hi.value) / float(m) - 1.0))
    c.require("max relative deviation", worst < 1e-6, f"{worst:.2e} over {samples} samples")
    return c


@_timed
def check_dual_path() -> Check:
    c = Check(3, "kernel-M path vs reduced path")
    flat = PlateSystem(GOLD, GOLD, Flat(), Flat(), 200e-9, 200e-9)
    e_main = energy_per_area(flat, benchmark_spec()).e_per_area
    e_flat = flat_plate_energy(GOLD, GOLD, 200e-9, benchmark_spec()).e_per_area
    e_ker = energy_kernel_path(flat)
    c.require("flat gold energy, kernel vs reduced", abs(e_ker / e_main - 1) < 0.01,
              f"{e_ker:.6e} vs {e_main:.6e}")
    c.require("flat gold energy, kernel vs flat formula", abs(e_ker / e_flat - 1) < 0.01,
              f"{e_ker:.6e} vs {e_flat:.6e}")
    shallow = PlateSystem(GOLD, GOLD, Sinusoid(2e-9), Sinusoid(2e-9), 500e-9, 200e-9)
    for b in (0.1, 0.25, 0.4):
        _, de = energy_kernel_path(shallow.with_(b=b), with_db=True)
        fk = -de / shallow.lam
        fm = _force_at(EnergyEngine(shallow), b, benchmark_spec())[0].f_per_area
        c.require(f"shallow sinusoid force b={b}", abs(fk / fm - 1) < 0.02,
                  f"{fk:.6e} vs {fm:.6e}")
    return c


@_timed
def check_sinusoid_figure(step: float = 0.01) -> Check:
    c = Check(4, "sinusoidal gold gratings")
    grid = np.round(np.arange(0.0, 0.5 + step / 2, step), 10)
    expected = {220e-9: 0.43, 230e-9: 0.41, 240e-9: 0.39}
    for H, b_star in expected.items():
        sysm = sinusoid_gold(H)
        pts = lateral_force_curve(sysm, list(grid) + [-0.05, -0.1])
        by_b = {round(p.b, 10): p for p in pts}
        mags = [abs(by_b[b].f_per_area) for b in grid]
        i = int(np.argmax(mags))
        c.require(f"argmax H={H * 1e9:.0f} nm", abs(grid[i] - b_star) <= 0.02 + 1e-9,
                  f"{grid[i]:.2f} vs {b_star}")
        fmax = max(mags)
        if H == 220e-9:
            c.require("max F/A at 220 nm > 15 N/m^2", fmax > 15.0, f"{fmax:.3f} N/m^2")
        for b0 in (0.0, 0.5):
            p = by_b[b0]
            c.require(f"F({b0}) vanishes H={H * 1e9:.0f} nm",
                      abs(p.f_per_area) <= 2 * p.err_est + 1e-12 * fmax,
                      f"{p.f_per_area:.2e} vs err {p.err_est:.2e}")
        shelf = max(abs(p.f_per_area) for p in pts if abs(p.b) <= 0.1 + 1e-12)
        c.require(f"shelf H={H * 1e9:.0f} nm", shelf <= 0.05 * fmax,
                  f"{shelf / fmax:.3f} of max")
    return c


@_timed
def check_sawtooth_figure(step: float = 0.02) -> Check:
    c = Check(5, "sawtooth gold gratings")
    sysm = sawtooth_gold()
    grid = list(np.round(np.arange(0.0, 1.0 + step / 2, step), 10))
    roots, vals = sign_changes(sysm, grid)
    roots = sorted(r for r in roots if 0.0 < r < 1.0)
    c.require("exactly two sign changes in (0, 1)", len(roots) == 2,
              ", ".join(f"{r:.4f}" for r in roots))
    if len(roots) == 2:
        target = np.array([0.14, 0.89])
        direct = np.abs(np.array(roots) - target).max()
        reflected = np.abs(np.sort(1.0 - np.array(roots)) - target).max()
        c.require("sign-change locations", min(direct, reflected) <= 0.03,
                  f"{roots[0]:.3f}, {roots[1]:.3f} (reflected "
                  f"{1 - roots[1]:.3f}, {1 - roots[0]:.3f})")
    eng = EnergyEngine(sysm)
    spec = production_spec()
    p0 = _force_at(eng, 0.0, spec)[0]
    c.require("F(0) != 0", abs(p0.f_per_area) > 2 * p0.err_est,
              f"{p0.f_per_area:.3e} vs err {p0.err_est:.1e}")
    worst = 0.0
    for b in (0.1, 0.2, 0.3, 0.4):
        fp, fm = _force_at(eng, b, spec)[0], _force_at(eng, -b, spec)[0]
        worst = max(worst, abs(fp.f_per_area + fm.f_per_area) - 2 * (fp.err_est + fm.err_est))
    c.require("oddness violated", worst > 0, f"excess |F(b)+F(-b)| {worst:.3e} N/m^2")
    return c


@_timed
def check_rectangular_figure(H: float = 6.5e-6, name: str = "rectangular silicon gratings",
                             number: int = 6) -> Check:
    c = Check(number, f"{name} (H = {H * 1e6:g} um)")
    sysm = rectangular_silicon(H)
    grid = [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5]
    pts = {round(p.b, 10): p for p in lateral_force_curve(
        sysm, grid + [-b for b in grid[1:]])}
    fmax = max(abs(p.f_per_area) for p in pts.values())
    odd = max(abs(pts[b].f_per_area + pts[-b].f_per_area) - 2 * (pts[b].err_est + pts[-b].err_est)
              for b in grid[1:])
    c.require("odd in b", odd <= 1e-9 * fmax, f"excess {odd:.2e}")
    for b0 in (0.0, 0.5, -0.5):
        p = pts[b0]
        c.require(f"zero at b={b0}", abs(p.f_per_area) <= 2 * p.err_est + 1e-9 * fmax,
                  f"{p.f_per_area:.2e}")
    plateau = [abs(pts[b].f_per_area) for b in grid if 0.05 < b < 0.4 + 1e-12]
    var = (max(plateau) - min(plateau)) / max(plateau)
    c.require("plateau variation < 10%", var < 0.10, f"{var:.1%}")
    c.require("max |F|/A within 3x of 0.003 N/m^2", 0.001 <= fmax <= 0.009,
              f"{fmax:.3e} N/m^2")
    return c


@_timed
def check_pfa_figure() -> Check:
    c = Check(7, "PFA plate-sphere force")
    setup = pfa_gold()
    grid = [0.0] + [round(x, 10) for x in np.arange(0.26, 0.4601, 0.02)]
    pts = pfa_sphere_curve(setup, grid)
    by_b = {round(p.b, 10): p for p in pts}
    mags = {b: abs(p.F) for b, p in by_b.items()}
    b_star = max(mags, key=mags.get)
    fmax_pN = mags[b_star] * 1e12
    c.require("max |F| within 25% of 89.7 pN", abs(fmax_pN / 89.7 - 1) <= 0.25,
              f"{fmax_pN:.2f} pN")
    c.require("argmax b = 0.36 +- 0.04", abs(b_star - 0.36) <= 0.04 + 1e-9, f"{b_star:.2f}")
    p0 = by_b[0.0]
    c.require("F(0) = 0", abs(p0.F) <= 2 * p0.err_est + 1e-9 * mags[b_star], f"{p0.F:.2e} N")
    doubled = pfa_sphere_curve(SphereSetup(setup.system, 2 * setup.R), [b_star])[0]
    lin = abs(doubled.F / (2 * by_b[b_star].F) - 1)
    c.require("linear in R", lin < 1e-12, f"relative deviation {lin:.1e}")
    return c


@_timed
def check_properties() -> Check:
    c = Check(8, "property suite")
    spec = benchmark_spec()
    base = sinusoid_gold(230e-9)
    e = [r.e_per_area for r in energy_vs_b(base, [0.23, 1.23, -0.77], spec)]
    per = max(abs(e[1] / e[0] - 1), abs(e[2] / e[0] - 1))
    c.require("b-periodicity", per < 1e-10, f"{per:.1e}")

    grid = np.arange(20) / 20.0
    f = np.array([p.f_per_area for p in lateral_force_curve(base, grid)])
    mean = abs(f.mean()) / np.abs(f).max()
    c.require("zero mean of F over a period", mean < 1e-3, f"{mean:.1e} of max")

    mixed = PlateSystem(GOLD, SILICON, Sinusoid(120e-9), Sinusoid(80e-9), 500e-9, 230e-9, 0.3)
    swapped = PlateSystem(SILICON, GOLD, Sinusoid(80e-9), Sinusoid(120e-9), 500e-9, 230e-9, 0.3)
    ea = energy_per_area(mixed, spec).e_per_area
    eb = energy_per_area(swapped, spec).e_per_area
    c.require("plate exchange", abs(eb / ea - 1) < 1e-4, f"{abs(eb / ea - 1):.1e}")

    pc = PerfectConductor()
    sig = 3.7
    s1 = PlateSystem(pc, pc, Sinusoid(40e-9), Sinusoid(30e-9), 400e-9, 150e-9, 0.2)
    s2 = PlateSystem(pc, pc, Sinusoid(sig * 40e-9), Sinusoid(sig * 30e-9), sig * 400e-9,
                     sig * 150e-9, 0.2)
    e1 = energy_per_area(s1, spec).e_per_area
    e2 = energy_per_area(s2, spec).e_per_area
    sc = abs(e2 * sig**3 / e1 - 1)
    c.require("perfect-conductor length scaling", sc < 1e-6, f"{sc:.1e}")

    hs = [210e-9, 220e-9, 250e-9, 300e-9, 400e-9]
    es = [abs(energy_per_area(sinusoid_gold(H).with_(b=0.25), spec).e_per_area) for H in hs]
    c.require("|E| decreasing in H", all(a > b for a, b in zip(es, es[1:])),
              ", ".join(f"{x:.3e}" for x in es))

    plan1 = SweepPlan(base, (0.0, 0.15, 0.3, 0.45), (230e-9, 240e-9, 250e-9), production_spec(),
                      workers=1)
    plan2 = SweepPlan(base, (0.45, 0.3, 0.15, 0.0), (250e-9, 230e-9, 240e-9), production_spec(),
                      workers=4)
    same = run_sweep(plan1).to_csv() == run_sweep(plan2).to_csv()
    c.require("identical tables for 1 and 4 workers", same, "byte comparison of CSV")

    fa = lateral_force_analytic(base, 0.3)
    fd = _force_at(EnergyEngine(base), 0.3, production_spec())[0]
    dev = abs(fa - fd.f_per_area)
    c.require("finite difference vs analytic derivative", dev <= max(3 * fd.err_est,
              1e-6 * abs(fa)), f"{dev:.1e} (err est {fd.err_est:.1e})")
    return c


CHECKS = {1: check_flat_benchmark, 2: check_s_integral, 3: check_dual_path,
          4: check_sinusoid_figure, 5: check_sawtooth_figure, 6: check_rectangular_figure,
          7: check_pfa_figure, 8: check_properties}
QUICK = (1, 2, 3)


def run_checks(quick: bool = False, only=None) -> list[Check]:
    numbers = sorted(only) if only else (QUICK if quick else sorted(CHECKS))
    return [CHECKS[n]() for n in numbers]
