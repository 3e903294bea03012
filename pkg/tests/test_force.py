import math
import warnings

import numpy as np
import pytest

from casilat.constants import HBAR_C
from casilat.energy import benchmark_spec, energy_vs_b
from casilat.force import (
    DB_STEP, SphereSetup, lateral_force_analytic, lateral_force_curve, lateral_force_per_area,
    normal_force_per_area, pfa_sphere_curve, pfa_sphere_force,
)
from casilat.geometry import Flat, PlateSystem, Rectangular, Sawtooth, Sinusoid
from casilat.material import GOLD, SILICON, PerfectConductor

PC = PerfectConductor()


def sinusoids(H=230e-9):
    return PlateSystem(GOLD, GOLD, Sinusoid(120e-9), Sinusoid(80e-9), 500e-9, H)


def test_normal_force_flat_pc():
    H = 1e-6
    sysm = PlateSystem(PC, PC, Flat(), Flat(), H, H)
    f = normal_force_per_area(sysm, benchmark_spec())
    exact = -3 * 69 * HBAR_C / (640 * math.pi**2 * H**4)
    assert f.f_per_area == pytest.approx(exact, rel=1e-2)
    assert f.f_per_area < 0
    f2 = normal_force_per_area(sysm.with_(H=2 * H), benchmark_spec())
    assert abs(f2.f_per_area) < abs(f.f_per_area)
    f3 = normal_force_per_area(sysm.with_(b=0.37), benchmark_spec())
    assert f3.f_per_area == pytest.approx(f.f_per_area, rel=1e-12)


def test_lateral_force_is_minus_energy_slope():
    sysm = sinusoids()
    b = 0.3
    h = 1e-3
    e = energy_vs_b(sysm, [b - h, b + h], benchmark_spec())
    slope = -(e[1].e_per_area - e[0].e_per_area) / (2 * h) / sysm.lam
    f = lateral_force_per_area(sysm, b, benchmark_spec())
    assert f.f_per_area == pytest.approx(slope, rel=1e-4)
    assert f.err_est >= 0 and f.converged and f.step_ok


def test_flat_plates_no_lateral_force():
    f = lateral_force_per_area(PlateSystem(GOLD, GOLD, Flat(), Flat(), 500e-9, 200e-9), 0.3)
    assert abs(f.f_per_area) < 1e-12


def test_curve_sorted_periodic_and_zero_mean():
    sysm = sinusoids()
    grid = np.arange(20) / 20
    pts = lateral_force_curve(sysm, grid[::-1])
    assert [p.b for p in pts] == sorted(p.b for p in pts)
    f = np.array([p.f_per_area for p in pts])
    assert abs(f.mean()) < 1e-6 * np.abs(f).max()
    shifted = lateral_force_curve(sysm, grid + 1.0)
    for p, q in zip(pts, shifted):
        assert q.f_per_area == pytest.approx(p.f_per_area, abs=2 * (p.err_est + q.err_est) + 1e-12)


@pytest.mark.parametrize("sysm", [
    sinusoids(),
    PlateSystem(SILICON, SILICON, Rectangular(6e-6, 5 / 9), Rectangular(6e-6, 5 / 9), 9e-6, 6.3e-6),
])
def test_odd_with_symmetry_zeros(sysm):
    pts = {round(p.b, 12): p for p in
           lateral_force_curve(sysm, [-0.5, -0.4, -0.2, 0.0, 0.2, 0.4, 0.5])}
    scale = max(abs(p.f_per_area) for p in pts.values())
    for b in (0.2, 0.4):
        p, m = pts[b], pts[-b]
        assert abs(p.f_per_area + m.f_per_area) <= 2 * (p.err_est + m.err_est) + 1e-9 * scale
    for b in (0.0, 0.5, -0.5):
        assert abs(pts[b].f_per_area) <= 2 * pts[b].err_est + 1e-9 * scale


def test_sawtooth_neither_odd_nor_even():
    sysm = PlateSystem(GOLD, GOLD, Sawtooth(55e-9), Sawtooth(70e-9), 530e-9, 140e-9)
    pts = lateral_force_curve(sysm, np.linspace(0, 1, 21)[:-1])
    f = np.array([p.f_per_area for p in pts])
    err = max(p.err_est for p in pts)
    assert abs(f.max() + f.min()) > 4 * err
    assert abs(pts[0].f_per_area) > 2 * pts[0].err_est


def test_ramp_orientation_reflects_curve():
    rising = PlateSystem(GOLD, GOLD, Sawtooth(55e-9), Sawtooth(70e-9), 530e-9, 140e-9)
    falling = PlateSystem(GOLD, GOLD, Sawtooth(55e-9, False), Sawtooth(70e-9, False), 530e-9, 140e-9)
    for b in (0.1, 0.3):
        fr = lateral_force_per_area(rising, b).f_per_area
        ff = lateral_force_per_area(falling, -b).f_per_area
        assert ff == pytest.approx(-fr, rel=1e-6)


def test_decay_with_separation():
    f = [abs(lateral_force_per_area(sinusoids(H), 0.4).f_per_area) for H in (220e-9, 230e-9, 240e-9)]
    assert f[0] > f[1] > f[2]


def test_finite_difference_matches_analytic_derivative():
    sysm = sinusoids()
    for b in (0.12, 0.3, 0.45):
        fd = lateral_force_per_area(sysm, b)
        an = lateral_force_analytic(sysm, b, level=1)
        assert abs(fd.f_per_area - an) <= 3 * fd.err_est + 1e-6 * abs(an)


def test_step_default():
    assert DB_STEP == 0.005


# -- sphere ---------------------------------------------------------------------

def small_pfa(R=50e-6, h_max=None):
    sysm = PlateSystem(GOLD, GOLD, Sinusoid(40e-9), Sinusoid(20e-9), 300e-9, 120e-9)
    return SphereSetup(sysm, R, h_max)


def test_sphere_setup_invariants():
    s = small_pfa()
    assert s.h_max == pytest.approx(120e-9 + 6 * 300e-9)
    with pytest.raises(ValueError):
        small_pfa(h_max=100e-9)
    with pytest.warns(RuntimeWarning):
        small_pfa(R=1e-6)


def test_pfa_linear_in_radius_and_sign():
    a = pfa_sphere_force(small_pfa(), 0.3)
    b = pfa_sphere_force(small_pfa(R=100e-6), 0.3)
    assert b.F == 2 * a.F
    # lateral pressure and sphere force have opposite sign: F_ps = -2 pi R int F dH
    f = lateral_force_per_area(small_pfa().system, 0.3).f_per_area
    assert np.sign(a.F) == -np.sign(f)
    zero = pfa_sphere_force(small_pfa(), 0.0)
    assert abs(zero.F) <= 2 * zero.err_est + 1e-9 * abs(a.F)


def test_pfa_tail_guard():
    with pytest.raises(ValueError, match="h_max"):
        pfa_sphere_curve(small_pfa(h_max=120e-9 + 0.3e-7), [0.3])
