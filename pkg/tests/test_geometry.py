import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casilat.errors import ConfigError, DomainError, GeometryOverlapError
from casilat.geometry import (
    Flat, PlateSystem, Rectangular, Sawtooth, Sinusoid, TabulatedPeriodic, gap_bounds,
    height, height2_shifted, min_gap, profile_from_config, profile_to_config,
)
from casilat.material import GOLD, SILICON

LAM = 500e-9
PROFILES = [Flat(), Sinusoid(120e-9), Sawtooth(55e-9), Sawtooth(55e-9, rising=False),
            Rectangular(6e-6, 5 / 9), TabulatedPeriodic((0.0, 1e-9, 3e-9, -2e-9))]


def test_height_examples():
    assert height(Sinusoid(120e-9), LAM / 4, LAM) == pytest.approx(120e-9, rel=1e-15)
    assert height(Sawtooth(55e-9), LAM / 2, LAM) == pytest.approx(0.0, abs=1e-22)
    assert height(Rectangular(6e-6, 5 / 9), 0.3 * 9e-6, 9e-6) == 6e-6
    assert height(Rectangular(6e-6, 5 / 9), 0.6 * 9e-6, 9e-6) == 0.0
    assert height(Flat(), 1.234, LAM) == 0.0


def test_sawtooth_orientation():
    rising, falling = Sawtooth(1.0), Sawtooth(1.0, rising=False)
    x = np.linspace(0.01, 0.99, 7) * LAM
    np.testing.assert_allclose(height(falling, x, LAM), height(rising, -x, LAM), atol=1e-12)
    assert height(rising, 0.25 * LAM, LAM) == pytest.approx(-0.5)


@settings(max_examples=100, deadline=None)
@given(st.floats(-5.0, 5.0), st.integers(-3, 3))
def test_height_is_periodic(s, k):
    # rounding of s + k can move a point across a jump, so stay clear of them
    lam = 1.0
    for p in PROFILES:
        if any(abs(((s - j + 0.5) % 1.0) - 0.5) < 1e-9 for j in p.jumps()):
            continue
        assert height(p, s + k, lam) == pytest.approx(height(p, s, lam), abs=1e-9)


def test_shifted_heights():
    sysm = PlateSystem(GOLD, GOLD, Sinusoid(120e-9), Sinusoid(80e-9), LAM, 220e-9)
    assert height2_shifted(sysm.with_(b=0.5), 0.0) == pytest.approx(0.0, abs=1e-22)
    assert height2_shifted(sysm.with_(b=0.25), 0.0) == pytest.approx(80e-9, rel=1e-15)
    x = np.linspace(0, LAM, 11)
    np.testing.assert_allclose(height2_shifted(sysm.with_(b=1.0), x),
                               height2_shifted(sysm, x), atol=1e-20)
    np.testing.assert_allclose(height2_shifted(sysm.with_(b=0.1), x),
                               80e-9 * np.sin(2 * np.pi * x / LAM + 2 * np.pi * 0.1), atol=1e-20)


def test_min_gap_examples():
    s = PlateSystem(GOLD, GOLD, Sinusoid(120e-9), Sinusoid(80e-9), LAM, 220e-9)
    assert min_gap(s) == pytest.approx(20e-9)
    assert min_gap(s.with_(b=0.37)) == min_gap(s)
    assert min_gap(PlateSystem(GOLD, GOLD, Flat(), Flat(), LAM, 1e-7)) == 1e-7
    r = PlateSystem(SILICON, SILICON, Rectangular(6e-6, 5 / 9), Rectangular(6e-6, 5 / 9),
                    9e-6, 6.5e-6)
    assert min_gap(r) == pytest.approx(0.5e-6)
    assert gap_bounds(r) == pytest.approx((0.5e-6, 12.5e-6))
    saw = PlateSystem(GOLD, GOLD, Sawtooth(55e-9), Sawtooth(70e-9), 530e-9, 140e-9)
    assert min_gap(saw) == pytest.approx(15e-9)


def test_overlap_rejected():
    s = PlateSystem(GOLD, GOLD, Sinusoid(120e-9), Sinusoid(80e-9), LAM, 200e-9)
    with pytest.raises(GeometryOverlapError):
        min_gap(s)


@pytest.mark.parametrize("bad", [dict(lam=0.0), dict(H=-1e-9)])
def test_system_invariants(bad):
    kw = dict(lam=LAM, H=1e-7) | bad
    with pytest.raises(DomainError):
        PlateSystem(GOLD, GOLD, Flat(), Flat(), **kw)


def test_profile_invariants():
    with pytest.raises(DomainError):
        Rectangular(1e-6, 1.0)
    with pytest.raises(DomainError):
        PlateSystem(GOLD, GOLD, Sinusoid(-1e-9), Flat(), LAM, 1e-7)
    with pytest.raises(DomainError):
        TabulatedPeriodic((0.0, float("nan")))


@pytest.mark.parametrize("p", PROFILES)
def test_config_round_trip(p):
    assert profile_from_config(profile_to_config(p)) == p


def test_config_errors():
    with pytest.raises(ConfigError) as e:
        profile_from_config({"shape": "sinusoid", "a": 1e-9}, "profile1")
    assert e.value.path == "profile1.a"
    with pytest.raises(ConfigError) as e:
        profile_from_config({"shape": "rectangular", "a_m": 1e-6}, "profile2")
    assert e.value.path == "profile2.f"
