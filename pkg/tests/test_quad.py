import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casilat.errors import DomainError, NonFiniteIntegrandError
from casilat.quad import (
    RULES, QuadSpec, SemiInfiniteExp, SemiInfiniteRational, SqrtEndpoint, composite_rule,
    graded_edges, integrate_1d, integrate_nested, subdivide,
)


@pytest.mark.parametrize("order", [15, 21])
def test_rules_exact_for_polynomials(order):
    x, wk, wg = RULES[order]
    n_gauss = (order - 1) // 2
    for deg in range(0, 3 * n_gauss + 2):
        exact = (1 - (-1) ** (deg + 1)) / (deg + 1)
        assert wk @ x**deg == pytest.approx(exact, abs=1e-14)
    for deg in range(0, 2 * n_gauss):
        exact = (1 - (-1) ** (deg + 1)) / (deg + 1)
        assert wg @ x**deg == pytest.approx(exact, abs=1e-14)


def test_basic_examples():
    r = integrate_1d(lambda x: x * x, 0.0, 1.0)
    assert abs(r.value - 1 / 3) < 1e-12 and r.converged
    r = integrate_1d(np.exp, 0.0, 1.0, vectorized=True)
    assert r.value == pytest.approx(math.e - 1, rel=1e-14)
    r = integrate_1d(lambda x: math.exp(-x), 0.0, math.inf, QuadSpec(transform=SemiInfiniteExp()))
    assert abs(r.value - 1) < 1e-10
    r = integrate_1d(lambda t: t**-0.5, 0.0, 1.0, QuadSpec(transform=SqrtEndpoint()))
    assert abs(r.value - 2) < 1e-10
    r = integrate_1d(lambda x: 1 / (1 + x * x), 0.0, math.inf,
                     QuadSpec(transform=SemiInfiniteRational(1.0)))
    assert r.value == pytest.approx(math.pi / 2, rel=1e-10)


def test_nested_examples():
    r = integrate_nested(lambda x, y: x * y, [(0, 1, QuadSpec()), (0, 1, QuadSpec())])
    assert r.value == pytest.approx(0.25, rel=1e-12)
    e = QuadSpec(transform=SemiInfiniteExp())
    r = integrate_nested(lambda x, y: math.exp(-x - y), [(0, math.inf, e), (0, math.inf, e)])
    assert r.value == pytest.approx(1.0, rel=1e-10)
    axes = [(0, 1, QuadSpec()), (0, math.inf, e), (0, 1, QuadSpec(transform=SqrtEndpoint()))]
    r = integrate_nested(lambda x, y, t: x * x * math.exp(-y) * t**-0.5, axes)
    assert r.value == pytest.approx(2 / 3, rel=1e-9)


def test_nan_reports_abscissa():
    with pytest.raises(NonFiniteIntegrandError) as e:
        integrate_1d(lambda x: math.nan if x > 0.5 else 1.0, 0.0, 1.0)
    assert e.value.abscissa > 0.5


def test_nested_failure_carries_axis():
    with pytest.raises(NonFiniteIntegrandError) as e:
        integrate_nested(lambda x, y: math.nan if y > 0.9 else x,
                         [(0, 1, QuadSpec()), (0, 1, QuadSpec())])
    assert e.value.axis == 1


def test_non_convergence_flagged():
    r = integrate_1d(lambda x: math.sin(1 / x) if x > 0 else 0.0, 0.0, 1.0,
                     QuadSpec(rel_tol=1e-12, max_subdivisions=5))
    assert not r.converged


def test_converged_implies_tolerance_met():
    spec = QuadSpec(rel_tol=1e-9)
    r = integrate_1d(lambda x: math.sqrt(x), 0.0, 1.0, spec)
    assert r.converged and r.err_est <= spec.rel_tol * abs(r.value)
    assert r.value == pytest.approx(2 / 3, rel=1e-9)


@pytest.mark.parametrize("kw", [dict(rel_tol=0.0), dict(abs_tol=-1.0), dict(max_subdivisions=0),
                                dict(panel_order=11), dict(transform=SemiInfiniteExp(0.0))])
def test_spec_invariants(kw):
    with pytest.raises(DomainError):
        QuadSpec(**kw)


def test_deterministic():
    f = lambda x: math.exp(-x) * math.cos(3 * x)  # noqa: E731
    spec = QuadSpec(transform=SemiInfiniteExp(0.5))
    a = integrate_1d(f, 0.0, math.inf, spec)
    b = integrate_1d(f, 0.0, math.inf, spec)
    assert a == b


@pytest.mark.parametrize("alpha", [-1.0, 2.0, 1e6])
def test_linearity(alpha):
    f = lambda x: math.log1p(x) / (1 + x * x)  # noqa: E731
    spec = QuadSpec(transform=SemiInfiniteRational(1.0))
    a = integrate_1d(f, 0.0, math.inf, spec).value
    b = integrate_1d(lambda x: alpha * f(x), 0.0, math.inf, spec).value
    assert b == pytest.approx(alpha * a, rel=1e-13)


def test_tighter_tolerance_never_worse():
    f = lambda x: 1.0 / (1e-2 + x * x)  # noqa: E731
    exact = 2 * math.atan(10.0) * 10.0
    ref = integrate_1d(f, -1.0, 1.0, QuadSpec(rel_tol=1e-14)).value
    assert ref == pytest.approx(exact, rel=1e-13)
    errs = [abs(integrate_1d(f, -1.0, 1.0, QuadSpec(rel_tol=t)).value - ref)
            for t in (1e-3, 5e-4, 2.5e-4, 1.25e-4, 6e-5, 3e-5)]
    assert all(b <= a * (1 + 1e-12) or b < 1e-14 * exact for a, b in zip(errs, errs[1:]))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.integers(0, 6))
def test_polynomial_moments(a, b, n):
    # int_0^a b x^n dx
    r = integrate_1d(lambda x: b * x**n, 0.0, a)
    assert r.value == pytest.approx(b * a ** (n + 1) / (n + 1), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 20.0))
def test_semi_infinite_exponential_scale(k):
    r = integrate_1d(lambda x: math.exp(-k * x), 0.0, math.inf,
                     QuadSpec(rel_tol=1e-11, transform=SemiInfiniteExp(1.0 / k)))
    assert r.value == pytest.approx(1.0 / k, rel=1e-10)


def test_composite_helpers():
    edges = graded_edges(0.0, 1.0, 0.3, 0.01)
    assert edges[0] == 0.0 and edges[-1] == 1.0 and np.all(np.diff(edges) > 0)
    assert np.any(np.isclose(edges, 0.3))
    fine = subdivide(edges, 4)
    assert len(fine) == 4 * (len(edges) - 1) + 1
    x, wk, wg = composite_rule(fine, 21)
    assert wk.sum() == pytest.approx(1.0, rel=1e-14)
    assert wk @ np.cos(x) == pytest.approx(math.sin(1.0), rel=1e-14)
