"""Independent reference computations used only by the tests.

``brute_energy`` evaluates the five-fold (q, v, kappa, x, u) energy integral
directly from ``integrand_reduced`` on a fixed tensor grid: no kernel tables,
no contrast-moment spline, no image sums. The u-axis is truncated at eight
periods rather than summed over images, and a sinh map concentrates nodes
near u = 0.
"""
import math

import numpy as np
from scipy.special import roots_genlaguerre, roots_legendre

from casilat.constants import HBAR_C
from casilat.geometry import gap_bounds, height
from casilat.kernel import DimlessGeometry, KernelPoint, contrast_product, integrand_reduced


def _legendre01(n):
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


def brute_energy(system, nq=8, nv=24, nw=24, nx=32, nt=240):
    """E/A in J/m^2 on a coarse tensor grid."""
    H, lam = system.H, system.lam
    lt = lam / H
    h1 = lambda xt: height(system.profile1, xt * H, lam) / H  # noqa: E731
    h2 = lambda xt: height(system.profile2, xt * H + system.b * lam, lam) / H  # noqa: E731
    cf = contrast_product(system.material1, system.material2, H)
    dmin = gap_bounds(system)[0] / H
    geom = DimlessGeometry(lt, lambda x, xp: 1 + h2(x) - h1(xp), dmin)
    qg, qw = _legendre01(nq)
    vg, vw = _legendre01(nv)
    # kappa = w / (2 p r_v); the Laguerre weight exp(-w) is divided back out
    wg, ww = roots_genlaguerre(nw, 0.0)
    xg = (np.arange(nx) + 0.5) * lt / nx
    xw = lt / nx
    T = math.asinh(8 * lt / dmin)
    tg = np.linspace(-T, T, nt)
    tw = np.full(nt, tg[1] - tg[0])
    tw[[0, -1]] *= 0.5
    ug = dmin * np.sinh(tg)
    uw = tw * dmin * np.cosh(tg)
    X, U = np.meshgrid(xg, ug, indexing="ij")
    D = geom.gap_t(X, X - U)
    total = 0.0
    for q, qwt in zip(qg, qw):
        p = 1.0 / q
        for v, vwt in zip(vg, vw):
            r = np.sqrt(U**2 + (D / v) ** 2)
            for w, wwt in zip(wg, ww):
                k = w / (2 * p * r)
                val = integrand_reduced(KernelPoint(p, v, k, X, U), geom, cf(k), 1.0)
                jac = math.exp(w) / (2 * p * r)
                total += qwt / q**2 * 2 * vwt * wwt * xw * np.sum(val * jac * uw[None, :])
    return -HBAR_C / (8 * math.pi**3 * H**3 * lt) * total
