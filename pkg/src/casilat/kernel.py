"""Integrand of the six-fold energy representation and its reductions.

Everything here is dimensionless: lengths in units of the mean separation H,
frequencies as kappa = zeta*H/c.

Main evaluation path
--------------------
With the s-axis done in closed form (K1) the pair kernel is

    K(u, D) = int_1^inf dp (2p^4-2p^2+1) int_0^1 2dv int_0^inf dkappa
              kappa^3 C(kappa) S(kappa^2 (u^2 + D^2/v^2)/4, 4p^2),

C = contrast product. Moving kappa innermost and writing w = 2 p kappa r_v,
r_v = sqrt(u^2 + D^2/v^2), gives a one-dimensional contrast moment

    Phi(lam) = int_0^inf dw w^4 K1(w) C(w/lam)

and, with p = 1/q,

    K(u, D) = 1/32 int_0^1 dq (2 - 2q^2 + q^4) int_0^1 dv Phi(2 r_v/q) / r_v^4.

For a perfect conductor Phi = 144 and the v-integral is elementary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline, RectBivariateSpline
from scipy.special import j0, k1e, zeta as hurwitz_zeta

from .constants import C as C_LIGHT
from .errors import DomainError
from .material import DielectricModel, cm_contrast, static_contrast
from .quad import QuadResult, QuadSpec, SemiInfiniteExp, composite_rule, graded_edges, \
    integrate_1d, integrate_nested

POLY_Q_INTEGRAL = 23.0 / 15.0  # int_0^1 (2 - 2q^2 + q^4) dq
K1_MOMENT = 16.0  # int_0^inf w^4 K1(w) dw


def bessel_k1_scaled(z):
    """exp(z) * K1(z) for z > 0."""
    z = np.asarray(z, dtype=float)
    if np.any(~(z > 0)):
        raise DomainError("bessel_k1_scaled needs z > 0")
    out = k1e(z)
    return float(out) if out.ndim == 0 else out


def s_integral_log(A, B):
    """(mantissa, exponent) with int_0^inf exp(-A/s - B s) ds = mantissa * exp(-exponent)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if np.any(~(A > 0)) or np.any(~(B > 0)):
        raise DomainError("s_integral needs A > 0 and B > 0")
    z = 2.0 * np.sqrt(A * B)
    return 2.0 * np.sqrt(A / B) * k1e(z), z


def s_integral_closed(A, B):
    """int_0^inf exp(-A/s - B s) ds = 2 sqrt(A/B) K1(2 sqrt(A B))."""
    m, z = s_integral_log(A, B)
    out = m * np.exp(-z)
    return float(out) if np.ndim(out) == 0 else out


# -- point integrand ----------------------------------------------------------

@dataclass(frozen=True)
class DimlessGeometry:
    lambda_t: float
    gap_t: Callable  # gap_t(x_t, xp_t) -> D = 1 + (h2(x; b) - h1(x'))/H
    dmin_t: float

    def __post_init__(self):
        if not self.dmin_t > 0:
            raise DomainError("dimensionless minimum gap must be positive")


@dataclass(frozen=True)
class KernelPoint:
    p: float
    v: float
    kappa_t: float
    x_t: float
    u_t: float


def poly_p(p):
    return 2.0 * p**4 - 2.0 * p**2 + 1.0


def integrand_reduced(pt: KernelPoint, geom: DimlessGeometry, c1, c2):
    """(2p^4 - 2p^2 + 1) kappa^3 c1 c2 S(A, 4p^2), A = kappa^2 (u^2 + D^2/v^2)/4.

    The factor 2 from dt t^(-1/2) = 2 dv is not included. Array-valued fields
    in ``pt`` broadcast.
    """
    p, v, k = np.asarray(pt.p, float), np.asarray(pt.v, float), np.asarray(pt.kappa_t, float)
    D = np.asarray(geom.gap_t(pt.x_t, np.asarray(pt.x_t) - pt.u_t), float)
    c12 = np.asarray(c1, float) * np.asarray(c2, float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        A = 0.25 * k * k * (np.asarray(pt.u_t, float) ** 2 + (D / v) ** 2)
        B = 4.0 * p * p
        z = 2.0 * np.sqrt(A * B)
        # z -> 0 (kappa underflow) has the finite limit S = 1/B
        s = np.where(z > 0, 2.0 * np.sqrt(A / B) * k1e(z) * np.exp(-z), 1.0 / B)
        s = np.where(np.isinf(A), 0.0, s)  # v -> 0: infinitely damped
    out = np.where((k > 0) & (v > 0) & (c12 != 0), poly_p(p) * k**3 * c12 * s, 0.0)
    return float(out) if out.ndim == 0 else out


# -- contrast moment ----------------------------------------------------------

def contrast_product(m1: DielectricModel, m2: DielectricModel, H: float):
    """kappa -> c1(zeta) c2(zeta) with zeta = c kappa / H."""
    scale = C_LIGHT / H

    def f(kappa):
        z = np.asarray(kappa, float) * scale
        return np.asarray(cm_contrast(m1, z), float) * np.asarray(cm_contrast(m2, z), float)

    return f


class ContrastMoment:
    """Phi(lam) = int_0^inf w^4 K1(w) C(w/lam) dw, cubic spline in log(lam).

    Beyond the upper table edge Phi is held at its static value 16 C(0).
    """

    def __init__(self, m1, m2, H: float, lam_min: float, per_efold: int = 24,
                 rel_tol: float = 1e-12):
        self.cfun = contrast_product(m1, m2, H)
        self.static = K1_MOMENT * static_contrast(m1) * static_contrast(m2)
        self.exact_const = all(type(m).__name__ == "PerfectConductor" for m in (m1, m2))
        if self.exact_const:
            return
        spec = QuadSpec(rel_tol=rel_tol, transform=SemiInfiniteExp(1.0), max_subdivisions=400)

        def phi(lam):
            f = lambda w: w**4 * k1e(w) * np.exp(-w) * self.cfun(w / lam)
            return integrate_1d(f, 0.0, math.inf, spec, vectorized=True).value

        lo = math.log(lam_min) - 0.5
        logs = lo + np.arange(int(60 * per_efold) + 1) / per_efold
        lam = np.exp(logs)
        # fixed composite rule for all lam at once; adaptive fallback where the
        # embedded estimate is not tight enough
        edges = np.concatenate([[0.0], 2.0 ** np.arange(-4, 8, 0.5)])
        wx, wk, wg = composite_rule(edges, 21)
        base = wx**4 * k1e(wx) * np.exp(-wx)
        cv = self.cfun(wx[None, :] / lam[:, None]) * base
        vals = cv @ wk
        err = np.abs(cv @ (wk - wg))
        for i in np.nonzero(err > 1e-11 * np.abs(vals))[0]:
            vals[i] = phi(lam[i])
        settled = np.abs(vals - self.static) <= 1e-11 * abs(self.static)
        # cut the table once Phi has settled onto its static value
        idx = np.nonzero(settled & (np.arange(len(vals)) > 4 * per_efold))[0]
        stop = idx[0] + 1 if len(idx) else len(vals)
        logs, vals = logs[:stop], vals[:stop]
        self.log_lo, self.log_hi = logs[0], logs[-1]
        self.spline = CubicSpline(np.array(logs), np.array(vals))

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.exact_const:
            return np.full(lam.shape, self.static)
        with np.errstate(divide="ignore"):
            lg = np.log(lam)
        if np.any(lg < self.log_lo - 1e-9):
            raise DomainError("contrast moment queried below its table")
        out = self.spline(np.clip(lg, self.log_lo, self.log_hi))
        return np.where(lg > self.log_hi, self.static, out)


def j_v_integral(u, D):
    """int_0^1 v^4/(u^2 v^2 + D^2)^2 dv in closed form."""
    u = np.abs(np.asarray(u, float))
    D = np.asarray(D, float)
    # written in eps = D/u with the u = 0 limit handled separately
    with np.errstate(divide="ignore", invalid="ignore"):
        eps = D / u
        j = 1.0 - 1.5 * eps * np.arctan(1.0 / eps) + 0.5 * eps**2 / (1.0 + eps**2)
        out = j / u**4
    small = u < 0.5 * D
    # sum_k (-1)^k (k+1) r^(2k) / (2k+5) for r = u/D < 1/2
    r2 = np.where(small, (u / D) ** 2, 0.0)
    series = np.zeros_like(r2)
    term = np.ones_like(r2)
    for k in range(60):
        series = series + (k + 1) * term / (2 * k + 5)
        term = -term * r2
    series = series / D**4
    return np.where(small, series, out)


def pair_kernel_direct(u, D, moment: ContrastMoment, nq: int = 2, c_first: float = 0.25):
    """K(u, D) by composite Kronrod quadrature over (q, v); used to build tables
    and in tests. Scalar ``u``, ``D``."""
    u, D = abs(float(u)), float(D)
    qx, qw, _ = composite_rule(np.linspace(0.0, 1.0, nq + 1), 15)
    cth = D / math.hypot(u, D)
    sth = u / math.hypot(u, D)
    edges = _v_edges(cth, sth, c_first)
    vx, vw, _ = composite_rule(edges, 15)
    r = np.sqrt(u * u + (D / vx) ** 2)
    inv_r4 = vx**4 / (u * u * vx * vx + D * D) ** 2
    lam = 2.0 * r[None, :] / qx[:, None]
    ph = moment(lam)
    wq = qw * (2 - 2 * qx**2 + qx**4)
    return float(wq @ ph @ (vw * inv_r4)) / 32.0


def _v_edges(cth, sth, c_first=0.25):
    """Panels for the v-axis, graded towards the transition at v ~ cos/sin."""
    if sth < 1e-12:
        return np.array([0.0, 0.5, 1.0])
    t = cth / sth
    return graded_edges(0.0, 1.0, 0.0, max(min(t * c_first, 0.5), 1e-12))


class KernelTable:
    """Interpolation tables of the pair kernel for one (materials, H, period) set.

    ``direct(u, D)`` is the bare n = 0 kernel; ``images(u, D)`` the sum over all
    other period images (explicit up to ``r_far``, asymptotic Hurwitz-zeta tail
    beyond). ``periodic = direct + images``.
    """

    def __init__(self, m1, m2, H: float, lambda_t: float, dmin_t: float, dmax_t: float,
                 per_efold: int = 16, n_theta: int = 64, far_scale: float = 1.0):
        self.lambda_t = lambda_t
        self.dmin_t, self.dmax_t = dmin_t, dmax_t
        self.moment = ContrastMoment(m1, m2, H, lam_min=2.0 * dmin_t)
        self.static_k = self.moment.static * POLY_Q_INTEGRAL / 32.0
        self.r_far = far_scale * max(20.0 * dmax_t, 4.0 * lambda_t)
        self.n_img = int(math.ceil(self.r_far / lambda_t + 0.5))
        rho_max = (self.n_img + 1.0) * lambda_t + dmax_t
        self._build_w(dmin_t, rho_max, dmax_t, per_efold, n_theta)
        self._build_images()

    # W(log rho, theta) = rho^4 K
    def _build_w(self, dmin, rho_max, dmax, per_efold, n_theta):
        lo = math.log(dmin) - 0.05
        hi = math.log(rho_max) + 0.05
        n_r = max(8, int(math.ceil((hi - lo) * per_efold)) + 1)
        lr = np.linspace(lo, hi, n_r)
        th_max = math.atan2(rho_max, dmin)
        th = np.linspace(0.0, th_max, n_theta)
        rho = np.exp(lr)
        W = np.empty((n_r, n_theta))
        qx, qw, _ = composite_rule(np.array([0.0, 0.5, 1.0]), 15)
        wq = qw * (2 - 2 * qx**2 + qx**4)
        for j, t in enumerate(th):
            c, s = math.cos(t), math.sin(t)
            vx, vw, _ = composite_rule(_v_edges(c, s), 15)
            rv = np.sqrt(s * s + (c / vx) ** 2)  # r_v / rho
            wv = vw * vx**4 / (s * s * vx * vx + c * c) ** 2
            lam = 2.0 * rho[:, None, None] * rv[None, None, :] / qx[None, :, None]
            ph = self.moment(lam)
            W[:, j] = np.einsum("q,rqv,v->r", wq, ph, wv) / 32.0
        self._lr = (lo, hi)
        self._w = RectBivariateSpline(lr, th, W, kx=3, ky=3)

    def direct(self, u, D):
        u = np.abs(np.asarray(u, float))
        D = np.asarray(D, float)
        rho2 = u * u + D * D
        return self._w.ev(0.5 * np.log(rho2), np.arctan2(u, D)) / rho2**2

    def direct_du(self, u, D):
        """d/du of ``direct``."""
        ua = np.abs(np.asarray(u, float))
        D = np.asarray(D, float)
        rho2 = ua * ua + D * D
        lr, th = 0.5 * np.log(rho2), np.arctan2(ua, D)
        W = self._w.ev(lr, th)
        Wr = self._w.ev(lr, th, dx=1)
        Wt = self._w.ev(lr, th, dy=1)
        # d(lr)/du = u/rho^2, d(theta)/du = D/rho^2
        d = (Wr * ua + Wt * D) / rho2**3 - 4.0 * W * ua / rho2**3
        return np.sign(u) * d

    def _far_tail(self, u, D):
        """sum_{|n| > n_img} K(u + n*lam, D) with K ~ static * J(u, D) expanded in D/|x|."""
        L = self.lambda_t
        N = self.n_img
        tot = 0.0
        for sgn in (1.0, -1.0):
            q = N + 1 + sgn * u / L
            z4 = hurwitz_zeta(4.0, q) / L**4
            z5 = hurwitz_zeta(5.0, q) / L**5
            z6 = hurwitz_zeta(6.0, q) / L**6
            tot = tot + z4 - 0.75 * math.pi * D * z5 + 2.0 * D * D * z6
        return self.static_k * tot

    def _build_images(self, n_u=48, n_d=32):
        L = self.lambda_t
        ug = np.linspace(0.0, 0.5 * L, n_u)
        d_hi = self.dmax_t if self.dmax_t > self.dmin_t * (1 + 1e-6) else self.dmin_t * 1.01 + 1e-6
        dg = np.linspace(self.dmin_t, d_hi, n_d)
        U, Dm = np.meshgrid(ug, dg, indexing="ij")
        tot = self._far_tail(U, Dm)
        for n in range(1, self.n_img + 1):
            tot = tot + self.direct(U + n * L, Dm) + self.direct(U - n * L, Dm)
        self._img = RectBivariateSpline(ug, dg, tot, kx=3, ky=3)
        self._img_range = (dg[0], dg[-1])

    def images(self, u, D):
        u = np.asarray(u, float)
        L = self.lambda_t
        uu = np.abs(u - L * np.round(u / L))
        return self._img.ev(uu, D)

    def images_du(self, u, D):
        u = np.asarray(u, float)
        L = self.lambda_t
        w = u - L * np.round(u / L)
        return np.sign(w) * self._img.ev(np.abs(w), D, dx=1)

    def periodic(self, u, D):
        """Sum over all images of K(u + n lam, D); periodic in ``u``."""
        u = np.asarray(u, float)
        w = u - self.lambda_t * np.round(u / self.lambda_t)
        return self.direct(w, D) + self.images(w, D)


@lru_cache(maxsize=32)
def kernel_table(m1, m2, H, lambda_t, dmin_t, dmax_t, far_scale=1.0) -> KernelTable:
    return KernelTable(m1, m2, H, lambda_t, dmin_t, dmax_t, far_scale=far_scale)


# -- independent kernel path ---------------------------------------------------

@dataclass(frozen=True)
class KernelMArgs:
    r: float  # m
    D: float  # m
    zeta: float  # rad/s

    def __post_init__(self):
        if not (self.D > 0 and self.r >= 0 and self.zeta > 0):
            raise DomainError("kernel_M needs D > 0, r >= 0, zeta > 0")


def m_hat(Q, D_k, p):
    """Fourier-space kernel integrand in units of k = zeta/c:
    poly(p) exp(-kD sqrt(4p^2 + Q^2)) / (4p^2 + Q^2)^(3/2), with Q = q/k."""
    g = np.sqrt(4.0 * p * p + Q * Q)
    return poly_p(p) * np.exp(-D_k * g) / g**3


def kernel_M(args: KernelMArgs, rel_tol: float = 1e-8) -> QuadResult:
    """M(r, D, zeta) in 1/m^2 from the wave-vector representation.

    The angular part of the 2-D q-integral gives J0(q r):
    M = k^2/(2 pi) int_1^inf dp int_0^inf Q dQ J0(Q k r) m_hat(Q, k D, p).
    """
    k = args.zeta / C_LIGHT
    kr, kD = k * args.r, k * args.D
    q_max = 60.0 / kD + 1.0
    # p outermost: its decay exp(-2 p kD) fixes the map scale; for fixed p the
    # Q-integrand is smooth on a finite interval
    outer = QuadSpec(rel_tol=rel_tol, transform=SemiInfiniteExp(1.0 / (2.0 * kD)),
                     max_subdivisions=400)
    # at large p the J0 integral cancels to an exponentially small value, so the
    # inner axis is controlled absolutely against the non-oscillatory size at p = 1
    size = integrate_1d(lambda Q: Q * m_hat(Q, kD, 1.0), 0.0, q_max,
                        QuadSpec(rel_tol=1e-6), vectorized=True).value
    inner = QuadSpec(rel_tol=rel_tol * 0.1, abs_tol=rel_tol * 0.1 * size,
                     max_subdivisions=2000)

    def f(p, Q):
        return Q * j0(Q * kr) * m_hat(Q, kD, p)

    r = integrate_nested(f, [(1.0, math.inf, outer), (0.0, q_max, inner)], vectorized=True)
    pref = k * k / (2.0 * math.pi)
    return QuadResult(pref * r.value, pref * r.err_est, r.evaluations, r.converged,
                      r.failed_axis)


def kernel_M_realspace(args: KernelMArgs, rel_tol: float = 1e-9) -> float:
    """Same kernel from the Schwinger-parameter form (s done in closed form):
    M = k^2/(8 pi) int_1^inf dp poly(p)/p int_0^1 dt t^(-1/2) exp(-2 p k sqrt(r^2 + D^2/t))."""
    k = args.zeta / C_LIGHT
    kr, kD = k * args.r, k * args.D

    def f(p, v):  # t = v^2
        return poly_p(p) / p * 2.0 * np.exp(-2.0 * p * np.sqrt(kr * kr + (kD / v) ** 2))

    spec_v = QuadSpec(rel_tol=rel_tol * 0.1, max_subdivisions=400)
    spec_p = QuadSpec(rel_tol=rel_tol, transform=SemiInfiniteExp(1.0 / (2.0 * math.hypot(kr, kD))),
                      max_subdivisions=400)
    r = integrate_nested(lambda p, v: np.where(v > 0, f(p, np.maximum(v, 1e-300)), 0.0),
                         [(1.0, math.inf, spec_p), (0.0, 1.0, spec_v)], vectorized=True)
    return k * k / (8.0 * math.pi) * r.value
