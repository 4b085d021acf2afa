"""Exact formulas on balls: torsion function, its order-derivative, the
fundamental solution, ball Poisson kernel, exterior barrier, the ball Green
function, and the exterior flux of the torsion function.

The Green function uses the classical ball representation
G(x, y) = F(x - y) * I_z(s, N/2 - s) with z = r0 / (1 + r0),
r0 = (1 - |x|^2)(1 - |y|^2) / |x - y|^2 and I the regularized incomplete
beta; its constant is pinned by the torsion-reproduction identity
int_B G(x, y) dy = coeff (1 - |x|^2)^s rather than trusted from transcription.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import betainc

from .quadrature import gauss_jacobi_right, ring_mean_power
from .specialfn import (
    check_dim,
    check_order,
    digamma,
    fraclap_coeff,
    riesz_coeff,
    sphere_area,
    exit_kernel_coeff,
    torsion_coeff,
)

__all__ = [
    "BallProblem",
    "BoundaryDegenerateWarning",
    "torsion",
    "torsion_s_derivative",
    "fundamental_solution",
    "ball_poisson_kernel",
    "exterior_barrier",
    "ball_green_function",
    "ball_green_apply",
    "exterior_flux_w",
]


class BoundaryDegenerateWarning(UserWarning):
    """The order-derivative formula degenerates on the sphere itself."""


@dataclass(frozen=True)
class BallProblem:
    ndim: int
    radius: float
    s: float

    def __post_init__(self):
        check_dim(self.ndim)
        check_order(self.s, allow_one=True)
        if not self.radius > 0.0:
            raise ValueError("radius must be positive")


def _norm(x) -> float:
    return float(np.linalg.norm(np.asarray(x, dtype=float)))


def torsion(bp: BallProblem, x) -> float:
    """Torsion function coeff * (r^2 - |x|^2)_+^s, zero outside the ball."""
    gap = bp.radius**2 - _norm(x) ** 2
    if gap <= 0.0:
        return 0.0
    return torsion_coeff(bp.ndim, bp.s) * gap**bp.s


def torsion_s_derivative(bp: BallProblem, x) -> float:
    """Pointwise derivative of the torsion function with respect to the order:
    u(x) * [ln(r^2 - |x|^2) - (2 ln 2 + psi(N/2 + s) + psi(s + 1))]."""
    a = _norm(x)
    if a > bp.radius:
        raise ValueError("torsion_s_derivative needs |x| <= r")
    gap = bp.radius**2 - a**2
    if gap == 0.0:
        warnings.warn("derivative formula degenerates on the boundary; returning 0",
                      BoundaryDegenerateWarning, stacklevel=2)
        return 0.0
    bracket = math.log(gap) - (2.0 * math.log(2.0) + digamma(bp.ndim / 2.0 + bp.s)
                               + digamma(bp.s + 1.0))
    return torsion(bp, x) * bracket


def fundamental_solution(ndim: int, s: float, z) -> float:
    """Fundamental solution coeff * |z|^{2s - N} of the fractional Laplacian."""
    r = _norm(z)
    if r == 0.0:
        raise ValueError("fundamental solution is singular at z = 0")
    return riesz_coeff(ndim, s) * r ** (2.0 * s - ndim)


def ball_poisson_kernel(ndim: int, s: float, x, z) -> float:
    """Exit density of the unit ball: tau * (1-|x|^2)^s (|z|^2-1)^{-s} |x-z|^{-N}
    for |x| < 1 < |z|."""
    ax, az = _norm(x), _norm(z)
    if not ax < 1.0:
        raise ValueError("ball_poisson_kernel needs |x| < 1")
    if not az > 1.0:
        raise ValueError("ball_poisson_kernel needs |z| > 1")
    gap = float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(z, dtype=float)))
    return (exit_kernel_coeff(ndim, s) * (1.0 - ax * ax) ** s
            / (az * az - 1.0) ** s / gap**ndim)


def exterior_barrier(ndim: int, s: float, radius: float, z_center, x) -> float:
    """Barrier coeff * (|x-z|^2 - r^2)_+^s / |x-z|^N, the Kelvin transform of
    the ball torsion function."""
    check_dim(ndim)
    check_order(s)
    d = float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(z_center, dtype=float)))
    gap = d * d - radius * radius
    if gap <= 0.0:
        return 0.0
    return torsion_coeff(ndim, s) * gap**s / d**ndim


def ball_green_function(ndim: int, s: float, x, y) -> float:
    """Green function of the unit ball at distinct interior points."""
    check_dim(ndim)
    s = check_order(s)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ax, ay = _norm(x), _norm(y)
    if ax >= 1.0 or ay >= 1.0:
        return 0.0
    gap2 = float(np.sum((x - y) ** 2))
    if gap2 == 0.0:
        raise ValueError("Green function is singular at coincident points")
    r0 = (1.0 - ax * ax) * (1.0 - ay * ay) / gap2
    z = r0 / (1.0 + r0)
    return (riesz_coeff(ndim, s) * gap2 ** (s - 0.5 * ndim)
            * float(betainc(s, 0.5 * ndim - s, z)))


def _green_ring_mean(ndim: int, s: float, a: float, rho: float,
                     tol: float = 1e-9) -> float:
    """Angular average of the unit-ball Green function over |y| = rho for
    |x| = a; integrable |x-y|^{2s-N} blow-up at rho = a."""
    if rho >= 1.0:
        return 0.0
    if a == 0.0:
        return ball_green_function(ndim, s, np.zeros(ndim),
                                   np.array([rho] + [0.0] * (ndim - 1)))
    kap = riesz_coeff(ndim, s)
    one_m_a2 = 1.0 - a * a
    one_m_r2 = 1.0 - rho * rho

    def val_from_gap2(gap2: float) -> float:
        r0 = one_m_a2 * one_m_r2 / gap2
        return kap * gap2 ** (s - 0.5 * ndim) * betainc(s, 0.5 * ndim - s,
                                                        r0 / (1.0 + r0))

    if ndim == 2:
        def f(th: float) -> float:
            return val_from_gap2(a * a + rho * rho - 2.0 * a * rho * math.cos(th))

        gap = abs(a - rho)
        split = min(0.5 * math.pi, max(gap / math.sqrt(a * rho), 1e-9) * 8.0)
        total = 0.0
        for lo, hi in ((0.0, split), (split, math.pi)):
            if hi > lo:
                v, _ = quad(f, lo, hi, epsabs=tol, epsrel=tol, limit=200)
                total += v
        return total / math.pi

    def g(mu: float) -> float:
        return val_from_gap2(a * a + rho * rho - 2.0 * a * rho * mu)

    v, _ = quad(g, -1.0, 1.0, points=[1.0 - 1e-12], epsabs=tol, epsrel=tol, limit=200)
    return 0.5 * v


def ball_green_apply(ndim: int, s: float, radius: float, g_radial, a: float,
                     tol: float = 1e-7) -> float:
    """Apply the ball-of-given-radius Green operator to a radial source:
    value of the solution at distance a from the center.  g_radial maps a
    radius in [0, radius] to the source value."""
    check_dim(ndim)
    s = check_order(s)
    if not 0.0 <= a < radius:
        raise ValueError("evaluation point must be inside the ball")
    area = sphere_area(ndim)
    au = a / radius

    def integrand(rho: float) -> float:
        return (g_radial(rho * radius) * _green_ring_mean(ndim, s, au, rho, tol=tol * 1e-2)
                * rho ** (ndim - 1))

    pts = [au] if 0.0 < au < 1.0 else None
    val, _ = quad(integrand, 0.0, 1.0, points=pts, epsabs=tol, epsrel=1e-9, limit=400)
    return radius ** (2.0 * s) * area * val


def exterior_flux_w(bp: BallProblem, x, tol: float = 1e-8) -> float:
    """Flux of the torsion function outside the closed ball:
    -coeff_frac * int_ball u(y) |x - y|^{-N-2s} dy  (strictly negative)."""
    s = check_order(bp.s)
    n = bp.ndim
    a = _norm(x)
    if a <= bp.radius:
        raise ValueError("exterior_flux_w needs |x| > r")
    gam = torsion_coeff(n, s)
    area = sphere_area(n)
    q = n + 2.0 * s

    def value(m: int) -> float:
        # (radius - rho)^s absorbed by the Jacobi weight; smooth remainder
        # gam (radius + rho)^s ringmean rho^{N-1}.
        rho, w = gauss_jacobi_right(0.0, bp.radius, s, m)
        vals = np.array([
            gam * (bp.radius + r) ** s * ring_mean_power(a, r, q, n) * r ** (n - 1)
            for r in rho
        ])
        return float(np.sum(w * vals))

    prev = value(24)
    for m in (48, 96, 192):
        cur = value(m)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            prev = cur
            break
        prev = cur
    return -fraclap_coeff(n, s) * area * prev
