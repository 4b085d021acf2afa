"""Quadrature helpers shared by the singular-kernel integrals.

Radial reductions write integrals over R^N as 1-d integrals of ring averages:
for a kernel k(|x - y|) and |x| = a, the average of k over the sphere |y| = t
depends only on (a, t).  Ring averages of power kernels |x - y|^{-q} have a
closed form in 3-d and a peak-aware adaptive quadrature in 2-d.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import roots_jacobi, roots_legendre

__all__ = [
    "ring_mean_power",
    "ring_mean_power_quad",
    "ring_mean_power_vec",
    "legendre_nodes",
    "gauss_jacobi_left",
    "gauss_jacobi_right",
    "geometric_panels",
    "unit_directions",
]


@lru_cache(maxsize=64)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return roots_legendre(n)


def legendre_nodes(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _legendre(n)
    return 0.5 * (b + a) + 0.5 * (b - a) * x, 0.5 * (b - a) * w


@lru_cache(maxsize=128)
def _jacobi(n: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    return roots_jacobi(n, alpha, beta)


def gauss_jacobi_left(a: float, b: float, expo: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for int_a^b (t-a)^expo g(t) dt with smooth g, expo > -1.

    The weights absorb the (t-a)^expo factor; apply them to g alone.
    """
    x, w = _jacobi(n, 0.0, expo)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), w * half ** (expo + 1.0)


def gauss_jacobi_right(a: float, b: float, expo: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for int_a^b (b-t)^expo g(t) dt with smooth g, expo > -1."""
    x, w = _jacobi(n, expo, 0.0)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), w * half ** (expo + 1.0)


def geometric_panels(a: float, b: float, ratio: float = 2.0,
                     start: float | None = None) -> list[tuple[float, float]]:
    """Panels of [a, b] geometrically widening away from a."""
    if b <= a:
        return []
    w = start if start is not None else (b - a) / 64.0
    w = min(w, b - a)
    panels = []
    lo = a
    while lo < b:
        hi = min(b, lo + w)
        panels.append((lo, hi))
        lo = hi
        w *= ratio
    return panels


def ring_mean_power(a: float, t: float, q: float, ndim: int,
                    tol: float = 1e-11) -> float:
    """Spherical average of |x - y|^{-q} over |y| = t with |x| = a.

    Finite whenever a != t, or a == t with q < ndim - 1.
    """
    a, t, q = float(a), float(t), float(q)
    if q == 0.0:
        return 1.0
    if a == 0.0:
        return t ** (-q)
    if t == 0.0:
        return a ** (-q)
    A = a * a + t * t
    B = 2.0 * a * t
    if ndim == 3:
        lo = max(A - B, 1e-300)  # (a - t)^2
        if q == 2.0:
            return float(np.log((A + B) / lo) / (2.0 * B))
        p = 1.0 - 0.5 * q
        return float((lo**p - (A + B) ** p) / (B * (q - 2.0)))
    if ndim != 2:
        raise ValueError("ring averages support ndim in {2, 3}")
    if q == 2.0:
        gap2 = abs(a * a - t * t)
        if gap2 == 0.0:
            raise ValueError("ring average diverges at a == t for q = 2")
        return 1.0 / gap2
    if a == t and q >= 1.0:
        raise ValueError("ring average diverges at a == t for this exponent")
    # Closed form (a+t)^{-q} 2F1(q/2, 1/2; 1; 4at/(a+t)^2); the slow adaptive
    # angular quadrature survives as the test oracle.
    from scipy.special import hyp2f1

    z = 4.0 * a * t / (a + t) ** 2
    return float((a + t) ** (-q) * hyp2f1(0.5 * q, 0.5, 1.0, z))


def ring_mean_power_quad(a: float, t: float, q: float, ndim: int = 2,
                         tol: float = 1e-11) -> float:
    """Adaptive angular-quadrature oracle for :func:`ring_mean_power` (2-d)."""
    A = a * a + t * t
    B = 2.0 * a * t

    def f(th: float) -> float:
        return (A - B * np.cos(th)) ** (-0.5 * q)

    gap = abs(a - t)
    split = min(0.5 * np.pi, max(gap / np.sqrt(max(a * t, 1e-300)), 1e-8) * 8.0)
    total = 0.0
    for lo_th, hi_th in ((0.0, split), (split, np.pi)):
        if hi_th > lo_th:
            val, _ = quad(f, lo_th, hi_th, epsabs=tol, epsrel=tol, limit=200)
            total += val
    return float(total / np.pi)


def ring_mean_power_vec(a, t, q: float, ndim: int) -> np.ndarray:
    """Vectorized :func:`ring_mean_power` over broadcastable (a, t) arrays.
    Requires a != t elementwise (or q < ndim - 1)."""
    a = np.asarray(a, dtype=float)
    t = np.asarray(t, dtype=float)
    if ndim == 3:
        A = a * a + t * t
        B = 2.0 * a * t
        lo = np.maximum(A - B, 1e-300)
        if q == 2.0:
            return np.log((A + B) / lo) / (2.0 * B)
        p = 1.0 - 0.5 * q
        return (lo**p - (A + B) ** p) / (B * (q - 2.0))
    from scipy.special import hyp2f1

    if q == 2.0:
        return 1.0 / np.abs(a * a - t * t)
    z = 4.0 * a * t / (a + t) ** 2
    return (a + t) ** (-q) * hyp2f1(0.5 * q, 0.5, 1.0, z)


def unit_directions(ndim: int, n_angles: int) -> np.ndarray:
    """Deterministic quasi-uniform direction set on S^{ndim-1}.

    2-d: midpoint angles.  3-d: equal-area product midpoint grid in
    (cos(phi), theta) with about n_angles points, all weights equal.
    """
    if ndim == 2:
        th = (np.arange(n_angles) + 0.5) * (2.0 * np.pi / n_angles)
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    m_mu = max(2, int(round(np.sqrt(n_angles / 2.0))))
    m_th = max(4, n_angles // m_mu)
    mu = -1.0 + (np.arange(m_mu) + 0.5) * (2.0 / m_mu)
    th = (np.arange(m_th) + 0.5) * (2.0 * np.pi / m_th)
    mu_g, th_g = np.meshgrid(mu, th, indexing="ij")
    sin_phi = np.sqrt(1.0 - mu_g**2)
    return np.stack(
        [sin_phi.ravel() * np.cos(th_g.ravel()),
         sin_phi.ravel() * np.sin(th_g.ravel()),
         mu_g.ravel()], axis=1
    )
