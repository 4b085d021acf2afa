"""The logarithmic Laplacian on trivially extended fields, the geometry
functional h_omega, and the domain-inclusion identity.

Everything reduces to 1-d radial integrals of spherical means around the
evaluation point: for x in the domain and a sphere of radius t around x,

    h_omega(x)   = 2 * [ int_d^1 (1 - frac(t)) dt/t - int_1^T frac(t) dt/t ],
    L f(x)       = 2 * int_0^T mean[(f(x) - f(y)) 1_dom(y)](t) dt/t
                   + (h_omega(x) + shift) * f(x),

where frac(t) is the fraction of the sphere inside the domain, d the boundary
distance of x, and T the far radius.  Ball domains use the exact spherical-cap
fraction; other shapes use deterministic angular sampling with a documented
direction count.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .fields import Field
from .geometry import Ball, Domain, interior_lattice
from .gridio import GridField
from .quadrature import geometric_panels, legendre_nodes, unit_directions
from .specialfn import log_kernel_coeff, loglap_shift

__all__ = [
    "ExtendedField",
    "HField",
    "PointOutsideDomainError",
    "SubsetViolationError",
    "h_omega",
    "h_zero",
    "loglap_extended",
    "loglap_pv",
    "inclusion_identity_residual",
    "cap_fraction",
]

DEFAULT_ANGLES = 512


class PointOutsideDomainError(ValueError):
    pass


class SubsetViolationError(ValueError):
    pass


@dataclass(frozen=True)
class ExtendedField:
    """A source on the domain closure, extended by zero outside."""

    dom: Domain
    f: Field

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        p = x[None, :] if single else x
        vals = np.asarray(self.f(p), dtype=float) * self.dom.contains(p)
        return float(vals[0]) if single else vals

    def holder_violations(self, n_pairs: int = 256, seed: int = 0) -> int:
        """Spot-check |f(x)-f(y)| <= C |x-y|^alpha on random interior pairs."""
        rng = np.random.default_rng(seed)
        lo, hi = self.dom.bounding_box()
        pts = rng.uniform(lo, hi, size=(4 * n_pairs, self.dom.ndim))
        pts = pts[self.dom.contains(pts)]
        m = (pts.shape[0] // 2) * 2
        if m < 4:
            return 0
        a, b = pts[: m // 2], pts[m // 2 : m]
        gap = np.linalg.norm(a - b, axis=1)
        diff = np.abs(np.asarray(self.f(a)) - np.asarray(self.f(b)))
        bound = self.f.holder_const * gap**self.f.alpha + 1e-12
        return int(np.sum(diff > bound))


def cap_fraction(dist_center: float, t: float, radius: float, ndim: int) -> float:
    """Fraction of the sphere of radius t around x inside a ball of the given
    radius whose center is dist_center away from x."""
    a = dist_center
    if t <= radius - a:
        return 1.0
    if t >= radius + a or a == 0.0:
        return 0.0
    v = (radius * radius - a * a - t * t) / (2.0 * a * t)
    v = min(1.0, max(-1.0, v))
    if ndim == 2:
        return 1.0 - np.arccos(v) / np.pi
    return 0.5 * (1.0 + v)


def _far_radius(dom: Domain, x: np.ndarray) -> float:
    lo, hi = dom.bounding_box()
    corners = np.stack(np.meshgrid(*zip(lo, hi), indexing="ij"), axis=-1).reshape(-1, dom.ndim)
    return float(np.max(np.linalg.norm(corners - x, axis=1)))


def _fraction_profile(dom: Domain, x: np.ndarray, ts: np.ndarray,
                      dirs: np.ndarray) -> np.ndarray:
    pts = x[None, None, :] + ts[:, None, None] * dirs[None, :, :]
    inside = dom.contains(pts.reshape(-1, dom.ndim)).reshape(ts.size, dirs.shape[0])
    return inside.mean(axis=1)


def h_omega(dom: Domain, x, tol: float = None, n_angles: int = DEFAULT_ANGLES) -> float:
    """Geometry functional: the log-kernel integral over B_1(x) minus the
    domain, minus the one over the domain minus B_1(x)."""
    x = np.asarray(x, dtype=float)
    if not bool(dom.contains(x)):
        raise PointOutsideDomainError(f"h_omega needs x in the domain, got {x}")
    if tol is None:
        tol = 1e-6 if isinstance(dom, Ball) else 1e-3
    delta = max(float(dom.boundary_distance(x)), 1e-14)

    if isinstance(dom, Ball):
        a = float(np.linalg.norm(x - dom.center))
        return _h_ball(a, dom.radius, dom.ndim, tol)

    far = _far_radius(dom, x)
    dirs = unit_directions(dom.ndim, n_angles)
    total = 0.0
    # Inner part on (delta, 1): integrand (1 - frac)/t.
    lo = min(delta, 1.0)
    if lo < 1.0:
        ts, ws, = _panel_nodes(lo, 1.0, refine_toward=lo)
        frac = _fraction_profile(dom, x, ts, dirs)
        total += float(np.sum(ws * (1.0 - frac) / ts))
    # Outer part on (1, far): integrand -frac/t.
    if far > 1.0:
        ts, ws = _panel_nodes(1.0, far, refine_toward=1.0)
        frac = _fraction_profile(dom, x, ts, dirs)
        total -= float(np.sum(ws * frac / ts))
    return 2.0 * total


def _panel_nodes(a: float, b: float, refine_toward: float,
                 per_panel: int = 8, start_frac: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
    panels = geometric_panels(a, b, ratio=1.9, start=max((b - a) * start_frac, 1e-12))
    ts, ws = [], []
    for plo, phi in panels:
        t, w = legendre_nodes(plo, phi, per_panel)
        ts.append(t)
        ws.append(w)
    return np.concatenate(ts), np.concatenate(ws)


def _h_ball(a: float, radius: float, ndim: int, tol: float) -> float:
    """Exact-fraction radial quadrature of h for a ball, x at distance a from
    the center."""
    delta = radius - a
    if delta <= 0.0:
        raise PointOutsideDomainError("point is not inside the ball")

    def inner(t: float) -> float:
        return (1.0 - cap_fraction(a, t, radius, ndim)) / t

    def outer(t: float) -> float:
        return cap_fraction(a, t, radius, ndim) / t

    total = 0.0
    lo = min(delta, 1.0)
    if lo < 1.0:
        pts = [p for p in (radius - a, radius + a) if lo < p < 1.0]
        val, _ = quad(inner, lo, 1.0, points=pts or None, epsabs=tol * 1e-2,
                      epsrel=1e-10, limit=200)
        total += val
    hi = radius + a
    if hi > 1.0:
        pts = [p for p in (radius - a,) if 1.0 < p < hi]
        val, _ = quad(outer, 1.0, hi, points=pts or None, epsabs=tol * 1e-2,
                      epsrel=1e-10, limit=200)
        total -= val
    return 2.0 * total


@dataclass(frozen=True)
class HField:
    grid: GridField
    h0: float
    argmin_point: np.ndarray
    lattice_spacing: float


def h_zero(dom: Domain, lattice_spacing: float, tol: float = None,
           n_angles: int = DEFAULT_ANGLES) -> HField:
    """h_omega on the interior lattice and its grid infimum."""
    pts = interior_lattice(dom, lattice_spacing)
    if pts.shape[0] == 0:
        raise ValueError("empty interior lattice")
    vals = np.array([h_omega(dom, p, tol=tol, n_angles=n_angles) for p in pts])
    grid = GridField(pts, vals, lattice_spacing,
                     meta={"quantity": "h_omega", "n_angles": n_angles})
    i = int(np.argmin(vals))
    return HField(grid=grid, h0=float(vals[i]), argmin_point=pts[i],
                  lattice_spacing=float(lattice_spacing))


def loglap_extended(ext: ExtendedField, x, tol: float = None,
                    n_angles: int = DEFAULT_ANGLES) -> float:
    """Logarithmic Laplacian of the trivially extended field at an interior
    point: difference-quotient integral over the domain plus
    (h_omega + shift) * f(x).  The exterior integral vanishes for trivially
    extended fields."""
    dom, f = ext.dom, ext.f
    x = np.asarray(x, dtype=float)
    if not bool(dom.contains(x)):
        raise PointOutsideDomainError(f"loglap_extended needs x in the domain, got {x}")
    if tol is None:
        tol = 1e-6 if isinstance(dom, Ball) else 1e-3
    shift = loglap_shift(dom.ndim)
    h = h_omega(dom, x, tol=tol, n_angles=n_angles)
    fx = float(f(x))
    if getattr(f, "const", None) is not None:
        return (h + shift) * fx

    far = _far_radius(dom, x)
    alpha = max(min(f.alpha, 1.0), 1e-3)
    c_hold = max(f.holder_const, 1e-12)
    # Below t_min the difference quotient contributes at most
    # 2 C t^alpha / alpha, which we keep under tol/4.
    t_min = min((tol * alpha / (8.0 * c_hold)) ** (1.0 / alpha), far * 1e-3)
    t_min = max(t_min, 1e-12)
    dirs = unit_directions(dom.ndim, n_angles)
    ts, ws = _panel_nodes(t_min, far, refine_toward=t_min, per_panel=8,
                          start_frac=1e-4)
    pts = (x[None, None, :] + ts[:, None, None] * dirs[None, :, :]).reshape(-1, dom.ndim)
    inside = dom.contains(pts)
    vals = np.zeros(pts.shape[0])
    vals[inside] = np.asarray(f(pts[inside]), dtype=float)
    diff = (fx - vals) * inside
    means = diff.reshape(ts.size, dirs.shape[0]).mean(axis=1)
    j_term = 2.0 * float(np.sum(ws * means / ts))
    return j_term + (h + shift) * fx


def loglap_pv(fn, x, support_radius: float, ndim: int, tol: float = 1e-6,
              n_angles: int = DEFAULT_ANGLES) -> float:
    """Principal-value form of the logarithmic Laplacian for a compactly
    supported Hölder function on R^ndim, via symmetric-pair sampling:
    antipodal averaging removes the principal value.  Cross-check companion of
    :func:`loglap_extended`."""
    x = np.asarray(x, dtype=float)
    dirs = unit_directions(ndim, n_angles)
    far = float(np.linalg.norm(x)) + support_radius

    def sym_mean(ts: np.ndarray) -> np.ndarray:
        fx = float(fn(x[None, :])[0])
        plus = (x[None, None, :] + ts[:, None, None] * dirs[None, :, :]).reshape(-1, ndim)
        minus = (x[None, None, :] - ts[:, None, None] * dirs[None, :, :]).reshape(-1, ndim)
        vp = np.asarray(fn(plus)).reshape(ts.size, -1)
        vm = np.asarray(fn(minus)).reshape(ts.size, -1)
        return fx - 0.5 * (vp + vm).mean(axis=1)

    t_min = max(1e-7, tol * 1e-2)
    ts, ws = _panel_nodes(t_min, 1.0, refine_toward=t_min, start_frac=1e-4)
    inner = 2.0 * float(np.sum(ws * sym_mean(ts) / ts))
    outer = 0.0
    if far > 1.0:
        ts, ws = _panel_nodes(1.0, far, refine_toward=1.0)
        pts = (x[None, None, :] + ts[:, None, None] * dirs[None, :, :]).reshape(-1, ndim)
        means = np.asarray(fn(pts)).reshape(ts.size, -1).mean(axis=1)
        outer = 2.0 * float(np.sum(ws * means / ts))
    fx = float(fn(x[None, :])[0])
    return inner - outer + loglap_shift(ndim) * fx


def _check_subset(sub: Domain, dom: Domain, n_check: int = 1000) -> None:
    pts = interior_lattice(sub, sub.diameter() / max(4, int(n_check ** (1.0 / sub.ndim))))
    if pts.shape[0] and not np.all(dom.contains(pts)):
        raise SubsetViolationError("sub-domain is not contained in the domain")


def inclusion_identity_residual(ext: ExtendedField, sub: Domain, x,
                                tol: float = None,
                                n_angles: int = DEFAULT_ANGLES) -> float:
    """Difference between [L f extended from sub] - [L f extended from dom]
    and the annulus integral c_N int_{dom \\ sub} f(y) |x-y|^{-N} dy, all three
    evaluated with independent quadratures.  Zero up to quadrature error."""
    dom, f = ext.dom, ext.f
    x = np.asarray(x, dtype=float)
    _check_subset(sub, dom)
    if not bool(sub.contains(x)):
        raise PointOutsideDomainError("x must lie in the sub-domain")
    if tol is None:
        tol = 1e-6 if isinstance(dom, Ball) and isinstance(sub, Ball) else 1e-3

    lhs = (loglap_extended(ExtendedField(sub, f), x, tol=tol, n_angles=n_angles)
           - loglap_extended(ext, x, tol=tol, n_angles=n_angles))

    t0 = max(float(sub.boundary_distance(x)), 1e-14)
    far = _far_radius(dom, x)
    ball_pair = isinstance(dom, Ball) and isinstance(sub, Ball)
    if ball_pair and getattr(f, "const", None) is not None:
        a_dom = float(np.linalg.norm(x - dom.center))
        a_sub = float(np.linalg.norm(x - sub.center))

        def annulus(t: float) -> float:
            return (cap_fraction(a_dom, t, dom.radius, dom.ndim)
                    - cap_fraction(a_sub, t, sub.radius, sub.ndim)) / t

        pts = sorted({p for p in (dom.radius - a_dom, dom.radius + a_dom,
                                  sub.radius - a_sub, sub.radius + a_sub)
                      if t0 < p < far})
        val, _ = quad(annulus, t0, far, points=pts or None, epsabs=tol * 1e-2,
                      epsrel=1e-10, limit=200)
        rhs = 2.0 * f.const * val
    else:
        dirs = unit_directions(dom.ndim, n_angles)
        ts, ws = _panel_nodes(t0, far, refine_toward=t0, start_frac=1e-4)
        pts = (x[None, None, :] + ts[:, None, None] * dirs[None, :, :]).reshape(-1, dom.ndim)
        in_dom = dom.contains(pts)
        in_sub = sub.contains(pts)
        ring = in_dom & ~in_sub
        vals = np.zeros(pts.shape[0])
        if ring.any():
            vals[ring] = np.asarray(f(pts[ring]), dtype=float)
        means = vals.reshape(ts.size, dirs.shape[0]).mean(axis=1)
        rhs = 2.0 * float(np.sum(ws * means / ts))
    return lhs - rhs
