"""Source-point sampling for walk steps.

A step from the center c of a ball B contributes int_B G_B(c, y) f(y) dy.
Freezing f at the center is exact only for constant f; for general sources we
draw Y from the normalized Green mass G_B(c, .) / int_B G_B(c, .) and add
f(Y) * coeff * rho^{2s}, which is unbiased for every integrable f.

The radial quantile function of Y in the unit step ball is precomputed once
per (dimension, order) on a dense grid: the radius density is proportional to
r^{2s-1} * I_{1-r^2}(s, N/2 - s) after the angular reduction, where I is the
regularized incomplete beta.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import betainc

__all__ = ["source_radius_quantiles"]

_GRID = 4096


@lru_cache(maxsize=32)
def _quantiles_cached(ndim: int, s_key: int) -> np.ndarray:
    s = s_key * 2.0**-52
    # Work in w = r^{2s}: dw-density is proportional to I_{1-w^{1/s}}(s, N/2-s),
    # bounded on [0, 1], so a uniform-w cumulative trapezoid is accurate.
    w = np.linspace(0.0, 1.0, 8 * _GRID + 1)
    dens = betainc(s, 0.5 * ndim - s, 1.0 - w ** (1.0 / s))
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(w))])
    cdf /= cdf[-1]
    u = np.linspace(0.0, 1.0, _GRID + 1)
    w_of_u = np.interp(u, cdf, w)
    return w_of_u ** (0.5 / s)


def source_radius_quantiles(ndim: int, s: float) -> np.ndarray:
    """Radius quantile table r(u) on a uniform u-grid of size 4097, for the
    Green-mass source density of the unit step ball."""
    return _quantiles_cached(ndim, int(s / 2.0**-52))
