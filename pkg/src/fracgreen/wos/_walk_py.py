"""Vectorized NumPy walk backend.

Walks advance in lockstep over masked index sets; every random draw goes
through the per-walk splitmix streams in the same order as the compiled
kernel, so either backend reproduces its own runs exactly.

One walk estimating the Green potential of f at x0:

  repeat: d <- boundary distance, absorb (value so far) if d <= eps_abs;
          accumulate f(pos) * coeff * (shrink * d)^(2 s)   [step-ball mass];
          jump to an exit point of the step ball: radius rho/sqrt(B) with
          B ~ Beta(s, 1 - s), uniform direction; stop with no further
          contribution once the exit point leaves the domain.
"""

from __future__ import annotations

import numpy as np

from ..specialfn import torsion_coeff
from .rng import next_uniform, stream_states

__all__ = ["run_walks"]


def _beta_johnk(states: np.ndarray, idx: np.ndarray, s: float) -> np.ndarray:
    """Beta(s, 1-s) samples for the streams in idx (Johnk rejection, done in
    log space).  Each stream consumes two uniforms per rejection round."""
    n = idx.size
    out = np.empty(n)
    pending = np.arange(n)
    while pending.size:
        rows = idx[pending]
        lu = np.log(next_uniform(states, rows)) / s
        lv = np.log(next_uniform(states, rows)) / (1.0 - s)
        m = np.maximum(lu, lv)
        tot = m + np.log(np.exp(lu - m) + np.exp(lv - m))
        ok = tot <= 0.0
        if ok.any():
            sel = pending[ok]
            out[sel] = 1.0 / (1.0 + np.exp(lv[ok] - lu[ok]))
        pending = pending[~ok]
    return out


def _directions(states: np.ndarray, idx: np.ndarray, ndim: int) -> np.ndarray:
    if ndim == 2:
        th = 2.0 * np.pi * next_uniform(states, idx)
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    z = 2.0 * next_uniform(states, idx) - 1.0
    th = 2.0 * np.pi * next_uniform(states, idx)
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    return np.stack([r * np.cos(th), r * np.sin(th), z], axis=1)


def run_walks(dom, f, s: float, x0: np.ndarray, n: int, eps_abs: float,
              shrink: float, max_steps: int, seed: int,
              start_index: int = 0,
              src_quantiles: np.ndarray | None = None) -> tuple[np.ndarray, int]:
    """Per-walk accumulated values for n walks from x0, plus the count of
    walks that hit the step cap.

    src_quantiles, when given, is the radius quantile table of the step ball's
    Green mass; the source is then evaluated at a Green-distributed point
    (unbiased for varying f) instead of the step center (exact for constant f).
    """
    ndim = x0.size
    coeff = torsion_coeff(ndim, s)
    two_s = 2.0 * s
    states = stream_states(seed, start_index + np.arange(n, dtype=np.uint64))
    pos = np.tile(np.asarray(x0, dtype=float), (n, 1))
    acc = np.zeros(n)
    alive = np.arange(n)

    for _ in range(max_steps):
        if alive.size == 0:
            break
        d = dom.boundary_distance(pos[alive])
        absorb = d <= eps_abs
        if absorb.any():
            alive = alive[~absorb]
            d = d[~absorb]
            if alive.size == 0:
                break
        rho = shrink * d
        if src_quantiles is None:
            src_val = f(pos[alive])
        else:
            u = next_uniform(states, alive)
            r_src = np.interp(u * (src_quantiles.size - 1),
                              np.arange(src_quantiles.size, dtype=float),
                              src_quantiles)
            y = pos[alive] + (rho * r_src)[:, None] * _directions(states, alive, ndim)
            src_val = f(y)
        acc[alive] += src_val * (coeff * rho**two_s)
        b = _beta_johnk(states, alive, s)
        radius = rho / np.sqrt(b)
        step = _directions(states, alive, ndim)
        nxt = pos[alive] + radius[:, None] * step
        inside = dom.contains(nxt)
        pos[alive[inside]] = nxt[inside]
        alive = alive[inside]
    return acc, int(alive.size)
