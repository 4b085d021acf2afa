"""Walk-on-spheres estimators: ball exit sampling and the Green potential.

Walks are split into fixed blocks processed in index order (optionally on a
thread pool for the compiled backend); the merge order never depends on the
worker count, so results are a function of (seed, inputs) alone.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..geometry import Domain
from ..specialfn import check_order, torsion_coeff
from .backend import HAVE_KERNEL, active_backend, run_walks_backend
from .config import Estimate, WosConfig
from .rng import SplitMixStream
from .source import source_radius_quantiles

__all__ = ["sample_exit", "exit_radii", "solve_green", "run_point",
           "resolve_threads"]

_BLOCK = 1 << 15


def resolve_threads(cfg: WosConfig) -> int:
    if cfg.threads is not None:
        return max(1, cfg.threads)
    env = os.environ.get("FRACGREEN_THREADS")
    return max(1, int(env)) if env else 1


def sample_exit(s: float, center, rho: float, stream: SplitMixStream) -> np.ndarray:
    """One exit point of the 2s-stable process started at the center of the
    ball B_rho(center): radius rho/sqrt(B) with B ~ Beta(s, 1-s), uniform
    direction.  The point lies strictly outside the closed ball."""
    s = check_order(s)
    center = np.asarray(center, dtype=float)
    if not rho > 0.0:
        raise ValueError("rho must be positive")
    while True:
        lu = math.log(stream.uniform()) / s
        lv = math.log(stream.uniform()) / (1.0 - s)
        m = max(lu, lv)
        if m + math.log(math.exp(lu - m) + math.exp(lv - m)) <= 0.0:
            break
    b = 1.0 / (1.0 + math.exp(lv - lu))
    radius = rho / math.sqrt(b)
    ndim = center.size
    if ndim == 2:
        th = 2.0 * math.pi * stream.uniform()
        direction = np.array([math.cos(th), math.sin(th)])
    else:
        z = 2.0 * stream.uniform() - 1.0
        th = 2.0 * math.pi * stream.uniform()
        r = math.sqrt(max(1.0 - z * z, 0.0))
        direction = np.array([r * math.cos(th), r * math.sin(th), z])
    return center + radius * direction


def exit_radii(s: float, n: int, seed: int = 0, ndim: int = 2) -> np.ndarray:
    """n independent exit radii for the unit ball (rho = 1), one stream per
    draw index."""
    center = np.zeros(ndim)
    out = np.empty(n)
    for i in range(n):
        out[i] = float(np.linalg.norm(sample_exit(s, center, 1.0, SplitMixStream(seed, i))))
    return out


def run_point(dom: Domain, f, s: float, x, cfg: WosConfig,
              n: int | None = None, start_index: int = 0) -> tuple[np.ndarray, int]:
    """Per-walk values for n walks started at x (low-level; see solve_green)."""
    s = check_order(s)
    x = np.asarray(x, dtype=float)
    n = cfg.samples if n is None else n
    eps_abs = cfg.eps_shell * dom.diameter()
    coeff = torsion_coeff(dom.ndim, s)
    threads = resolve_threads(cfg)
    # Constant sources are exact at step centers; anything else gets the
    # unbiased Green-mass source point.
    src_quantiles = (None if getattr(f, "const", None) is not None
                     else source_radius_quantiles(dom.ndim, s))

    blocks = [(i, min(_BLOCK, n - i)) for i in range(0, n, _BLOCK)]

    def work(block):
        off, m = block
        return run_walks_backend(dom, f, s, x, m, eps_abs, cfg.shrink,
                                 cfg.max_steps, cfg.seed, start_index + off,
                                 coeff, src_quantiles)

    if threads > 1 and HAVE_KERNEL and active_backend(dom, f) == "c" and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, blocks))
    else:
        results = [work(b) for b in blocks]

    values = np.concatenate([r[0] for r in results]) if results else np.zeros(0)
    truncated = sum(r[1] for r in results)
    return values, truncated


def estimate_from_values(values: np.ndarray, truncated: int,
                         cfg: WosConfig) -> Estimate:
    n = values.size
    value = float(values.mean()) if n else 0.0
    stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return Estimate(value=value, stderr=stderr, n=n, truncated=truncated,
                    seed=cfg.seed, config=cfg.to_dict())


def solve_green(dom: Domain, f, s: float, x, cfg: WosConfig) -> Estimate:
    """Monte Carlo estimate of the Green potential u(x):
    (-Lap)^s u = f in the domain, u = 0 outside."""
    x = np.asarray(x, dtype=float)
    if not bool(dom.contains(x)):
        raise ValueError(f"solve_green needs x inside the domain, got {x}")
    values, truncated = run_point(dom, f, s, x, cfg)
    est = estimate_from_values(values, truncated, cfg)
    est.extras["backend"] = active_backend(dom, f)
    return est
