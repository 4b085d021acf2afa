"""Walk-backend selection: compiled kernel when available, NumPy otherwise.

FRACGREEN_WOS_BACKEND=c|py|auto overrides the default (auto).  The compiled
kernel additionally requires the domain and field to have flat encodings;
anything else silently runs on the NumPy path.
"""

from __future__ import annotations

import os

import numpy as np

from . import _walk_py
from .encode import encode_domain, encode_field

try:
    from . import _kernel
    HAVE_KERNEL = True
except ImportError:  # extension not built
    _kernel = None
    HAVE_KERNEL = False

__all__ = ["HAVE_KERNEL", "active_backend", "run_walks_backend"]


def _mode() -> str:
    mode = os.environ.get("FRACGREEN_WOS_BACKEND", "auto").lower()
    if mode not in ("auto", "c", "py"):
        raise ValueError(f"FRACGREEN_WOS_BACKEND must be auto|c|py, got {mode}")
    if mode == "c" and not HAVE_KERNEL:
        raise RuntimeError("compiled kernel requested but not built")
    return mode


def active_backend(dom=None, f=None) -> str:
    """Backend that would run for this domain/field pair."""
    mode = _mode()
    if mode == "py" or not HAVE_KERNEL:
        return "py"
    if dom is None:
        return "c"
    if encode_domain(dom) is None or encode_field(f, dom.ndim) is None:
        return "py" if mode == "auto" else "c"
    return "c"


def run_walks_backend(dom, f, s: float, x0: np.ndarray, n: int, eps_abs: float,
                      shrink: float, max_steps: int, seed: int,
                      start_index: int, coeff: float,
                      src_quantiles: np.ndarray | None) -> tuple[np.ndarray, int]:
    mode = _mode()
    use_c = HAVE_KERNEL and mode in ("auto", "c")
    if use_c:
        dom_enc = encode_domain(dom)
        fld_enc = encode_field(f, dom.ndim)
        if dom_enc is None or fld_enc is None:
            if mode == "c":
                raise RuntimeError("domain/field has no compiled-kernel encoding")
            use_c = False
    if not use_c:
        return _walk_py.run_walks(dom, f, s, x0, n, eps_abs, shrink, max_steps,
                                  seed, start_index, src_quantiles)
    dkind, df, di, du8 = dom_enc
    fkind, ff, fi = fld_enc
    out = np.empty(n)
    src = (np.zeros(0) if src_quantiles is None
           else np.ascontiguousarray(src_quantiles))
    truncated = _kernel.run_walks(
        n, seed, start_index, np.ascontiguousarray(x0, dtype=float), s, coeff,
        eps_abs, shrink, max_steps, dom.ndim,
        dkind, np.ascontiguousarray(df), np.ascontiguousarray(di),
        np.ascontiguousarray(du8),
        fkind, np.ascontiguousarray(ff), np.ascontiguousarray(fi), src, out)
    return out, int(truncated)
