"""Flat encodings of domains and fields for the compiled walk kernel.

Returns None when a shape/field combination has no kernel encoding, in which
case the caller falls back to the NumPy backend.
"""

from __future__ import annotations

import numpy as np

from ..fields import Field, GridTableField, RadialTableField
from ..geometry import Ball, Box, UnionOfBalls, VoxelMask

__all__ = ["encode_domain", "encode_field"]

DOM_BALL, DOM_BOX, DOM_UNION, DOM_VOXEL = 1, 2, 3, 4
FLD_CONST, FLD_POLY, FLD_BUMP, FLD_RADIAL, FLD_GRID = 1, 2, 3, 4, 5

_EMPTY_F = np.zeros(0)
_EMPTY_I = np.zeros(0, dtype=np.int64)
_EMPTY_U8 = np.zeros(0, dtype=np.uint8)


def encode_domain(dom):
    if isinstance(dom, Ball):
        return DOM_BALL, np.concatenate([dom.center, [dom.radius]]), _EMPTY_I, _EMPTY_U8
    if isinstance(dom, Box):
        return DOM_BOX, np.concatenate([dom.lo, dom.hi]), _EMPTY_I, _EMPTY_U8
    if isinstance(dom, UnionOfBalls):
        flat = np.concatenate([np.concatenate([b.center, [b.radius]]) for b in dom.balls])
        return DOM_UNION, flat, np.array([len(dom.balls)], dtype=np.int64), _EMPTY_U8
    if isinstance(dom, VoxelMask):
        fvec = np.concatenate([
            dom.origin, [dom.spacing],
            np.ascontiguousarray(dom._dist_in, dtype=float).ravel(),
            np.ascontiguousarray(dom._dist_out, dtype=float).ravel(),
        ])
        return (DOM_VOXEL, fvec, np.array(dom.occ.shape, dtype=np.int64),
                np.ascontiguousarray(dom.occ, dtype=np.uint8).ravel())
    return None


def encode_field(f, ndim: int):
    const = getattr(f, "const", None)
    if const is not None:
        return FLD_CONST, np.array([const]), _EMPTY_I
    if isinstance(f, RadialTableField):
        fvec = np.concatenate([f.center, f.radii, f.values])
        return FLD_RADIAL, fvec, np.array([f.radii.size], dtype=np.int64)
    if isinstance(f, GridTableField):
        fvec = np.concatenate([f.origin, [f.spacing],
                               np.nan_to_num(f.values, nan=0.0).ravel()])
        return FLD_GRID, fvec, np.array(f.values.shape, dtype=np.int64)
    if isinstance(f, Field):
        name = f.name or ""
        if name.startswith("poly:"):
            return _encode_poly(f, ndim)
        if name.startswith("bump:"):
            return _encode_bump(f, ndim)
    return None


def _encode_poly(f: Field, ndim: int):
    import ast

    terms = ast.literal_eval(f.name.split(":", 1)[1])
    flat = []
    for c, es in terms:
        es = list(es) + [0] * (ndim - len(es))
        flat.extend([float(c)] + [float(e) for e in es[:ndim]])
    return FLD_POLY, np.array(flat), np.array([len(terms)], dtype=np.int64)


def _encode_bump(f: Field, ndim: int):
    import ast

    center, radius, amp = ast.literal_eval(f.name.split(":", 1)[1])
    return FLD_BUMP, np.concatenate([np.asarray(center, dtype=float),
                                     [float(radius), float(amp)]]), _EMPTY_I
