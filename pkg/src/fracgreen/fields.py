"""Scalar source fields on a domain closure, with declared Hölder data.

A field evaluates vectorized on an (m, N) point array.  The optional
``const`` / ``radial_about`` hints let downstream quadratures pick exact or
radially reduced paths; tabulated fields back the derivative pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Field",
    "const_field",
    "polynomial_field",
    "radial_bump_field",
    "RadialTableField",
    "GridTableField",
    "parse_field_spec",
]


@dataclass(frozen=True)
class Field:
    fn: Callable[[np.ndarray], np.ndarray]
    alpha: float = 1.0            # declared Hölder exponent on the closure
    holder_const: float = 1.0     # declared Hölder constant
    const: float | None = None    # set when the field is identically constant
    radial_about: np.ndarray | None = None
    name: str = "field"

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return float(self.fn(x[None, :])[0])
        return np.asarray(self.fn(x), dtype=float)


def const_field(c: float) -> Field:
    c = float(c)
    return Field(
        fn=lambda x: np.full(x.shape[0], c),
        alpha=1.0,
        holder_const=0.0,
        const=c,
        radial_about=np.zeros(1),  # radial about any center; resolved by consumers
        name=f"const:{c}",
    )


def polynomial_field(terms: list[tuple[float, tuple[int, ...]]]) -> Field:
    """Multivariate polynomial sum(coef * prod(x_a^e_a)) from (coef, exponents)."""
    terms = [(float(c), tuple(int(e) for e in es)) for c, es in terms]

    def fn(x: np.ndarray) -> np.ndarray:
        out = np.zeros(x.shape[0])
        for c, es in terms:
            t = np.full(x.shape[0], c)
            for a, e in enumerate(es):
                if e:
                    t = t * x[:, a] ** e
            out += t
        return out

    return Field(fn=fn, alpha=1.0, holder_const=_poly_lip(terms), name=f"poly:{terms}")


def _poly_lip(terms) -> float:
    # Crude Lipschitz estimate on a unit-scale box; callers may override.
    return sum(abs(c) * (sum(es) + 1.0) for c, es in terms) or 1.0


def radial_bump_field(center, radius: float, amplitude: float = 1.0) -> Field:
    """Smooth bump a*exp(1 - 1/(1 - (|x-c|/R)^2)) supported on B_R(center)."""
    center = np.asarray(center, dtype=float)
    radius = float(radius)
    amplitude = float(amplitude)

    def fn(x: np.ndarray) -> np.ndarray:
        q = np.linalg.norm(x - center, axis=1) / radius
        out = np.zeros(x.shape[0])
        inside = q < 1.0
        qi = q[inside]
        out[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - qi * qi))
        return out

    return Field(fn=fn, alpha=1.0, holder_const=2.0 * abs(amplitude) / radius,
                 radial_about=center, name=f"bump:{center.tolist()},{radius},{amplitude}")


@dataclass(frozen=True)
class RadialTableField:
    """Piecewise-linear radial profile about a center; clamped past the ends."""

    center: np.ndarray
    radii: np.ndarray
    values: np.ndarray
    alpha: float = 1.0
    holder_const: float = 1.0
    const: float | None = None
    name: str = "radial-table"

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "radii", np.asarray(self.radii, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.radii.ndim != 1 or self.radii.size != self.values.size:
            raise ValueError("radii and values must be matching 1-d arrays")

    @property
    def radial_about(self) -> np.ndarray:
        return self.center

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        p = x[None, :] if single else x
        t = np.linalg.norm(p - self.center, axis=1)
        v = np.interp(t, self.radii, self.values)
        return float(v[0]) if single else v


@dataclass(frozen=True)
class GridTableField:
    """Multilinear interpolation of values on a cell-centered lattice; zero
    outside the lattice hull."""

    origin: np.ndarray
    spacing: float
    values: np.ndarray  # shape dims, NaN marks exterior cells
    alpha: float = 1.0
    holder_const: float = 1.0
    const: float | None = None
    radial_about: np.ndarray | None = None
    name: str = "grid-table"

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        p = x[None, :] if single else x
        dims = np.array(self.values.shape)
        # Continuous index of the cell-center grid.
        u = (p - self.origin) / self.spacing - 0.5
        u = np.clip(u, 0.0, dims - 1.0 - 1e-12)
        i0 = np.floor(u).astype(int)
        w = u - i0
        out = np.zeros(p.shape[0])
        n = p.shape[1]
        filled = np.nan_to_num(self.values, nan=0.0)
        for corner in range(1 << n):
            idx = i0.copy()
            wt = np.ones(p.shape[0])
            for a in range(n):
                if corner >> a & 1:
                    idx[:, a] = np.minimum(i0[:, a] + 1, dims[a] - 1)
                    wt *= w[:, a]
                else:
                    wt *= 1.0 - w[:, a]
            out += wt * filled[tuple(idx.T)]
        return float(out[0]) if single else out


def parse_field_spec(spec: str) -> Field:
    """Parse CLI field specs: const:<v>, poly:<json terms>, bump:<json>."""
    import json

    kind, _, rest = spec.partition(":")
    if kind == "const":
        return const_field(float(rest))
    if kind == "poly":
        terms = [(t[0], tuple(t[1:])) for t in json.loads(rest)]
        return polynomial_field(terms)
    if kind == "bump":
        params = json.loads(rest)
        return radial_bump_field(params["center"], params["radius"],
                                 params.get("amplitude", 1.0))
    raise ValueError(f"unknown field spec {spec!r} (expected const:/poly:/bump:)")
