"""Lattice-sampled scalar quantities and their CSV serialization.

CSV format: optional '#'-prefixed provenance lines, then a header
``x1,...,xN,value`` and one row per lattice point.  Floats use Python's
shortest round-trip representation; '.' decimal, ',' separator, LF endings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["GridField", "format_float"]


def format_float(v: float) -> str:
    return repr(float(v))


@dataclass(frozen=True)
class GridField:
    points: np.ndarray   # (m, N)
    values: np.ndarray   # (m,)
    spacing: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.points.shape[0] != self.values.shape[0]:
            raise ValueError("points/values length mismatch")

    @property
    def ndim(self) -> int:
        return self.points.shape[1]

    def min(self) -> tuple[float, np.ndarray]:
        i = int(np.argmin(self.values))
        return float(self.values[i]), self.points[i]

    def max(self) -> tuple[float, np.ndarray]:
        i = int(np.argmax(self.values))
        return float(self.values[i]), self.points[i]

    def to_csv(self, path, comments: list[str] | None = None) -> None:
        n = self.ndim
        header = ",".join(f"x{a + 1}" for a in range(n)) + ",value"
        with open(path, "w", newline="\n") as fh:
            for line in comments or []:
                fh.write(f"# {line}\n")
            fh.write(header + "\n")
            for p, v in zip(self.points, self.values):
                fh.write(",".join(format_float(c) for c in p) + "," + format_float(v) + "\n")
