"""Configuration and result types shared by the Monte Carlo estimators."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

__all__ = ["WosConfig", "Estimate", "ExcessiveTruncationError"]


class ExcessiveTruncationError(RuntimeError):
    """More than the tolerated fraction of walks hit the step cap."""


@dataclass(frozen=True)
class WosConfig:
    samples: int = 100_000
    max_steps: int = 10_000
    # Absorption distance as a fraction of the diameter.  Measured absorption
    # bias is ~0.6 * eps_shell on ball benchmarks, so 1e-4 keeps it below the
    # Monte Carlo noise at 1e6 walks.
    eps_shell: float = 1e-4
    seed: int = 0
    shrink: float = 1.0              # step-ball radius factor on the boundary distance
    flux_interior_nodes: int = 64    # interior quadrature nodes for flux tabulation
    threads: int | None = None

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not (0.0 < self.eps_shell < 0.1):
            raise ValueError("eps_shell must lie in (0, 0.1)")
        if not (0.0 < self.shrink <= 1.0):
            raise ValueError("shrink must lie in (0, 1]")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.flux_interior_nodes < 4:
            raise ValueError("flux_interior_nodes must be >= 4")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Estimate:
    value: float
    stderr: float
    n: int
    truncated: int
    seed: int = 0
    config: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def truncated_fraction(self) -> float:
        return self.truncated / max(self.n, 1)

    @property
    def valid(self) -> bool:
        return self.truncated_fraction < 0.01

    def to_json(self, **extra) -> str:
        payload = {
            "value": self.value,
            "stderr": self.stderr,
            "n": self.n,
            "truncated": self.truncated,
            "seed": self.seed,
            "config": self.config,
        }
        if self.extras:
            payload["extras"] = self.extras
        payload.update(extra)
        return json.dumps(payload, indent=2)
