"""Walk-on-spheres Monte Carlo estimators for the fractional Green operator,
exterior flux, operator decomposition, and the order-derivative pipeline."""

from .backend import HAVE_KERNEL, active_backend
from .config import Estimate, ExcessiveTruncationError, WosConfig
from .engine import exit_radii, run_point, sample_exit, solve_green
from .flux import (
    DecompositionResult,
    FluxTable,
    decomposition_residual,
    derivative_pipeline,
    solve_flux_q,
    solve_green_pair,
)
from .rng import SplitMixStream

__all__ = [
    "HAVE_KERNEL",
    "active_backend",
    "Estimate",
    "ExcessiveTruncationError",
    "WosConfig",
    "exit_radii",
    "run_point",
    "sample_exit",
    "solve_green",
    "DecompositionResult",
    "FluxTable",
    "decomposition_residual",
    "derivative_pipeline",
    "solve_flux_q",
    "solve_green_pair",
    "SplitMixStream",
]
