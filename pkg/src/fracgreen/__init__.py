"""Numerical toolkit for the order-dependence of fractional Poisson problems.

Exact ball solutions, the logarithmic Laplacian and its geometry functional,
walk-on-spheres Monte Carlo estimators for the Green operator, and
quantitative Green-norm bounds with a monotonicity certifier.
"""

__version__ = "0.1.0"

from . import specialfn
from .specialfn import (
    EULER_GAMMA,
    GAMMA_MIN,
    ball_volume,
    critical_radius,
    digamma,
    exit_kernel_coeff,
    fraclap_coeff,
    gamma_fn,
    log_kernel_coeff,
    loglap_shift,
    riesz_coeff,
    sphere_area,
    torsion_coeff,
)

__all__ = [
    "__version__",
    "specialfn",
    "EULER_GAMMA",
    "GAMMA_MIN",
    "ball_volume",
    "critical_radius",
    "digamma",
    "exit_kernel_coeff",
    "fraclap_coeff",
    "gamma_fn",
    "log_kernel_coeff",
    "loglap_shift",
    "riesz_coeff",
    "sphere_area",
    "torsion_coeff",
]
