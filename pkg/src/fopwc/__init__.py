"""Fractional-order piecewise-continuous 4D system toolkit.

Mittag-Leffler functions, a fractional Adams-Bashforth-Moulton solver,
smooth approximations of sgn and |x|, the system itself with its closed-form
affine solutions, and dynamics tools (Lyapunov spectra, bifurcation scans,
variant comparison, periodicity checks).
"""

__version__ = "0.1.0"

from .abm import FDEProblem, IntegrationError, Trajectory, abm_integrate, abm_weights
from .dynamics import (
    PeriodicTestProblem,
    asymptotic_period_estimate,
    bifurcation_scan,
    compare_variants,
    lyapunov_spectrum,
    verify_ml_periodic,
)
from .mlfunc import MLConvergenceError, MLOrder, ml_matrix, ml_scalar
from .regularize import Exact, Global, Local, Quadratic
from .sprott import (
    DEFAULT_X0,
    RhsVariant,
    SystemParams,
    affine_pieces,
    equilibria,
    jacobian,
    ml_solution,
    rhs,
    simulate,
    switching_time,
)

__all__ = [
    "FDEProblem",
    "IntegrationError",
    "Trajectory",
    "abm_integrate",
    "abm_weights",
    "PeriodicTestProblem",
    "asymptotic_period_estimate",
    "bifurcation_scan",
    "compare_variants",
    "lyapunov_spectrum",
    "verify_ml_periodic",
    "MLConvergenceError",
    "MLOrder",
    "ml_matrix",
    "ml_scalar",
    "Exact",
    "Global",
    "Local",
    "Quadratic",
    "DEFAULT_X0",
    "RhsVariant",
    "SystemParams",
    "affine_pieces",
    "equilibria",
    "jacobian",
    "ml_solution",
    "rhs",
    "simulate",
    "switching_time",
]
