"""High-precision strong-coupling expansion of the quartic anharmonic oscillator.

The divergent weak-coupling perturbation series of the ground-state energy
(generated exactly by the Bender-Wu recursion) is resummed through a
variational trial frequency into a convergent strong-coupling expansion;
the package extracts the expansion coefficients to ~20 significant digits,
evaluates the resulting energies against published rigorous bounds, and
quantifies the exp(-kappa_0 - kappa_1 N^(1/3)) convergence law, with an
independent Rayleigh-Ritz eigensolver as cross-check.
"""

from .numerics import DEFAULT_CONTEXT, PrecisionContext
from .benderwu import BWSeries, generate
from .strongcoupling import (
    DEFAULT_SCHEDULE,
    FrequencySchedule,
    StrongCouplingCoefficient,
    alpha,
    alpha_table,
)
from .evaluate import VINETTE_CIZEK_BOUNDS, check_bounds, strong_energy
from .diagnostics import kappa_estimate
from .oracle import RitzConfig, ritz_ground_energy

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONTEXT",
    "PrecisionContext",
    "BWSeries",
    "generate",
    "DEFAULT_SCHEDULE",
    "FrequencySchedule",
    "StrongCouplingCoefficient",
    "alpha",
    "alpha_table",
    "VINETTE_CIZEK_BOUNDS",
    "check_bounds",
    "strong_energy",
    "kappa_estimate",
    "RitzConfig",
    "ritz_ground_energy",
    "__version__",
]
