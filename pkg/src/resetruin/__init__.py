"""Ruin probabilities for a nearest-neighbor walk with geometric resetting.

The walk lives on {0, ..., a} with absorbing ends, steps right with
probability p, and at every tick is first returned to its start site
with probability gamma. Three independent routes compute the ruin
(absorption at 0) probability and cross-check each other:

  spectral_core   closed-form ratio over the sine modes of the
                  symmetrized interior operator
  renewal         generating-function ratio from the first reset cycle
  oracle          direct linear solve of the absorption system

montecarlo adds a reproducible counter-based simulation, and critical
analyzes d ruin / d gamma: its sign structure, the even-a midpoint
invariance, and the bias-driven shift of the sign change.
"""

from .critical import (
    CriticalPointReport,
    DerivativeComponents,
    bias_shift_coefficient,
    central_site_bound,
    derivative,
    midpoint_invariance_sweep,
    sign_change,
)
from .errors import NumericError, RunawayError, StructuralViolationError
from .montecarlo import (
    DEFAULT_SEED,
    McEstimate,
    TrajectoryOutcome,
    estimate_ruin,
    simulate_trajectory,
)
from .oracle import (
    build_linear_system,
    doob_symmetry_check,
    exact_ruin,
    exact_ruin_profile,
    symmetrized_eigenvalues,
    symmetrized_operator,
)
from .renewal import (
    FiniteTimeDistribution,
    finite_time_spectral,
    generating_functions,
    ruin_probability_renewal,
)
from .spectral_core import (
    SpectralDecomposition,
    SpectralMode,
    WalkConfig,
    classical_ruin,
    decompose,
    eigenvalue,
    midpoint_value,
    reset_weight,
    ruin_probability_spectral,
    ruin_profile_spectral,
)

__version__ = "0.1.0"

__all__ = [
    "CriticalPointReport",
    "DEFAULT_SEED",
    "DerivativeComponents",
    "FiniteTimeDistribution",
    "McEstimate",
    "NumericError",
    "RunawayError",
    "SpectralDecomposition",
    "SpectralMode",
    "StructuralViolationError",
    "TrajectoryOutcome",
    "WalkConfig",
    "__version__",
    "bias_shift_coefficient",
    "build_linear_system",
    "central_site_bound",
    "classical_ruin",
    "decompose",
    "derivative",
    "doob_symmetry_check",
    "eigenvalue",
    "estimate_ruin",
    "exact_ruin",
    "exact_ruin_profile",
    "finite_time_spectral",
    "generating_functions",
    "midpoint_invariance_sweep",
    "midpoint_value",
    "reset_weight",
    "ruin_probability_renewal",
    "ruin_probability_spectral",
    "ruin_profile_spectral",
    "sign_change",
    "simulate_trajectory",
    "symmetrized_eigenvalues",
    "symmetrized_operator",
]
