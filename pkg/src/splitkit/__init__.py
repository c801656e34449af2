"""Analysis and analytic synthesis of operator-splitting symplectic integrators."""

from .scheme import (
    ErrorCoefficients,
    GradientTerm,
    PartialSums,
    SplittingScheme,
    VELOCITY,
    POSITION,
    delta_g,
    delta_g_prime,
    dual,
    error_coefficients,
    g_sum,
    is_symmetric,
    load_scheme,
    partial_sums,
    reversed_scheme,
    save_scheme,
)
from .bch import LieElement, bch_product, bracket, expand_scheme
from .bounds import (
    LagrangeSolution,
    TheoremReport,
    bound_part_a,
    bound_part_b,
    corollary_gap,
    correctability_residual,
    quadratic_minimum,
)
from .construct import (
    BUILTIN_SCHEMES,
    builtin_scheme,
    forest_ruth,
    gradient_position,
    gradient_velocity,
    leapfrog,
    prune_zero_factors,
    velocity_from_drifts,
    zero_dg_drifts_from_ratios,
    zero_dg_symmetric_drifts,
)
from .dynamics import (
    BUILTIN_SYSTEMS,
    ConvergenceReport,
    HamiltonianSystem,
    State,
    Trajectory,
    builtin_system,
    convergence_study,
    drift,
    energy,
    gradient_kick,
    harmonic_oscillator,
    integrate,
    kepler,
    kepler_initial_state,
    kick,
    make_state,
    pendulum,
    step,
    symplectic_check,
)
from . import errors

__version__ = "0.1.0"
