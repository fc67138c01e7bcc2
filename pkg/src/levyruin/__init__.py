"""Ruin asymptotics and first-passage Monte Carlo for spectrally positive
Levy insurance risk processes whose ascending ladder height is a killed
tempered stable subordinator with drift.

The package classifies a five-parameter model into its tail regime (Cramer
versus convolution equivalent), evaluates the limiting conditional
distributions of the overshoot and the two undershoots at ruin together with
the ruin-probability asymptotics, and verifies them against a Monte Carlo
first-passage simulator of the underlying process.
"""

from .errors import (
    AccuracyError,
    DomainError,
    EstimationError,
    LevyRuinError,
    RegimeError,
)
from .laws import (
    CdfCurve,
    LadderModel,
    WhichLaw,
    creep_probability,
    find_tail_band_x,
    gtsc_ladder,
    mass_horizon,
    max_undershoot_cdf,
    max_undershoot_tail_asymptotic,
    overshoot_cdf,
    overshoot_tail_asymptotic,
    ruin_probability_asymptotic,
    tabulate,
    tail_ratio,
    undershoot_cdf,
    undershoot_tail_asymptotic,
    undershoot_total_mass,
)
from .model import (
    GtscParams,
    Regime,
    RegimeReport,
    beta_constants,
    classify,
    cramer_root,
    discriminant_f,
    discriminant_root,
    m_star,
    pi_h_tail,
    pi_x_tail,
    psi_h,
    psi_x,
)
from .sim import (
    ConditionalLawEstimate,
    EmpiricalCdf,
    RuinEvent,
    SimScheme,
    big_jump_rate,
    compensated_drift,
    default_scheme,
    estimate_conditional_laws,
    sample_jump_above,
    simulate_first_passage,
    small_jump_variance,
)
from .special import (
    QuadratureSpec,
    gamma,
    integrate_singular,
    upper_incomplete_gamma,
)

__version__ = "0.1.0"
