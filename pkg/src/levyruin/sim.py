"""Monte Carlo first-passage engine for the claim-surplus process.

The process is simulated as Brownian motion with drift (variance 2 d_H plus,
optionally, the variance of the replaced small jumps) superposed with a
marked Poisson process of jumps above a truncation level epsilon; jumps below
epsilon are absorbed into the compensating drift anchored to E[X_1] = -q.
First passage above u is detected exactly within each diffusion segment via
the Brownian-bridge maximum, which also drives the running-maximum record
needed for the undershoot from the previous maximum.

Infinite-horizon ruin is decided by a lower barrier -M: once the path falls
below it the revival probability is analytically negligible and the path
counts as non-ruined.  Paths that exhaust the time horizon are reported
separately as censored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import _engine
from .errors import DomainError, EstimationError
from .model import GtscParams, Regime, RegimeReport, pi_x_density, pi_x_tail
from .special import (
    DEFAULT_QUADRATURE,
    gamma,
    integrate_singular,
    lower_incomplete_gamma,
    upper_incomplete_gamma,
)

__all__ = [
    "SimScheme",
    "RuinEvent",
    "EmpiricalCdf",
    "ConditionalLawEstimate",
    "big_jump_rate",
    "sample_jump_above",
    "compensated_drift",
    "mean_jump_integral",
    "small_jump_variance",
    "default_epsilon",
    "default_barrier",
    "default_horizon",
    "default_scheme",
    "simulate_batch",
    "simulate_first_passage",
    "sample_terminal_values",
    "estimate_conditional_laws",
]


@dataclass(frozen=True)
class SimScheme:
    """Discretisation and stopping controls for the path engine.

    ``epsilon`` is the jump truncation level.  ``coarse_epsilon``, when set,
    enables a second, cheaper truncation level used while the path is more
    than ``fine_band`` below the target; leaving it ``None`` runs the plain
    single-level scheme everywhere.  ``dt`` caps the length of individual
    diffusion segments (mode switching / horizon granularity; the segment
    maximum itself is sampled exactly, so results are dt-stable in law).
    """

    epsilon: float
    barrier: float
    horizon: float
    seed: int = 0
    dt: float = 0.5
    use_gaussian_correction: bool = True
    coarse_epsilon: Optional[float] = None
    fine_band: float = 3.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError("epsilon must be > 0")
        if not self.dt > 0:
            raise DomainError("dt must be > 0")
        if not self.barrier > 0:
            raise DomainError("barrier must be > 0")
        if not self.horizon > 0:
            raise DomainError("horizon must be > 0")
        if self.coarse_epsilon is not None:
            if self.coarse_epsilon < self.epsilon:
                raise DomainError("coarse_epsilon must be >= epsilon")
            if not self.fine_band > 0:
                raise DomainError("fine_band must be > 0")


@dataclass(frozen=True)
class RuinEvent:
    """One simulated first-passage outcome."""

    ruined: bool
    tau: float
    overshoot: float
    undershoot: float
    max_undershoot: float
    crept: bool
    censored: bool = False


@dataclass(frozen=True)
class EmpiricalCdf:
    """Empirical conditional distribution on a grid, with sampling metadata."""

    grid: np.ndarray
    values: np.ndarray
    n_ruined: int
    ruin_fraction: float
    ruin_half_width: float


@dataclass(frozen=True)
class ConditionalLawEstimate:
    """Output bundle of :func:`estimate_conditional_laws`."""

    overshoot: EmpiricalCdf
    undershoot: EmpiricalCdf
    max_undershoot: EmpiricalCdf
    creep_fraction: float
    ruin_fraction: float
    ruin_se: float
    n_ruined: int
    n_paths: int
    n_censored: int


# ---------------------------------------------------------------------------
# scheme calibration constants
# ---------------------------------------------------------------------------

def big_jump_rate(p: GtscParams, epsilon: float) -> float:
    """Poisson rate of retained jumps: the Levy tail of X at epsilon."""
    if epsilon <= 0:
        raise DomainError("epsilon must be > 0")
    return pi_x_tail(p, epsilon)


def mean_jump_integral(p: GtscParams, epsilon: float) -> float:
    """int_epsilon^inf y Pi_X(dy) = c eps^{-rho} e^{-alpha eps} + c alpha^rho Gamma(-rho, alpha eps).

    (Integration by parts against the closed-form tail.)
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be > 0")
    return (p.c * epsilon ** (-p.rho) * math.exp(-p.alpha * epsilon)
            + p.c * p.alpha**p.rho * upper_incomplete_gamma(-p.rho, p.alpha * epsilon))


def compensated_drift(p: GtscParams, epsilon: float) -> float:
    """Drift gamma_eps = -q - int_epsilon^inf y Pi_X(dy).

    Anchors the simulated mean slope to E[X_1] = -q once the retained jumps
    are added back.
    """
    return -p.q - mean_jump_integral(p, epsilon)


def small_jump_variance(p: GtscParams, epsilon: float) -> float:
    """int_0^epsilon y^2 Pi_X(dy), the variance of the replaced small jumps."""
    if epsilon <= 0:
        raise DomainError("epsilon must be > 0")
    z = p.alpha * epsilon
    return p.c * p.alpha ** (p.rho - 1.0) * (
        lower_incomplete_gamma(2.0 - p.rho, z)
        + (p.rho + 1.0) * lower_incomplete_gamma(1.0 - p.rho, z))


def small_jump_variance_quad(p: GtscParams, epsilon: float) -> float:
    """Same integral by adaptive quadrature (the independent cross-check)."""
    return integrate_singular(lambda y: y * y * pi_x_density(p, y), 0.0, epsilon,
                              max(p.rho, 0.0), DEFAULT_QUADRATURE)


def sample_jump_above(p: GtscParams, epsilon: float, n: int = 1, seed: int = 0):
    """Draw sizes from the normalised jump tail above epsilon.

    P(J > x) = (x/eps)^{-rho-1} e^{-alpha (x - eps)} for x >= eps, sampled by
    Pareto proposal with tempering acceptance.  Returns a float for n == 1,
    else an array.
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be > 0")
    out = np.empty(int(n), dtype=np.float64)
    _engine.sample_jumps(np.uint64(seed), int(n), float(epsilon), p.rho, p.alpha, out)
    return float(out[0]) if n == 1 else out


# ---------------------------------------------------------------------------
# defaults
# ---------------------------------------------------------------------------

def default_epsilon(p: GtscParams) -> float:
    """Truncation level from the variance-budget rule.

    With a Gaussian part present, the largest epsilon whose replaced-jump
    variance stays below 1% of the total diffusion variance; without one,
    a fixed 1e-3.  Note the rule is conservative: for heavy small-jump
    activity it can produce very small levels and correspondingly expensive
    runs, so production runs typically set epsilon explicitly and validate
    with the epsilon-halving check.
    """
    if p.d_h == 0.0:
        return 1e-3
    budget = 0.01 / 0.99 * 2.0 * p.d_h
    lo, hi = 1e-12, 10.0
    if small_jump_variance(p, hi) <= budget:
        return hi
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if small_jump_variance(p, mid) <= budget:
            lo = mid
        else:
            hi = mid
        if hi / lo < 1.0 + 1e-12:
            break
    return lo


def default_barrier(exponent: float, bias: float = 1e-6) -> float:
    """Lower barrier M with revival probability below ``bias`` of the target
    ruin probability: exp(-exponent * M) <= bias."""
    if exponent <= 0:
        raise DomainError("exponent must be > 0")
    return -math.log(bias) / exponent


def default_horizon(p: GtscParams, u: float, barrier: float) -> float:
    """Generous time cap: many multiples of the mean barrier-hitting time."""
    return 10.0 * (barrier + u + 10.0) / p.q


def default_scheme(p: GtscParams, report: RegimeReport, u: float, seed: int = 0,
                   epsilon: Optional[float] = None,
                   coarse_epsilon: Optional[float] = None) -> SimScheme:
    """Scheme with regime-aware barrier/horizon and the default epsilon rule."""
    if report.regime is Regime.CRAMER:
        exponent = float(report.nu0)
    elif report.regime is Regime.CONVOLUTION_EQUIVALENT:
        exponent = p.alpha
    else:
        raise DomainError("no simulation defaults on the regime boundary")
    eps = default_epsilon(p) if epsilon is None else float(epsilon)
    barrier = default_barrier(exponent)
    return SimScheme(
        epsilon=eps,
        barrier=barrier,
        horizon=default_horizon(p, u, barrier),
        seed=seed,
        coarse_epsilon=coarse_epsilon,
    )


# ---------------------------------------------------------------------------
# engine wrappers
# ---------------------------------------------------------------------------

def _level_constants(p: GtscParams, epsilon: float, correction: bool):
    lam = big_jump_rate(p, epsilon)
    drift = compensated_drift(p, epsilon)
    sig2 = 2.0 * p.d_h + (small_jump_variance(p, epsilon) if correction else 0.0)
    return lam, drift, sig2, epsilon


def _set_workers(workers: Optional[int]):
    if workers is not None:
        import numba

        numba.set_num_threads(max(1, int(workers)))


def simulate_batch(p: GtscParams, u: float, scheme: SimScheme, n: int,
                   path_offset: int = 0, workers: Optional[int] = None) -> dict:
    """Simulate ``n`` paths (global indices offset..offset+n-1); returns arrays.

    Path index, not batch layout, determines each path's random stream, so
    any slicing into batches or threads reproduces identical events.
    """
    if u <= 0:
        raise DomainError("u must be > 0")
    _set_workers(workers)
    lam_f, drift_f, sig2_f, eps_f = _level_constants(p, scheme.epsilon,
                                                     scheme.use_gaussian_correction)
    if scheme.coarse_epsilon is None:
        lam_c, drift_c, sig2_c, eps_c = lam_f, drift_f, sig2_f, eps_f
        band = math.inf
    else:
        lam_c, drift_c, sig2_c, eps_c = _level_constants(p, scheme.coarse_epsilon,
                                                         scheme.use_gaussian_correction)
        band = scheme.fine_band
    n = int(n)
    ruined = np.zeros(n, dtype=np.bool_)
    crept = np.zeros(n, dtype=np.bool_)
    censored = np.zeros(n, dtype=np.bool_)
    tau = np.zeros(n, dtype=np.float64)
    over = np.zeros(n, dtype=np.float64)
    under = np.zeros(n, dtype=np.float64)
    maxu = np.zeros(n, dtype=np.float64)
    _engine.run_first_passage(
        np.uint64(scheme.seed), int(path_offset), n, float(u),
        lam_f, drift_f, sig2_f, eps_f,
        lam_c, drift_c, sig2_c, eps_c,
        band, p.rho, p.alpha,
        scheme.barrier, scheme.horizon, scheme.dt,
        ruined, crept, censored, tau, over, under, maxu)
    return {
        "ruined": ruined, "crept": crept, "censored": censored,
        "tau": tau, "overshoot": over, "undershoot": under,
        "max_undershoot": maxu,
    }


def simulate_first_passage(p: GtscParams, u: float, scheme: SimScheme,
                           path_index: int = 0) -> RuinEvent:
    """One first-passage outcome; the draw is fixed by (scheme.seed, path_index)."""
    arrays = simulate_batch(p, u, scheme, 1, path_offset=path_index)
    return RuinEvent(
        ruined=bool(arrays["ruined"][0]),
        tau=float(arrays["tau"][0]),
        overshoot=float(arrays["overshoot"][0]),
        undershoot=float(arrays["undershoot"][0]),
        max_undershoot=float(arrays["max_undershoot"][0]),
        crept=bool(arrays["crept"][0]),
        censored=bool(arrays["censored"][0]),
    )


def sample_terminal_values(p: GtscParams, scheme: SimScheme, t: float, n: int,
                           path_offset: int = 0, workers: Optional[int] = None) -> np.ndarray:
    """X_t for n independent paths (mean-slope calibration)."""
    if t <= 0:
        raise DomainError("t must be > 0")
    _set_workers(workers)
    lam, drift, sig2, eps = _level_constants(p, scheme.epsilon,
                                             scheme.use_gaussian_correction)
    out = np.empty(int(n), dtype=np.float64)
    _engine.run_terminal_value(np.uint64(scheme.seed), int(path_offset), int(n),
                               float(t), lam, drift, sig2, eps, p.rho, p.alpha, out)
    return out


# ---------------------------------------------------------------------------
# conditional-law estimation
# ---------------------------------------------------------------------------

def _empirical_cdf(values: np.ndarray, grid: np.ndarray, n_ruined: int,
                   ruin_fraction: float, half_width: float) -> EmpiricalCdf:
    ordered = np.sort(values)
    cdf = np.searchsorted(ordered, grid, side="right") / max(n_ruined, 1)
    return EmpiricalCdf(grid=grid.copy(), values=cdf, n_ruined=n_ruined,
                        ruin_fraction=ruin_fraction, ruin_half_width=half_width)


def estimate_conditional_laws(p: GtscParams, u: float, n_target_ruined: int,
                              scheme: SimScheme, grid: Sequence[float],
                              max_paths: Optional[int] = None,
                              workers: Optional[int] = None) -> ConditionalLawEstimate:
    """Run paths until ``n_target_ruined`` ruin events are banked.

    Returns the empirical conditional CDFs of the three ruin gaps on the
    grid, the creep fraction among ruined paths, and the raw ruin fraction
    with a binomial half-width.  Batch sizes adapt to the observed ruin
    fraction but the event stream depends only on (seed, path index), so the
    output is reproducible for any worker count.
    """
    if n_target_ruined < 1:
        raise DomainError("n_target_ruined must be >= 1")
    grid = np.asarray(list(grid), dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) < 0) or grid[0] < 0:
        raise DomainError("grid must be ascending and nonnegative")
    if max_paths is None:
        max_paths = 4000 * n_target_ruined
    over_chunks = []
    under_chunks = []
    maxu_chunks = []
    n_done = 0
    n_ruined = 0
    n_creep = 0
    n_censored = 0
    batch = min(20_000, max_paths)
    while n_ruined < n_target_ruined and n_done < max_paths:
        batch = int(min(batch, max_paths - n_done))
        arrays = simulate_batch(p, u, scheme, batch, path_offset=n_done, workers=workers)
        mask = arrays["ruined"]
        n_done += batch
        n_ruined += int(mask.sum())
        n_creep += int(arrays["crept"].sum())
        n_censored += int(arrays["censored"].sum())
        if mask.any():
            over_chunks.append(arrays["overshoot"][mask])
            under_chunks.append(arrays["undershoot"][mask])
            maxu_chunks.append(arrays["max_undershoot"][mask])
        # size the next batch from the running ruin-rate estimate
        p_hat = (n_ruined + 1.0) / (n_done + 1.0)
        need = max(n_target_ruined - n_ruined, 0)
        batch = int(np.clip(1.2 * need / p_hat, 20_000, 2_000_000))
    if n_ruined == 0:
        raise EstimationError(
            f"no ruin events in {n_done} paths at u = {u:g}; "
            "increase the path budget or lower u")
    over = np.concatenate(over_chunks)
    under = np.concatenate(under_chunks)
    maxu = np.concatenate(maxu_chunks)
    ruin_fraction = n_ruined / n_done
    se = math.sqrt(ruin_fraction * (1.0 - ruin_fraction) / n_done)
    half = 1.96 * se
    return ConditionalLawEstimate(
        overshoot=_empirical_cdf(over, grid, n_ruined, ruin_fraction, half),
        undershoot=_empirical_cdf(under, grid, n_ruined, ruin_fraction, half),
        max_undershoot=_empirical_cdf(maxu, grid, n_ruined, ruin_fraction, half),
        creep_fraction=n_creep / n_ruined,
        ruin_fraction=ruin_fraction,
        ruin_se=se,
        n_ruined=n_ruined,
        n_paths=n_done,
        n_censored=n_censored,
    )
