"""Limiting overshoot/undershoot distributions and ruin-probability asymptotics.

Three conditional limit laws are evaluated, as functions of x >= 0:

* Row I   -- overshoot of the ruin level,
* Row II  -- undershoot (surplus just before ruin),
* Row III -- undershoot from the previous running maximum,

in both the Cramer regime (decay exponent nu_0) and the convolution
equivalent regime (decay exponent alpha, improper undershoot laws with mass
beta2 escaping to infinity).  Every law has a closed form in terms of the
upper incomplete gamma function when rho is in (0, 1); a generic
quadrature-based evaluator accepts arbitrary ladder data and is used as the
independent cross-check of those closed forms.

With a := alpha - nu (a = 0 in the convolution equivalent case) and
GammaU(s, z) the upper incomplete gamma function, the closed forms reduce to
two brackets:

    B(x)  = a^rho GammaU(-rho, a x) e^{a x}
            - alpha^rho GammaU(-rho, alpha x) e^{alpha x}   (scaled form)
    L(x)  = int_0^x y^{-rho-1} (e^{-a y} - e^{-alpha y}) dy

    Row I   = 1 - beta2 e^{-nu x} - (c/q) e^{-alpha x} B(x)
    Row II  = nu d_H/q + (c/q) L(x)
    Row III = 1 - beta2 - (c/q) e^{-a x} B(x)

where the a -> 0 limit of a^rho GammaU(-rho, a x) e^{a x} is x^{-rho}/rho.
All three share the creeping atom nu d_H / q at x = 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import AccuracyError, DomainError, RegimeError
from .model import (
    GtscParams,
    Regime,
    RegimeReport,
    gamma,
    pi_h_tail,
    pi_x_tail,
)
from .special import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    integrate_singular,
    upper_incomplete_gamma,
)

__all__ = [
    "WhichLaw",
    "LadderModel",
    "CdfCurve",
    "gtsc_ladder",
    "overshoot_cdf",
    "undershoot_cdf",
    "max_undershoot_cdf",
    "creep_probability",
    "undershoot_total_mass",
    "ruin_probability_asymptotic",
    "ruin_asymptotic_cramer_closed",
    "ruin_asymptotic_ce_closed",
    "overshoot_tail_asymptotic",
    "undershoot_tail_asymptotic",
    "max_undershoot_tail_asymptotic",
    "tail_ratio",
    "find_tail_band_x",
    "mass_horizon",
    "tabulate",
]


class WhichLaw(enum.Enum):
    OVERSHOOT = "overshoot"
    UNDERSHOOT = "undershoot"
    MAX_UNDERSHOOT = "max_undershoot"


@dataclass(frozen=True)
class LadderModel:
    """Ladder data feeding the generic (Table-driven) law evaluators.

    ``pi_h_tail`` is the ladder Levy tail function, ``g_kernel(x, y)`` the
    undershoot kernel, ``exponent`` the regime's decay rate (nu_0 or alpha)
    and ``beta2`` the escaping mass (0 in the Cramer regime).

    Quadrature plumbing: ``tail_order`` is the algebraic blow-up order of
    the tail at 0 (y^{-tail_order}); ``scaled_tail_rate`` lambda and
    ``pi_h_tail_scaled`` (w -> e^{lambda w} * pi_h_tail(w)) keep integrands
    representable where the raw tail underflows.  ``gtsc`` carries the
    closed-form backing when one exists.
    """

    q: float
    d_h: float
    pi_h_tail: Callable[[float], float]
    g_kernel: Callable[[float, float], float]
    exponent: float
    regime: Regime
    beta2: float = 0.0
    tail_order: float = 0.0
    scaled_tail_rate: float = 0.0
    pi_h_tail_scaled: Optional[Callable[[float], float]] = None
    gtsc: Optional[GtscParams] = None

    def __post_init__(self):
        if self.regime is Regime.BOUNDARY:
            raise RegimeError("limit laws are undefined on the regime boundary")
        if not self.q > 0 or self.d_h < 0 or not self.exponent > 0:
            raise DomainError("invalid ladder data: require q > 0, d_H >= 0, exponent > 0")
        if self.regime is Regime.CRAMER and self.beta2 != 0.0:
            raise DomainError("beta2 must be 0 in the Cramer regime")
        if self.regime is Regime.CONVOLUTION_EQUIVALENT and not 0.0 < self.beta2 < 1.0:
            raise DomainError("beta2 must lie in (0, 1) in the convolution equivalent regime")
        if not 0.0 <= self.tail_order < 1.0:
            raise DomainError("tail_order must lie in [0, 1)")

    @property
    def creep(self) -> float:
        """Shared atom of all three laws at x = 0."""
        return self.exponent * self.d_h / self.q

    def scaled_tail(self, w: float) -> float:
        if self.pi_h_tail_scaled is not None:
            return self.pi_h_tail_scaled(w)
        return math.exp(self.scaled_tail_rate * w) * self.pi_h_tail(w)


@dataclass(frozen=True)
class CdfCurve:
    """A distribution function tabulated on a grid.

    ``mass_at_infinity`` carries the defect of improper laws; values plus
    that mass never exceed 1 (up to rounding).
    """

    grid: np.ndarray
    values: np.ndarray
    mass_at_infinity: float = 0.0
    atom_at_zero: float = 0.0

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or v.shape != g.shape:
            raise DomainError("grid and values must be 1-d arrays of equal length")
        if g.size and (np.any(np.diff(g) < 0) or g[0] < 0):
            raise DomainError("grid must be ascending and nonnegative")
        if np.any(np.diff(v) < -1e-12):
            raise DomainError("cdf values must be nondecreasing")
        if v.size and v[-1] + self.mass_at_infinity > 1.0 + 1e-9:
            raise DomainError("total mass exceeds 1")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)


# ---------------------------------------------------------------------------
# closed forms (rho in (0, 1))
# ---------------------------------------------------------------------------

def _closed_params(m: LadderModel):
    p = m.gtsc
    if p is None or not 0.0 < p.rho < 1.0:
        return None
    nu = m.exponent
    a = p.alpha - nu if m.regime is Regime.CRAMER else 0.0
    return p, nu, a


def _tail_bracket_scaled(a: float, alpha: float, rho: float, x: float) -> float:
    """B(x): the scaled bracket shared by Rows I and III, x > 0."""
    t_alpha = alpha**rho * upper_incomplete_gamma(-rho, alpha * x, scaled=True)
    if a == 0.0:
        t_a = x ** (-rho) / rho
    else:
        t_a = a**rho * upper_incomplete_gamma(-rho, a * x, scaled=True)
    return t_a - t_alpha


def _low_integral(a: float, alpha: float, rho: float, x: float) -> float:
    """L(x) = int_0^x y^{-rho-1} (e^{-a y} - e^{-alpha y}) dy, x > 0, 0 <= a < alpha."""
    g = gamma(-rho)
    t_alpha = alpha**rho * upper_incomplete_gamma(-rho, alpha * x)
    if a == 0.0:
        ga = 0.0
        t_a = x ** (-rho) / rho * math.exp(0.0)  # a->0 limit of a^rho GammaU(-rho, ax)
        t_a = x ** (-rho) / rho
    else:
        ga = a**rho
        t_a = a**rho * upper_incomplete_gamma(-rho, a * x)
    return g * (ga - alpha**rho) - t_a + t_alpha


def _low_integral_full(a: float, alpha: float, rho: float) -> float:
    """L(inf) = -Gamma(-rho) (alpha^rho - a^rho)."""
    ga = a**rho if a > 0.0 else 0.0
    return -gamma(-rho) * (alpha**rho - ga)


def _overshoot_closed(m: LadderModel, x: float) -> float:
    p, nu, a = _closed_params(m)  # type: ignore[misc]
    if x == 0.0:
        return m.creep
    b = _tail_bracket_scaled(a, p.alpha, p.rho, x)
    return 1.0 - m.beta2 * math.exp(-nu * x) - (p.c / p.q) * math.exp(-p.alpha * x) * b


def _undershoot_closed(m: LadderModel, x: float) -> float:
    p, nu, a = _closed_params(m)  # type: ignore[misc]
    if x == 0.0:
        return m.creep
    return m.creep + (p.c / p.q) * _low_integral(a, p.alpha, p.rho, x)


def _max_undershoot_closed(m: LadderModel, x: float) -> float:
    p, nu, a = _closed_params(m)  # type: ignore[misc]
    if x == 0.0:
        return m.creep
    b = _tail_bracket_scaled(a, p.alpha, p.rho, x)
    return 1.0 - m.beta2 - (p.c / p.q) * math.exp(-a * x) * b


# ---------------------------------------------------------------------------
# generic quadrature evaluators
# ---------------------------------------------------------------------------

_QUAD_EXP_CAP = 700.0


def _overshoot_quad(m: LadderModel, x: float, spec: QuadratureSpec) -> float:
    """Row I against the tail function, by parts:

    1 - beta2 e^{-nu x} - (nu/q) int_0^inf e^{nu y} Pi_H(x + y) dy,
    evaluated through the scaled tail so the integrand never over/underflows.
    """
    nu = m.exponent
    lam = m.scaled_tail_rate
    a_s = lam - nu
    if a_s < -1e-12:
        raise DomainError("scaled_tail_rate must dominate the exponent for Row I quadrature")

    def integrand(y: float) -> float:
        return math.exp(-a_s * y) * m.scaled_tail(x + y)

    if a_s > 0.0:
        order = m.tail_order if x == 0.0 else 0.0
        total = integrate_singular(integrand, 0.0, np.inf, order, spec)
    else:
        # pure power decay: invert the tail piece so it becomes a finite
        # integral with an endpoint singularity of order 1 - tail_order
        y0 = max(1.0, x)
        order = m.tail_order if x == 0.0 else 0.0
        head = integrate_singular(integrand, 0.0, y0, order, spec)

        def inv(t: float) -> float:
            w = 1.0 / t
            return m.scaled_tail(w) / (t * t)

        tail = integrate_singular(inv, 0.0, 1.0 / (x + y0), 1.0 - m.tail_order, spec)
        total = head + tail
    return 1.0 - m.beta2 * math.exp(-nu * x) - (nu / m.q) * math.exp(-lam * x) * total


def _weighted_cdf_quad(m: LadderModel, x: float, weight: Callable[[float], float],
                       spec: QuadratureSpec) -> float:
    """nu d_H/q + (nu/q) int_0^x weight(y) e^{nu y} dy for Rows II/III."""
    nu = m.exponent
    if nu * x > _QUAD_EXP_CAP:
        raise AccuracyError("generic quadrature horizon exceeded (exponent*x too large); "
                            "use the closed forms for far-tail evaluation")
    if x == 0.0:
        return m.creep

    def integrand(y: float) -> float:
        return weight(y) * math.exp(nu * y)

    val = integrate_singular(integrand, 0.0, x, m.tail_order, spec)
    return m.creep + (nu / m.q) * val


def overshoot_cdf(m: LadderModel, x: float, method: str = "auto",
                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Limiting conditional law of the overshoot above the ruin level."""
    x = _check_x(x)
    if method == "auto":
        method = "closed" if _closed_params(m) else "quadrature"
    if method == "closed":
        if _closed_params(m) is None:
            raise DomainError("no closed form attached to this ladder model")
        return _overshoot_closed(m, x)
    return _overshoot_quad(m, x, spec)


def undershoot_cdf(m: LadderModel, x: float, method: str = "auto",
                   spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Limiting conditional law of the undershoot below the ruin level."""
    x = _check_x(x)
    if method == "auto":
        method = "closed" if _closed_params(m) else "quadrature"
    if method == "closed":
        if _closed_params(m) is None:
            raise DomainError("no closed form attached to this ladder model")
        return _undershoot_closed(m, x)
    return _weighted_cdf_quad(m, x, lambda y: m.g_kernel(x, y), spec)


def max_undershoot_cdf(m: LadderModel, x: float, method: str = "auto",
                       spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Limiting conditional law of the undershoot from the previous maximum."""
    x = _check_x(x)
    if method == "auto":
        method = "closed" if _closed_params(m) else "quadrature"
    if method == "closed":
        if _closed_params(m) is None:
            raise DomainError("no closed form attached to this ladder model")
        return _max_undershoot_closed(m, x)
    return _weighted_cdf_quad(m, x, m.pi_h_tail, spec)


def creep_probability(m: LadderModel) -> float:
    """Limiting conditional probability of crossing continuously."""
    return m.creep


def undershoot_total_mass(m: LadderModel) -> float:
    """Total mass of the undershoot laws: 1, or 1 - beta2 when improper."""
    return 1.0 - m.beta2


def _check_x(x: float) -> float:
    x = float(x)
    if x < 0.0:
        raise DomainError(f"law arguments must satisfy x >= 0, got {x:g}")
    return x


# ---------------------------------------------------------------------------
# model construction
# ---------------------------------------------------------------------------

def gtsc_ladder(p: GtscParams, report: RegimeReport) -> LadderModel:
    """Ladder data for the five-parameter model.

    The descending ladder is unit drift, so the undershoot kernel collapses to
    g_x(y) = Pi_H_tail(y) - Pi_H_tail(x); the scaled tail carries the
    tempering factor analytically for far-tail quadrature.
    """
    if report.regime is Regime.BOUNDARY:
        raise RegimeError("limit laws are undefined on the regime boundary")
    if report.regime is Regime.CRAMER:
        exponent = float(report.nu0)
        beta2 = 0.0
    else:
        exponent = p.alpha
        beta2 = float(report.beta2)

    def tail(y: float) -> float:
        return pi_h_tail(p, y)

    def tail_scaled(w: float) -> float:
        return p.c * p.alpha**p.rho * upper_incomplete_gamma(-p.rho, p.alpha * w, scaled=True)

    def g_kernel(x: float, y: float) -> float:
        if y >= x:
            return 0.0
        return pi_h_tail(p, y) - pi_h_tail(p, x)

    return LadderModel(
        q=p.q,
        d_h=p.d_h,
        pi_h_tail=tail,
        g_kernel=g_kernel,
        exponent=exponent,
        regime=report.regime,
        beta2=beta2,
        tail_order=max(p.rho, 0.0),
        scaled_tail_rate=p.alpha,
        pi_h_tail_scaled=tail_scaled,
        gtsc=p if 0.0 < p.rho < 1.0 else None,
    )


# ---------------------------------------------------------------------------
# ruin probability asymptotics
# ---------------------------------------------------------------------------

def ruin_probability_asymptotic(p: GtscParams, report: RegimeReport, u: float) -> float:
    """Leading-order P(ruin from initial reserve u) as u -> infinity.

    Cramer: q e^{-nu0 u} / (nu0 m*).  Convolution equivalent: the claim-tail
    form Pi_X_tail(u) / (beta1 beta2), whose closed GTSC evaluation equals
    c q u^{-rho-1} e^{-alpha u} / (alpha (q - alpha d_H + c alpha^rho Gamma(-rho))^2).
    """
    u = float(u)
    if u <= 0.0:
        raise DomainError("u must be > 0")
    if report.regime is Regime.CRAMER:
        nu0 = float(report.nu0)
        return p.q * math.exp(-nu0 * u) / (nu0 * float(report.m_star))
    if report.regime is Regime.CONVOLUTION_EQUIVALENT:
        return pi_x_tail(p, u) / (float(report.beta1) * float(report.beta2))
    raise RegimeError("no ruin asymptotic on the regime boundary")


def ruin_asymptotic_cramer_closed(p: GtscParams, nu0: float, u: float) -> float:
    """The equivalent fully expanded Cramer form (cross-check of the m* form)."""
    a = p.alpha - nu0
    g = gamma(-p.rho)
    num = p.q * a ** (1.0 - p.rho) * math.exp(-nu0 * u)
    den = nu0 * (p.d_h * a ** (1.0 - p.rho) - p.c * p.rho * g)
    return num / den


def ruin_asymptotic_ce_closed(p: GtscParams, u: float) -> float:
    """The equivalent fully expanded convolution equivalent form."""
    g = gamma(-p.rho)
    den = p.alpha * (p.q - p.alpha * p.d_h + p.c * p.alpha**p.rho * g) ** 2
    return p.c * p.q / den * u ** (-p.rho - 1.0) * math.exp(-p.alpha * u)


# ---------------------------------------------------------------------------
# far-tail asymptotics and ratio diagnostics
# ---------------------------------------------------------------------------

def _require_closed(p: GtscParams, report: RegimeReport):
    if report.regime is Regime.BOUNDARY:
        raise RegimeError("no tail asymptotics on the regime boundary")
    if not 0.0 < p.rho < 1.0:
        raise DomainError("tail asymptotics use the closed forms, rho in (0, 1)")


def overshoot_tail_asymptotic(p: GtscParams, report: RegimeReport, x: float) -> float:
    """Leading term of 1 - RowI(x) as x -> infinity."""
    _require_closed(p, report)
    x = float(x)
    if x <= 0.0:
        raise DomainError("x must be > 0")
    if report.regime is Regime.CRAMER:
        a = p.alpha - float(report.nu0)
        return (p.c / p.q) * (1.0 / a - 1.0 / p.alpha) * x ** (-p.rho - 1.0) * math.exp(-p.alpha * x)
    return float(report.beta2) * math.exp(-p.alpha * x)


def undershoot_tail_asymptotic(p: GtscParams, report: RegimeReport, x: float) -> float:
    """Leading term of the Row II defect (from 1, or from 1 - beta2) as x -> infinity."""
    _require_closed(p, report)
    x = float(x)
    if x <= 0.0:
        raise DomainError("x must be > 0")
    if report.regime is Regime.CRAMER:
        a = p.alpha - float(report.nu0)
        return p.c / (p.q * a) * x ** (-p.rho - 1.0) * math.exp(-a * x)
    return p.c / (p.rho * p.q) * x ** (-p.rho)


def max_undershoot_tail_asymptotic(p: GtscParams, report: RegimeReport, x: float) -> float:
    """Leading term of the Row III defect as x -> infinity."""
    _require_closed(p, report)
    x = float(x)
    if x <= 0.0:
        raise DomainError("x must be > 0")
    if report.regime is Regime.CRAMER:
        a = p.alpha - float(report.nu0)
        return (p.c / p.q) * (1.0 / a - 1.0 / p.alpha) * x ** (-p.rho - 1.0) * math.exp(-a * x)
    return p.c / (p.rho * p.q) * x ** (-p.rho)


def tail_ratio(p: GtscParams, report: RegimeReport, which: WhichLaw, x: float) -> float:
    """Exact CDF defect divided by its leading asymptotic, computed in scaled
    form so the ratio stays finite far beyond double-precision tail underflow."""
    _require_closed(p, report)
    x = float(x)
    if x <= 0.0:
        raise DomainError("x must be > 0")
    rho, alpha, c, q = p.rho, p.alpha, p.c, p.q
    if report.regime is Regime.CRAMER:
        nu = float(report.nu0)
        a = alpha - nu
        bracket = _tail_bracket_scaled(a, alpha, rho, x)
        if which in (WhichLaw.OVERSHOOT, WhichLaw.MAX_UNDERSHOOT):
            return bracket / ((1.0 / a - 1.0 / alpha) * x ** (-rho - 1.0))
        t_a = a**rho * upper_incomplete_gamma(-rho, a * x, scaled=True)
        t_alpha = alpha**rho * upper_incomplete_gamma(-rho, alpha * x, scaled=True)
        evx = math.exp(-nu * x) if nu * x < _QUAD_EXP_CAP else 0.0
        defect_scaled = t_a - evx * t_alpha  # e^{a x} * defect / (c/q)
        return defect_scaled * a * x ** (rho + 1.0)
    beta2 = float(report.beta2)
    bracket = _tail_bracket_scaled(0.0, alpha, rho, x)
    if which is WhichLaw.OVERSHOOT:
        return 1.0 + c * bracket / (q * beta2)
    if which is WhichLaw.UNDERSHOOT:
        q_unscaled = upper_incomplete_gamma(-rho, alpha * x)
        return 1.0 - rho * x**rho * alpha**rho * q_unscaled
    return rho * x**rho * bracket


def find_tail_band_x(p: GtscParams, report: RegimeReport, which: WhichLaw,
                     band: float = 0.04, x0: float = 10.0) -> float:
    """Smallest x (up to doubling resolution) with |tail_ratio - 1| <= band."""
    x = x0
    for _ in range(200):
        if abs(tail_ratio(p, report, which, x) - 1.0) <= band:
            return x
        x *= 2.0
    raise AccuracyError("tail ratio did not enter the requested band")


def mass_horizon(p: GtscParams, report: RegimeReport, bound: float = 1e-9) -> float:
    """x beyond which the Row II/III tail bound drops below ``bound``.

    Turns the x -> infinity mass identities into testable assertions: the
    larger of the two rows' asymptotic coefficients is used.
    """
    _require_closed(p, report)
    if report.regime is Regime.CONVOLUTION_EQUIVALENT:
        return (p.c / (p.rho * p.q * bound)) ** (1.0 / p.rho)
    nu = float(report.nu0)
    a = p.alpha - nu
    coeff = (p.c / p.q) * max(1.0 / a, 1.0 / a - 1.0 / p.alpha)
    x = 1.0
    for _ in range(400):
        if coeff * x ** (-p.rho - 1.0) * math.exp(-a * x) < bound:
            return x
        x *= 1.5
    raise AccuracyError("mass horizon search failed")


# ---------------------------------------------------------------------------
# tabulation
# ---------------------------------------------------------------------------

_EVALUATORS = {
    WhichLaw.OVERSHOOT: overshoot_cdf,
    WhichLaw.UNDERSHOOT: undershoot_cdf,
    WhichLaw.MAX_UNDERSHOOT: max_undershoot_cdf,
}


def tabulate(m: LadderModel, which: WhichLaw, grid: Sequence[float],
             method: str = "auto", spec: QuadratureSpec = DEFAULT_QUADRATURE) -> CdfCurve:
    """Evaluate one law on an ascending nonnegative grid."""
    g = np.asarray(list(grid), dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise DomainError("grid must be a nonempty 1-d sequence")
    if np.any(np.diff(g) < 0) or g[0] < 0:
        raise DomainError("grid must be ascending and nonnegative")
    fn = _EVALUATORS[which]
    values = np.array([fn(m, float(x), method=method, spec=spec) for x in g])
    improper = (m.regime is Regime.CONVOLUTION_EQUIVALENT
                and which in (WhichLaw.UNDERSHOOT, WhichLaw.MAX_UNDERSHOOT))
    return CdfCurve(
        grid=g,
        values=values,
        mass_at_infinity=m.beta2 if improper else 0.0,
        atom_at_zero=m.creep,
    )
