"""The five-parameter claim-surplus model and its tail-regime classification.

The claim surplus process X is spectrally positive, drifts to -infinity with
E[X_1] = -q, and its ascending ladder height process is a killed tempered
stable subordinator with drift d_H, jump density c y^{-rho-1} e^{-alpha y}
and killing rate q.  Everything the limit laws and the simulator need --
Laplace exponents, Levy tails, the Cramer exponent nu_0, the discriminant
separating the light-tailed (Cramer) regime from the exponentially tempered
heavy-tailed (convolution equivalent) regime -- lives here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError, RegimeError
from .special import gamma, upper_incomplete_gamma

__all__ = [
    "Regime",
    "GtscParams",
    "RegimeReport",
    "psi_x",
    "psi_h",
    "pi_x_density",
    "pi_x_tail",
    "pi_h_tail",
    "discriminant_f",
    "discriminant_root",
    "classify",
    "cramer_root",
    "beta_constants",
    "m_star",
    "DEFAULT_BOUNDARY_TOL",
]

DEFAULT_BOUNDARY_TOL = 1e-10


class Regime(enum.Enum):
    CRAMER = "Cramer"
    CONVOLUTION_EQUIVALENT = "ConvolutionEquivalent"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class GtscParams:
    """Model parameters (q, d_H, c, alpha, rho).

    q > 0 is the premium rate (killing rate of the ladder process; also
    -E[X_1]); d_H >= 0 the ladder drift, equivalently a Gaussian component
    of variance 2*d_H; c > 0 the jump intensity scale; alpha > 0 the
    exponential tempering rate of the claim tail; rho in (-1, 1) the
    stability-type index of the ladder subordinator.
    """

    q: float
    d_h: float
    c: float
    alpha: float
    rho: float

    def __post_init__(self):
        if not self.q > 0:
            raise DomainError(f"q must be > 0, got {self.q!r}")
        if not self.d_h >= 0:
            raise DomainError(f"d_H must be >= 0, got {self.d_h!r}")
        if not self.c > 0:
            raise DomainError(f"c must be > 0, got {self.c!r}")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be > 0, got {self.alpha!r}")
        if not -1.0 < self.rho < 1.0:
            raise DomainError(f"rho must lie in (-1, 1), got {self.rho!r}")

    @property
    def sigma(self) -> float:
        """Volatility of the Gaussian component, sigma = sqrt(2 d_H)."""
        return math.sqrt(2.0 * self.d_h)


@dataclass(frozen=True)
class RegimeReport:
    """Classification outcome with the constants the regime supports.

    nu0 and m_star are present exactly in the Cramer regime, beta1/beta2
    exactly in the convolution equivalent regime, and none of them on the
    boundary.
    """

    regime: Regime
    f_alpha: float
    nu0: Optional[float] = None
    beta1: Optional[float] = None
    beta2: Optional[float] = None
    m_star: Optional[float] = None

    @property
    def exponent(self) -> float:
        """Decay exponent of the regime's limit laws: nu0 or alpha-as-given.

        Only meaningful off the boundary; callers pass alpha for the
        convolution equivalent case via :func:`exponent_for`.
        """
        if self.regime is Regime.CRAMER:
            return float(self.nu0)
        raise RegimeError("exponent stored only for the Cramer regime; "
                          "use the model alpha in the convolution equivalent case")


def _tempered_bracket(p: GtscParams, theta: float) -> float:
    """The common factor (alpha^rho - (alpha-theta)^rho) / log form."""
    if p.rho != 0.0:
        return p.alpha**p.rho - (p.alpha - theta) ** p.rho
    raise AssertionError("rho == 0 handled by callers")


def psi_x(p: GtscParams, theta: float) -> float:
    """Laplace exponent of X: log E exp(theta X_1), defined for theta < alpha.

    psi_X(theta) = -q theta + d_H theta^2 - c theta Gamma(-rho)
    (alpha^rho - (alpha-theta)^rho), with the exact logarithmic form
    -q theta + d_H theta^2 + c theta log(alpha/(alpha-theta)) at rho = 0.
    """
    theta = float(theta)
    if theta >= p.alpha:
        raise DomainError(f"psi_x requires theta < alpha, got theta = {theta:g}")
    if p.rho == 0.0:
        jump = p.c * theta * math.log(p.alpha / (p.alpha - theta))
    else:
        jump = -p.c * theta * gamma(-p.rho) * _tempered_bracket(p, theta)
    return -p.q * theta + p.d_h * theta * theta + jump


def psi_h(p: GtscParams, theta: float) -> float:
    """Laplace exponent of the (killed) ladder height process H.

    Satisfies theta * psi_H(theta) = psi_X(theta).  theta = alpha is admitted
    as the left limit when rho > 0, where the value is finite.
    """
    theta = float(theta)
    if theta > p.alpha or (theta == p.alpha and p.rho <= 0.0):
        raise DomainError(f"psi_h requires theta < alpha (or = alpha for rho > 0), "
                          f"got theta = {theta:g}")
    if p.rho == 0.0:
        jump = p.c * math.log(p.alpha / (p.alpha - theta))
    else:
        jump = -p.c * gamma(-p.rho) * _tempered_bracket(p, theta)
    return -p.q + p.d_h * theta + jump


def pi_x_density(p: GtscParams, y: float) -> float:
    """Levy density of X: c (alpha y^{-rho-1} + (rho+1) y^{-rho-2}) e^{-alpha y}."""
    if y <= 0.0:
        raise DomainError("the Levy measure of X lives on y > 0")
    return p.c * (p.alpha / y ** (p.rho + 1.0)
                  + (p.rho + 1.0) / y ** (p.rho + 2.0)) * math.exp(-p.alpha * y)


def pi_x_tail(p: GtscParams, x: float) -> float:
    """Upper tail of the Levy measure of X at x > 0.

    The density above integrates in closed form to c x^{-rho-1} e^{-alpha x};
    the identity holds on the whole rho range (-1, 1) and is cross-checked
    against quadrature of the density in the test suite.
    """
    x = float(x)
    if x <= 0.0:
        raise DomainError(f"pi_x_tail requires x > 0, got {x:g}")
    return p.c * x ** (-p.rho - 1.0) * math.exp(-p.alpha * x)


def pi_h_tail(p: GtscParams, x: float) -> float:
    """Upper tail of the ladder-height Levy measure: c alpha^rho Gamma(-rho, alpha x)."""
    x = float(x)
    if x <= 0.0:
        raise DomainError(f"pi_h_tail requires x > 0, got {x:g}")
    return p.c * p.alpha**p.rho * upper_incomplete_gamma(-p.rho, p.alpha * x)


def discriminant_f(p: GtscParams) -> float:
    """Regime discriminant f(alpha) = d_H alpha - q - c alpha^rho Gamma(-rho).

    Only meaningful for rho in (0, 1); for rho <= 0 the model is
    unconditionally in the Cramer regime and the discriminant plays no role.
    """
    if not 0.0 < p.rho < 1.0:
        raise DomainError("the discriminant is defined for rho in (0, 1) only")
    return p.d_h * p.alpha - p.q - p.c * p.alpha**p.rho * gamma(-p.rho)


def discriminant_root(q: float, d_h: float, c: float, rho: float,
                      lo: float = 1e-8, hi: float = 1e3) -> float:
    """The tempering rate alpha_0 at which f(alpha) = 0, by bracketed bisection.

    f is strictly increasing in alpha (f' = d_H - c rho alpha^{rho-1}
    Gamma(-rho) > 0 since Gamma(-rho) < 0 for rho in (0,1)), so the root is
    unique once bracketed.
    """
    if not 0.0 < rho < 1.0:
        raise DomainError("the discriminant root is defined for rho in (0, 1) only")
    g = gamma(-rho)

    def f(a: float) -> float:
        return d_h * a - q - c * a**rho * g

    flo, fhi = f(lo), f(hi)
    if flo > 0.0 or fhi < 0.0:
        raise DomainError("no sign change for f(alpha) in the given bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-16 * max(1.0, hi):
            break
    root = 0.5 * (lo + hi)
    # one Newton polish
    fp = d_h - c * rho * root ** (rho - 1.0) * g
    if fp > 0.0:
        root -= f(root) / fp
    return root


def _phi(p: GtscParams, theta: float) -> float:
    """psi_X(theta)/theta, the divided form whose unique zero is nu_0."""
    if p.rho == 0.0:
        jump = p.c * math.log(p.alpha / (p.alpha - theta))
    else:
        jump = -p.c * gamma(-p.rho) * _tempered_bracket(p, theta)
    return p.d_h * theta - p.q + jump


def _phi_prime(p: GtscParams, theta: float) -> float:
    if p.rho == 0.0:
        return p.d_h + p.c / (p.alpha - theta)
    return p.d_h - p.c * gamma(-p.rho) * p.rho * (p.alpha - theta) ** (p.rho - 1.0)


def _solve_cramer_root(p: GtscParams) -> float:
    """Bisection on psi_X/theta over (0, alpha), then one Newton polish.

    The divided form is strictly increasing with a guaranteed sign change
    whenever the Cramer condition holds, so bisection cannot fail; the
    polish restores full floating-point accuracy at the root.
    """
    lo = 0.0
    hi = p.alpha
    if 0.0 < p.rho < 1.0:
        # phi(alpha-) = f(alpha) > 0 is finite: bisect on the closed bracket
        pass
    else:
        # phi diverges to +inf at alpha-: walk hi down until finite positive
        hi = p.alpha * (1.0 - 1e-12)
        while _phi(p, hi) <= 0.0:
            hi = p.alpha - 0.5 * (p.alpha - hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _phi(p, mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-14 * p.alpha:
            break
    root = 0.5 * (lo + hi)
    for _ in range(2):
        step = _phi(p, root) / _phi_prime(p, root)
        cand = root - step
        if lo < cand < hi:
            root = cand
    return root


def classify(p: GtscParams, boundary_tol: float = DEFAULT_BOUNDARY_TOL) -> RegimeReport:
    """Tail-regime trichotomy.

    rho <= 0 is always the Cramer case.  For rho in (0, 1) the sign of the
    discriminant decides: f(alpha) > 0 means the Laplace exponent reaches 0
    before alpha (Cramer, with exponent nu_0 and mean constant m*);
    f(alpha) < 0 means E exp(alpha X_1) < 1 with a convolution equivalent
    claim tail (constants beta1, beta2); |f(alpha)| <= boundary_tol is
    reported as the boundary, where neither theory applies.
    """
    if boundary_tol <= 0.0:
        raise DomainError("boundary_tol must be positive")
    if p.rho <= 0.0:
        nu0 = _solve_cramer_root(p)
        return RegimeReport(regime=Regime.CRAMER, f_alpha=math.nan, nu0=nu0,
                            m_star=_m_star_value(p, nu0))
    f = discriminant_f(p)
    if f > boundary_tol:
        nu0 = _solve_cramer_root(p)
        return RegimeReport(regime=Regime.CRAMER, f_alpha=f, nu0=nu0,
                            m_star=_m_star_value(p, nu0))
    if f < -boundary_tol:
        return RegimeReport(regime=Regime.CONVOLUTION_EQUIVALENT, f_alpha=f,
                            beta1=-p.alpha * f, beta2=-f / p.q)
    return RegimeReport(regime=Regime.BOUNDARY, f_alpha=f)


def cramer_root(p: GtscParams, boundary_tol: float = DEFAULT_BOUNDARY_TOL) -> float:
    """The Cramer exponent nu_0 in (0, alpha) with E exp(nu_0 X_1) = 1."""
    report = classify(p, boundary_tol)
    if report.regime is not Regime.CRAMER:
        raise RegimeError(f"cramer_root undefined in regime {report.regime.value}")
    return float(report.nu0)


def beta_constants(p: GtscParams, boundary_tol: float = DEFAULT_BOUNDARY_TOL):
    """(beta1, beta2) = (-log E exp(alpha X_1), -psi_H(alpha)/q).

    beta1 = -alpha f(alpha) and beta2 = -f(alpha)/q; both positive exactly in
    the convolution equivalent regime, with beta2 in (0, 1).
    """
    report = classify(p, boundary_tol)
    if report.regime is not Regime.CONVOLUTION_EQUIVALENT:
        raise RegimeError(f"beta constants undefined in regime {report.regime.value}")
    return float(report.beta1), float(report.beta2)


def _m_star_value(p: GtscParams, nu0: float) -> float:
    # d_H + int_0^inf y e^{nu0 y} Pi_H(dy) = d_H + c Gamma(1-rho) (alpha-nu0)^{rho-1};
    # the closed form holds for every rho < 1 and is checked against
    # quadrature in the tests
    gap = p.alpha - nu0
    if gap <= 0.0:
        return math.inf
    return p.d_h + p.c * gamma(1.0 - p.rho) * gap ** (p.rho - 1.0)


def m_star(p: GtscParams, boundary_tol: float = DEFAULT_BOUNDARY_TOL) -> float:
    """The tilted ladder mean m* = d_H + int y e^{nu0 y} Pi_H(dy), Cramer only."""
    report = classify(p, boundary_tol)
    if report.regime is not Regime.CRAMER:
        raise RegimeError(f"m_star undefined in regime {report.regime.value}")
    return float(report.m_star)
