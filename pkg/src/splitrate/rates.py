"""Contraction-rate formulas, feasible relaxation intervals, optimal
parameters, dual constants, and the classifier for the parameter regions
where the bound is attained exactly."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "psi",
    "theoretical_rate",
    "alpha_upper_bound",
    "optimal_params",
    "RateConstants",
    "dual_rate_constants",
    "TightnessCase",
    "TIGHT_CASES",
    "classify_tightness",
]


def psi(x: float) -> float:
    """(1 - x) / (1 + x); strictly decreasing on x > -1, with
    psi(x) <= -psi(y) exactly when x * y >= 1 (for x > 0)."""
    if not x > -1.0:
        raise ValueError(f"psi requires x > -1, got {x!r}")
    return (1.0 - x) / (1.0 + x)


def _check_positive(**values: float) -> None:
    for name, v in values.items():
        if not (v > 0.0 and math.isfinite(v)):
            raise ValueError(f"{name} must be positive and finite, got {v!r}")


def _check_spectrum(sigma: float, beta: float) -> None:
    _check_positive(sigma=sigma)
    if not (sigma <= beta and math.isfinite(beta)):
        raise ValueError(f"need 0 < sigma <= beta, got sigma={sigma!r}, beta={beta!r}")


def _max_term(gamma: float, sigma: float, beta: float) -> float:
    """max((1 - g*sigma)/(1 + g*sigma), (g*beta - 1)/(g*beta + 1)); in [0, 1)."""
    return max(psi(gamma * sigma), -psi(gamma * beta))


def theoretical_rate(alpha: float, gamma: float, sigma: float, beta: float) -> float:
    """Per-step contraction bound
    ``|1 - alpha| + alpha * max((1 - g*s)/(1 + g*s), (g*b - 1)/(g*b + 1))``.

    Below 1 exactly when alpha lies inside the feasible interval
    ``(0, alpha_upper_bound(gamma, sigma, beta))``.
    """
    _check_positive(alpha=alpha, gamma=gamma)
    _check_spectrum(sigma, beta)
    return abs(1.0 - alpha) + alpha * _max_term(gamma, sigma, beta)


def alpha_upper_bound(gamma: float, sigma: float, beta: float) -> float:
    """Supremum of relaxations with contraction bound below 1; always in (1, 2]."""
    _check_positive(gamma=gamma)
    _check_spectrum(sigma, beta)
    return 2.0 / (1.0 + _max_term(gamma, sigma, beta))


def optimal_params(sigma: float, beta: float) -> tuple[float, float, float]:
    """Bound-minimizing (alpha, gamma, rate):
    alpha = 1, gamma = 1/sqrt(sigma*beta), rate = (sqrt(beta/sigma) - 1)/(sqrt(beta/sigma) + 1)."""
    _check_spectrum(sigma, beta)
    ratio = math.sqrt(beta / sigma)
    return 1.0, 1.0 / math.sqrt(beta * sigma), (ratio - 1.0) / (ratio + 1.0)


@dataclass(frozen=True)
class RateConstants:
    """Primal constants plus the induced dual envelope constants.

    The dual objective is ``theta**2 / beta`` strongly convex and
    ``zeta**2 / sigma`` smooth; ``kappa`` is their ratio.
    """

    sigma: float
    beta: float
    theta: float
    zeta: float

    def __post_init__(self) -> None:
        _check_spectrum(self.sigma, self.beta)
        if not (0.0 < self.theta <= self.zeta) or not math.isfinite(self.zeta):
            raise ValueError(f"need 0 < theta <= zeta, got theta={self.theta!r}, zeta={self.zeta!r}")

    @property
    def sigma_hat(self) -> float:
        return self.theta**2 / self.beta

    @property
    def beta_hat(self) -> float:
        return self.zeta**2 / self.sigma

    @property
    def kappa(self) -> float:
        return self.beta_hat / self.sigma_hat

    def optimal_dual_params(self) -> tuple[float, float, float]:
        """(alpha, gamma, rate) minimizing the dual contraction bound; the
        rate is (sqrt(kappa) - 1)/(sqrt(kappa) + 1)."""
        return optimal_params(self.sigma_hat, self.beta_hat)


def dual_rate_constants(sigma: float, beta: float, theta: float, zeta: float) -> RateConstants:
    """Bundle the primal and coupling constants and derive the dual pair."""
    return RateConstants(float(sigma), float(beta), float(theta), float(zeta))


class TightnessCase(enum.Enum):
    """Label for a parameter point: one of the four regions where the bound is
    attained exactly, the feasible remainder, or infeasible.

    The fourth region (gamma = 1/sqrt(sigma*beta), any feasible alpha) is
    contained in the union of the first three, so first-match ordering never
    actually emits it; the member exists so reports can name the region.
    """

    CASE_I = "CaseI"
    CASE_II = "CaseII"
    CASE_III = "CaseIII"
    CASE_IV = "CaseIV"
    FEASIBLE_NOT_CLASSIFIED = "FeasibleNotClassified"
    INFEASIBLE = "Infeasible"


TIGHT_CASES = frozenset(
    {TightnessCase.CASE_I, TightnessCase.CASE_II, TightnessCase.CASE_III, TightnessCase.CASE_IV}
)


def classify_tightness(alpha: float, gamma: float, sigma: float, beta: float) -> TightnessCase:
    """First matching region, checked in order:

    I.   alpha = 1, any gamma > 0
    II.  alpha in (0, 1], gamma in (0, 1/sqrt(sigma*beta)]
    III. alpha in [1, alpha_upper_bound), gamma in [1/sqrt(sigma*beta), inf)
    IV.  gamma = 1/sqrt(sigma*beta), alpha in (0, alpha_upper_bound)

    Boundary equalities are matched to 1e-12 relative tolerance.
    """
    _check_positive(alpha=alpha, gamma=gamma)
    _check_spectrum(sigma, beta)
    gamma_star = 1.0 / math.sqrt(sigma * beta)
    upper = alpha_upper_bound(gamma, sigma, beta)
    at_one = math.isclose(alpha, 1.0, rel_tol=1e-12)
    at_star = math.isclose(gamma, gamma_star, rel_tol=1e-12)
    if at_one:
        return TightnessCase.CASE_I
    if alpha < 1.0 and (gamma <= gamma_star or at_star):
        return TightnessCase.CASE_II
    if 1.0 < alpha < upper and (gamma >= gamma_star or at_star):
        return TightnessCase.CASE_III
    if at_star and alpha < upper:
        return TightnessCase.CASE_IV
    if alpha < upper:
        return TightnessCase.FEASIBLE_NOT_CLASSIFIED
    return TightnessCase.INFEASIBLE
