"""Generators for the instances whose contraction exactly attains the rate
bound, and the closed-form iterate predictor used as the exactness oracle."""

from __future__ import annotations

import math

import numpy as np

from .functions import CompositeProblem, DiagOperator, DiagQuadratic, GFunction, SpectrumSpec
from .hilbert import Vec, basis_vector
from .rates import psi

__all__ = [
    "make_primal_instance",
    "make_dual_instance",
    "predict_iterate",
    "step_multiplier",
    "worst_direction",
    "worst_start_vector",
    "default_primal_instance",
    "default_dual_instance",
    "PAIRINGS",
    "DEFAULT_DIM",
    "DEFAULT_IDX_SIGMA",
    "DEFAULT_SIGMA",
    "DEFAULT_BETA",
    "DEFAULT_THETA",
    "DEFAULT_ZETA",
]

# default instance: small, well conditioned, both curvature bands populated
DEFAULT_DIM = 8
DEFAULT_IDX_SIGMA = frozenset(range(4))
DEFAULT_SIGMA = 1.0
DEFAULT_BETA = 10.0
DEFAULT_THETA = 1.0
DEFAULT_ZETA = 3.0

PAIRINGS = ("aligned", "crossed")


def make_primal_instance(sigma: float, beta: float, dim: int, idx_sigma) -> CompositeProblem:
    """Two-band quadratic with zero nonsmooth term and identity coupling.

    Both index bands must be non-empty; sigma = beta is allowed (isotropic)
    as long as the partition still has two sides.
    """
    spec = SpectrumSpec(dim=int(dim), sigma=float(sigma), beta=float(beta), idx_sigma=frozenset(idx_sigma))
    return CompositeProblem(f=DiagQuadratic.from_spectrum(spec), g=GFunction.ZERO, a=None)


def make_dual_instance(
    sigma: float,
    beta: float,
    theta: float,
    zeta: float,
    dim: int,
    idx_sigma,
    pairing: str = "aligned",
) -> CompositeProblem:
    """Two-band quadratic with the origin-indicator nonsmooth term and a
    two-level diagonal coupling (theta < zeta strictly).

    ``pairing`` fixes which curvature band carries which coupling gain:

    - "aligned": theta on the sigma band and zeta on the beta band, giving
      dual curvatures theta**2/sigma and zeta**2/beta;
    - "crossed": gains swapped, giving dual curvatures zeta**2/sigma and
      theta**2/beta, which are exactly the extreme dual envelope constants
      beta_hat and sigma_hat.

    Only the crossed pairing makes the dual contraction bound attained; the
    aligned dual curvatures sit strictly inside [sigma_hat, beta_hat]
    whenever sigma < beta and theta < zeta.
    """
    if not float(theta) < float(zeta):
        raise ValueError(f"need theta < zeta strictly, got theta={theta!r}, zeta={zeta!r}")
    if pairing not in PAIRINGS:
        raise ValueError(f"pairing must be one of {PAIRINGS}, got {pairing!r}")
    spec = SpectrumSpec(dim=int(dim), sigma=float(sigma), beta=float(beta), idx_sigma=frozenset(idx_sigma))
    idx_theta = spec.idx_sigma if pairing == "aligned" else spec.idx_beta
    op = DiagOperator.two_level(spec.dim, float(theta), float(zeta), idx_theta)
    return CompositeProblem(f=DiagQuadratic.from_spectrum(spec), g=GFunction.ZERO_INDICATOR, a=op)


def step_multiplier(lambda_i: float, alpha: float, gamma: float) -> float:
    """Per-coordinate factor of one splitting step on the worst-case class:
    ``1 - alpha + alpha * (1 - gamma*lambda) / (1 + gamma*lambda)``."""
    if not (gamma > 0.0 and math.isfinite(gamma)):
        raise ValueError(f"gamma must be positive and finite, got {gamma!r}")
    return 1.0 - alpha + alpha * psi(gamma * lambda_i)


def predict_iterate(lambda_i: float, alpha: float, gamma: float, k: int) -> float:
    """Coefficient of the k-th iterate started from a unit vector on a
    coordinate with curvature ``lambda_i``: the k-th power of
    :func:`step_multiplier`."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return step_multiplier(lambda_i, alpha, gamma) ** k


def worst_direction(alpha: float, gamma: float, sigma: float, beta: float) -> str:
    """Which curvature band contracts slowest from a unit start: "sigma" or
    "beta". Ties (e.g. at gamma = 1/sqrt(sigma*beta), where the two factors
    agree up to rounding) go to "sigma"."""
    if not (alpha > 0.0 and math.isfinite(alpha)):
        raise ValueError(f"alpha must be positive and finite, got {alpha!r}")
    c_sigma = abs(step_multiplier(sigma, alpha, gamma))
    c_beta = abs(step_multiplier(beta, alpha, gamma))
    return "sigma" if c_sigma >= c_beta * (1.0 - 1e-12) else "beta"


def worst_start_vector(quad: DiagQuadratic, alpha: float, gamma: float) -> Vec:
    """Basis vector along the slowest-contracting coordinate of ``quad``."""
    label = worst_direction(alpha, gamma, quad.sigma, quad.beta)
    target = quad.sigma if label == "sigma" else quad.beta
    index = int(np.argmin(np.abs(quad.weights - target)))
    return basis_vector(quad.dim, index)


def default_primal_instance() -> CompositeProblem:
    """The default two-band instance: dim 8, sigma 1 and beta 10 on four
    coordinates each."""
    return make_primal_instance(DEFAULT_SIGMA, DEFAULT_BETA, DEFAULT_DIM, DEFAULT_IDX_SIGMA)


def default_dual_instance(pairing: str = "aligned") -> CompositeProblem:
    """The default coupled instance: the default spectrum with gains theta 1
    and zeta 3."""
    return make_dual_instance(
        DEFAULT_SIGMA, DEFAULT_BETA, DEFAULT_THETA, DEFAULT_ZETA, DEFAULT_DIM, DEFAULT_IDX_SIGMA, pairing
    )
