"""Closed-form proximal maps for the supported function classes, plus a
search-based per-coordinate oracle used to cross-check them."""

from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np

from .functions import DiagQuadratic, GFunction
from .hilbert import Vec, zeros

__all__ = ["prox_diag", "refl_prox_diag", "prox_g", "refl_prox_g", "prox_oracle"]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _check_gamma(gamma: float) -> float:
    g = float(gamma)
    if not (g > 0.0 and math.isfinite(g)):
        raise ValueError(f"gamma must be positive and finite, got {gamma!r}")
    return g


def prox_diag(f: DiagQuadratic, gamma: float, y: Vec) -> Vec:
    """Proximal map of a separable quadratic: coordinate i shrinks by
    1 / (1 + gamma * w_i). Minimizes ``f(x) + |x - y|^2 / (2 gamma)``."""
    gamma = _check_gamma(gamma)
    if f.dim != y.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {y.dim}")
    return Vec(y.coeffs / (1.0 + gamma * f.weights))


def refl_prox_diag(f: DiagQuadratic, gamma: float, y: Vec) -> Vec:
    """Reflected proximal map ``2 prox - id``: coordinate i scales by
    (1 - gamma * w_i) / (1 + gamma * w_i)."""
    gamma = _check_gamma(gamma)
    if f.dim != y.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {y.dim}")
    gw = gamma * f.weights
    return Vec((1.0 - gw) / (1.0 + gw) * y.coeffs)


def prox_g(g: GFunction, gamma: float, y: Vec) -> Vec:
    """Proximal map of the nonsmooth term: identity for the zero function,
    the constant-zero map for the indicator of the origin."""
    _check_gamma(gamma)
    if g is GFunction.ZERO:
        return y
    if g is GFunction.ZERO_INDICATOR:
        return zeros(y.dim)
    raise ValueError(f"unsupported nonsmooth term: {g!r}")


def refl_prox_g(g: GFunction, gamma: float, y: Vec) -> Vec:
    """Reflected proximal map of the nonsmooth term: identity for the zero
    function, negation for the indicator of the origin."""
    _check_gamma(gamma)
    if g is GFunction.ZERO:
        return y
    if g is GFunction.ZERO_INDICATOR:
        return -y
    raise ValueError(f"unsupported nonsmooth term: {g!r}")


def prox_oracle(
    coord_objective: Callable[[int, float], float],
    gamma: float,
    y: Vec,
    halfwidth: float = 10.0,
    tol: float = 1e-12,
) -> Vec:
    """Proximal map computed by per-coordinate scalar search.

    ``coord_objective(i, t)`` is coordinate i's share of the function; the
    oracle minimizes ``coord_objective(i, t) + (t - y_i)^2 / (2 gamma)`` over
    ``[y_i - halfwidth, y_i + halfwidth]`` by golden-section search, then
    sharpens the bracket to ``tol`` by bisecting the sign of a
    central-difference slope (plain golden section stalls on the float
    plateau around the minimum once the objective's constant part dominates).
    The search never sees the closed-form shrinkage factors, so it is an
    independent cross-check for :func:`prox_diag`.

    Raises ValueError if the objective is not finite at the bracket ends.
    """
    gamma = _check_gamma(gamma)
    out = np.empty(y.dim)
    for i, b in enumerate(y.coeffs):

        def h(t: float, _i: int = i, _b: float = b) -> float:
            return coord_objective(_i, t) + (t - _b) ** 2 / (2.0 * gamma)

        lo, hi = b - halfwidth, b + halfwidth
        if not (math.isfinite(h(lo)) and math.isfinite(h(hi))):
            raise ValueError(f"objective not finite on the search bracket for coordinate {i}")
        lo, hi = _golden_shrink(h, lo, hi, width=1e-4)
        out[i] = _slope_bisect(h, lo - 1e-3, hi + 1e-3, tol=tol)
    return Vec(out)


def _golden_shrink(h, lo: float, hi: float, width: float) -> tuple[float, float]:
    """Golden-section interval reduction for a unimodal scalar function."""
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    h1, h2 = h(x1), h(x2)
    while hi - lo > width:
        if h1 <= h2:
            hi, x2, h2 = x2, x1, h1
            x1 = hi - _GOLDEN * (hi - lo)
            h1 = h(x1)
        else:
            lo, x1, h1 = x1, x2, h2
            x2 = lo + _GOLDEN * (hi - lo)
            h2 = h(x2)
    return lo, hi


def _slope_bisect(h, lo: float, hi: float, tol: float, dt: float = 1e-4) -> float:
    """Bisect on the sign of a central-difference slope of a convex function.

    The offset ``dt`` is kept fairly wide: the slope noise floor is
    eps*|h|/dt, and a narrow offset lets it swamp the slope signal near the
    minimum when the objective's constant part is large. Central differences
    are exact for quadratics, so widening costs nothing on this package's
    function classes.
    """

    def slope(t: float) -> float:
        return (h(t + dt) - h(t - dt)) / (2.0 * dt)

    s_lo, s_hi = slope(lo), slope(hi)
    if s_lo > 0.0 or s_hi < 0.0:
        # slope does not straddle zero: the minimum sits at (or within slope
        # noise of) a bracket end
        return lo if s_lo > 0.0 else hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if slope(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
