"""Relaxed Douglas-Rachford iteration, its dual-problem form, an ADMM engine
matched to it, and contraction-trace capture."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .functions import CompositeProblem, GFunction, dual_function
from .hilbert import Vec, norm, zeros
from .prox import refl_prox_diag, refl_prox_g

__all__ = [
    "SplitParams",
    "IterateTrace",
    "DivergenceError",
    "dr_step",
    "run_dr",
    "run_dual_dr",
    "run_admm",
    "fit_rate",
    "RATIO_FLOOR",
]

#: distances below this count as "at the fixed point"; contraction ratios past
#: that point are recorded as NaN
RATIO_FLOOR = 1e-14

#: a run is declared divergent once its distance to the fixed point exceeds
#: this multiple of the starting distance
DIVERGENCE_FACTOR = 10.0


class DivergenceError(RuntimeError):
    """Iterates moved away from the fixed point instead of contracting.

    Carries the partial trace gathered before the guard tripped.
    """

    def __init__(self, message: str, trace: "IterateTrace | None" = None):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class SplitParams:
    """Relaxation ``alpha`` and proximal step size ``gamma``.

    Relaxations above 1 are accepted (they stay contractive up to an
    instance-dependent limit, see :func:`splitrate.rates.alpha_upper_bound`)
    but get a warning since that limit cannot be checked here.
    """

    alpha: float
    gamma: float

    def __post_init__(self) -> None:
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive and finite, got {self.gamma!r}")
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha!r}")
        if self.alpha > 1.0:
            warnings.warn(
                f"alpha = {self.alpha} is above 1; whether the iteration still contracts "
                "depends on the instance (see rates.alpha_upper_bound)",
                stacklevel=2,
            )


@dataclass
class IterateTrace:
    """Iterate history with distances to the fixed point and per-step ratios.

    ``step_ratios[k]`` is ``distances[k+1] / distances[k]``, or NaN once
    ``distances[k]`` drops below :data:`RATIO_FLOOR`. For the ADMM engine the
    iterates are the scaled dual sequence and ``final_x`` holds the last
    primal iterate; it is None for the other engines.
    """

    iterates: list[Vec]
    fixed_point: Vec
    distances: np.ndarray
    step_ratios: np.ndarray
    converged: bool
    final_x: Vec | None = None

    @property
    def n_steps(self) -> int:
        return len(self.iterates) - 1


def _build_trace(iterates, fixed_point, converged, final_x=None) -> IterateTrace:
    dists = np.array([norm(z - fixed_point) for z in iterates])
    ratios = np.full(max(len(iterates) - 1, 0), np.nan)
    for k in range(ratios.size):
        if dists[k] >= RATIO_FLOOR:
            ratios[k] = dists[k + 1] / dists[k]
    return IterateTrace(list(iterates), fixed_point, dists, ratios, converged, final_x)


def dr_step(problem: CompositeProblem, params: SplitParams, z: Vec, g_first: bool = False) -> Vec:
    """One relaxed splitting step ``(1 - alpha) z + alpha R_g(R_f(z))``.

    Requires the identity coupling (``problem.a is None``); problems with an
    explicit coupling are handled on the dual side by :func:`run_dual_dr`.
    ``g_first=True`` swaps the composition to ``R_f(R_g(z))``; on this problem
    class both orders contract at the same rate.
    """
    if problem.a is not None:
        raise ValueError("dr_step requires the identity coupling (problem.a must be None)")
    alpha, gamma = params.alpha, params.gamma
    if g_first:
        reflected = refl_prox_diag(problem.f, gamma, refl_prox_g(problem.g, gamma, z))
    else:
        reflected = refl_prox_g(problem.g, gamma, refl_prox_diag(problem.f, gamma, z))
    return (1.0 - alpha) * z + alpha * reflected


def run_dr(
    problem: CompositeProblem,
    params: SplitParams,
    z0: Vec,
    max_iter: int = 200,
    tol: float = 1e-13,
    fixed_point: Vec | None = None,
    g_first: bool = False,
) -> IterateTrace:
    """Iterate :func:`dr_step` from ``z0`` and record the contraction trace.

    Stops when the step norm ``|z_{k+1} - z_k|`` drops to ``tol`` or after
    ``max_iter`` steps. If the very first step leaves ``z0`` exactly
    unchanged the trace has length 1 (already at a fixed point).

    ``fixed_point`` defaults to the origin, which is exact for every problem
    this package can represent: the smooth part is minimized at 0 and both
    supported nonsmooth terms vanish there. Pass the converged iterate of an
    earlier run to measure against something else.

    Raises
    ------
    DivergenceError
        When the distance to the fixed point exceeds 10x its starting value,
        which is how an infeasible relaxation fails.
    """
    if max_iter < 0:
        raise ValueError("max_iter must be non-negative")
    zbar = zeros(z0.dim) if fixed_point is None else fixed_point
    if zbar.dim != z0.dim:
        raise ValueError(f"dimension mismatch: {zbar.dim} vs {z0.dim}")
    base = norm(z0 - zbar)
    iterates = [z0]
    z = z0
    converged = False
    for k in range(max_iter):
        z_next = dr_step(problem, params, z, g_first=g_first)
        if k == 0 and np.array_equal(z_next.coeffs, z.coeffs):
            return _build_trace(iterates, zbar, converged=True)
        iterates.append(z_next)
        if base > 0.0 and norm(z_next - zbar) > DIVERGENCE_FACTOR * base:
            trace = _build_trace(iterates, zbar, converged=False)
            raise DivergenceError(
                f"diverged after {k + 1} steps: distance grew past {DIVERGENCE_FACTOR:g}x "
                f"its starting value (alpha={params.alpha:g}, gamma={params.gamma:g})",
                trace,
            )
        step = norm(z_next - z)
        z = z_next
        if step <= tol:
            converged = True
            break
    return _build_trace(iterates, zbar, converged=converged)


def run_dual_dr(
    problem: CompositeProblem,
    params: SplitParams,
    mu0: Vec,
    max_iter: int = 200,
    tol: float = 1e-13,
    g_first: bool = False,
) -> IterateTrace:
    """Run the splitting iteration on the dual of ``min f(x) + g(A x)``.

    Needs ``g`` equal to the indicator of the origin and an explicit diagonal
    coupling. The dual objective is the separable quadratic from
    :func:`splitrate.functions.dual_function` and the conjugate of the
    indicator vanishes, so the dual problem is again in the identity-coupling
    form handled by :func:`run_dr`.
    """
    if problem.g is not GFunction.ZERO_INDICATOR or problem.a is None:
        raise ValueError(
            "dual iteration needs g = indicator of the origin and an explicit diagonal coupling"
        )
    dual_problem = CompositeProblem(f=dual_function(problem), g=GFunction.ZERO, a=None)
    return run_dr(dual_problem, params, mu0, max_iter=max_iter, tol=tol, g_first=g_first)


def run_admm(
    problem: CompositeProblem,
    rho: float,
    alpha: float,
    x0: Vec | None = None,
    z0: Vec | None = None,
    u0: Vec | None = None,
    max_iter: int = 200,
    tol: float = 1e-13,
) -> IterateTrace:
    """Scaled-form alternating updates for ``min f(x) + g(w)  s.t.  A x = w``.

    Per iteration, with penalty ``rho`` and over-relaxation ``2 * alpha``::

        x  <- argmin_x f(x) + rho/2 |A x - w + u|^2        (closed form,
                                                            coordinate-wise)
        v  <- 2*alpha * A x + (1 - 2*alpha) * w
        w  <- prox of g at (v + u), i.e. 0 for the origin indicator
        u  <- u + v - w

    ``alpha`` means the same relaxation as in :func:`run_dual_dr`: with the
    updates over-relaxed by ``2 * alpha`` the scaled dual sequence
    ``mu_k = rho * u_k`` contracts with exactly the factor of the dual
    splitting iterate run at step size ``gamma = rho`` and the same alpha
    (``alpha = 1/2`` recovers the classic unrelaxed method). The trace records
    ``mu_k``; the final primal iterate is kept on ``final_x``.

    ``z0`` is the starting value of the second block variable ``w``. ``x0``
    only seeds the recorded primal state; the first x-update overwrites it.
    """
    if problem.g is not GFunction.ZERO_INDICATOR or problem.a is None:
        raise ValueError(
            "run_admm needs g = indicator of the origin and an explicit diagonal coupling"
        )
    if not (rho > 0.0 and math.isfinite(rho)):
        raise ValueError(f"rho must be positive and finite, got {rho!r}")
    if not (alpha > 0.0 and math.isfinite(alpha)):
        raise ValueError(f"alpha must be positive and finite, got {alpha!r}")
    if max_iter < 0:
        raise ValueError("max_iter must be non-negative")
    dim = problem.dim
    for name, v in (("x0", x0), ("z0", z0), ("u0", u0)):
        if v is not None and v.dim != dim:
            raise ValueError(f"{name} dimension {v.dim} != problem dimension {dim}")
    lam = problem.f.weights
    nu = problem.a.weights
    denom = lam + rho * nu**2
    relax = 2.0 * alpha

    x = np.zeros(dim) if x0 is None else x0.coeffs
    w = np.zeros(dim) if z0 is None else z0.coeffs
    u = np.zeros(dim) if u0 is None else u0.coeffs

    mubar = zeros(dim)
    mu_list = [Vec(rho * u)]
    base = norm(mu_list[0])
    converged = False
    final_x = Vec(x)
    for k in range(max_iter):
        x_new = rho * nu * (w - u) / denom
        v = relax * (nu * x_new) + (1.0 - relax) * w
        w_new = np.zeros(dim)  # prox of the origin indicator
        u_new = u + v - w_new
        final_x = Vec(x_new)
        if (
            k == 0
            and np.array_equal(x_new, x)
            and np.array_equal(w_new, w)
            and np.array_equal(u_new, u)
        ):
            return _build_trace(mu_list, mubar, converged=True, final_x=final_x)
        mu_list.append(Vec(rho * u_new))
        if base > 0.0 and norm(mu_list[-1]) > DIVERGENCE_FACTOR * base:
            trace = _build_trace(mu_list, mubar, converged=False, final_x=final_x)
            raise DivergenceError(
                f"diverged after {k + 1} steps: dual distance grew past "
                f"{DIVERGENCE_FACTOR:g}x its starting value (alpha={alpha:g}, rho={rho:g})",
                trace,
            )
        step = rho * float(np.linalg.norm(u_new - u))
        x, w, u = x_new, w_new, u_new
        if step <= tol:
            converged = True
            break
    return _build_trace(mu_list, mubar, converged=converged, final_x=final_x)


def fit_rate(trace: IterateTrace) -> float:
    """Asymptotic contraction factor: geometric mean of the last
    ``ceil(n/2)`` valid step ratios. Needs at least 5 valid ratios."""
    valid = trace.step_ratios[np.isfinite(trace.step_ratios)]
    if valid.size < 5:
        raise ValueError(f"trace too short: {valid.size} valid step ratios, need at least 5")
    tail = valid[-math.ceil(valid.size / 2) :]
    if np.any(tail == 0.0):
        return 0.0
    return float(np.exp(np.mean(np.log(tail))))
