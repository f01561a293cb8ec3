"""Optimal altitude-to-radius ratio for the aerial base station.

Writing ``alpha = h / R`` (altitude over coverage radius), the squared
maximum radius that still meets the pathloss threshold is a function of
alpha alone. That function has a single interior peak for the built-in
environments; this module evaluates it, differentiates it in closed form,
and locates the peak by bisection on the derivative sign, with an
exhaustive grid search as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import Environment, LinkBudget, los_probability

# Upper end of the search bracket: ratios above tan(89.9 deg) put the user
# essentially underneath the platform and are never useful.
ALPHA_MAX = math.tan(math.radians(89.9))

# Converts the per-degree sigmoid slope into the natural-log scale of the
# dB exponent: (180/pi) * ln(10) / 10.
DERIVATIVE_ANGLE_SCALE = math.degrees(math.log(10.0)) / 10.0

# Treat the derivative as exactly zero below this magnitude; literal
# floating-point equality would be fragile.
_ZERO_DERIVATIVE_TOL = 1e-15


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and budgets shared by the solvers.

    Attributes:
        epsilon: bisection bracket tolerance on alpha.
        max_iterations: bisection iteration cap.
        grid_points: resolution of the grid-search oracle.
        tol_db: slack applied to coverage-threshold comparisons (dB).
    """

    epsilon: float = 1e-5
    max_iterations: int = 100
    grid_points: int = 1_000_000
    tol_db: float = 1e-9

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.grid_points < 1000:
            raise ValueError(f"grid_points must be >= 1000, got {self.grid_points}")


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class DerivativeTerms:
    """Building blocks of the closed-form derivative at one alpha.

    ``delta`` is the sigmoid denominator (>= 1), ``lambda_`` the power-of-ten
    exponent of the leading factor, ``omega`` the squared ``(1 + alpha^2)``
    term, and ``k`` the degree-to-natural-log conversion constant.
    """

    delta: float
    lambda_: float
    omega: float
    k: float


@dataclass(frozen=True)
class AlphaSolution:
    """Result of the ratio optimization.

    ``max_radius`` is the largest usable coverage radius in meters,
    i.e. the square root of ``gamma_at_star``.
    """

    alpha_star: float
    gamma_at_star: float
    max_radius: float
    iterations: int
    converged: bool


def gamma_value(env: Environment, budget: LinkBudget, alpha: float) -> float:
    """Squared maximum coverage radius (m^2) at ratio ``alpha``.

    Raises:
        ValueError: if ``alpha`` is negative.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    theta_deg = math.degrees(math.atan(alpha))
    p = los_probability(env, theta_deg)
    exponent = (budget.gamma_db - budget.a_db * p - budget.b_db) / 10.0
    return 10.0 ** exponent / (1.0 + alpha * alpha)


def gamma_values(env: Environment, budget: LinkBudget, alphas: np.ndarray) -> np.ndarray:
    """Vectorized :func:`gamma_value` over an array of ratios."""
    alphas = np.asarray(alphas, dtype=float)
    theta_deg = np.degrees(np.arctan(alphas))
    p = 1.0 / (1.0 + env.a * np.exp(-env.b * (theta_deg - env.a)))
    exponent = (budget.gamma_db - budget.a_db * p - budget.b_db) / 10.0
    return 10.0**exponent / (1.0 + alphas * alphas)


def gamma_derivatives(env: Environment, budget: LinkBudget, alphas: np.ndarray) -> np.ndarray:
    """Vectorized :func:`gamma_derivative` over an array of ratios."""
    alphas = np.asarray(alphas, dtype=float)
    theta_deg = np.degrees(np.arctan(alphas))
    delta = env.a * np.exp(env.b * (env.a - theta_deg)) + 1.0
    lambda_ = (budget.gamma_db - budget.b_db - budget.a_db / delta) / 10.0
    omega = (alphas * alphas + 1.0) ** 2
    core = (2.0 * alphas * delta * delta
            + budget.a_db * env.b * DERIVATIVE_ANGLE_SCALE * (delta - 1.0))
    return -(10.0**lambda_ / (omega * delta * delta)) * core


def derivative_terms(env: Environment, budget: LinkBudget, alpha: float) -> DerivativeTerms:
    """Evaluate the closed-form derivative's building blocks at ``alpha``."""
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    theta_deg = math.degrees(math.atan(alpha))
    delta = env.a * math.exp(env.b * (env.a - theta_deg)) + 1.0
    lambda_ = (budget.gamma_db - budget.b_db - budget.a_db / delta) / 10.0
    omega = (alpha * alpha + 1.0) ** 2
    return DerivativeTerms(delta=delta, lambda_=lambda_, omega=omega, k=DERIVATIVE_ANGLE_SCALE)


def _sign_core(env: Environment, budget: LinkBudget, alpha: float) -> float:
    """Scale-free quantity with the exact sign of the derivative.

    The derivative factors into a strictly positive term times this core,
    so bisection decisions made on the core cannot be disturbed by
    overflow/underflow of the power-of-ten factor and are identical for
    every threshold and carrier frequency.
    """
    theta_deg = math.degrees(math.atan(alpha))
    delta = env.a * math.exp(env.b * (env.a - theta_deg)) + 1.0
    return -(
        2.0 * alpha * delta * delta
        + budget.a_db * env.b * DERIVATIVE_ANGLE_SCALE * (delta - 1.0)
    )


def gamma_derivative(env: Environment, budget: LinkBudget, alpha: float) -> float:
    """Closed-form derivative of :func:`gamma_value` with respect to alpha."""
    t = derivative_terms(env, budget, alpha)
    core = 2.0 * alpha * t.delta * t.delta + budget.a_db * env.b * t.k * (t.delta - 1.0)
    return -(10.0**t.lambda_ / (t.omega * t.delta * t.delta)) * core


def find_alpha_star(
    env: Environment,
    budget: LinkBudget,
    config: SolverConfig = DEFAULT_CONFIG,
) -> AlphaSolution:
    """Locate the ratio that maximizes the squared coverage radius.

    Bisection on the derivative sign over [0, tan(89.9 deg)]: the bracket
    keeps a nonnegative derivative on its left end and a nonpositive one on
    its right end, and stops once the derivative hits zero, the bracket
    width drops to ``config.epsilon``, or the iteration cap is reached (the
    last case is reported as ``converged=False``).
    """

    lo, hi = 0.0, ALPHA_MAX

    # A derivative still positive at the top of the bracket means the
    # boundary is the maximizer of the feasible ratios.
    if _sign_core(env, budget, hi) > 0:
        g = gamma_value(env, budget, hi)
        return AlphaSolution(alpha_star=hi, gamma_at_star=g, max_radius=math.sqrt(g),
                             iterations=0, converged=True)

    sign_lo = _sign(_sign_core(env, budget, lo))
    iterations = 0
    alpha_star = (lo + hi) / 2.0
    converged = False
    while iterations <= config.max_iterations:
        mid = (lo + hi) / 2.0
        if abs(gamma_derivative(env, budget, mid)) <= _ZERO_DERIVATIVE_TOL or (hi - lo) <= config.epsilon:
            alpha_star = mid
            converged = True
            break
        iterations += 1
        sign_mid = _sign(_sign_core(env, budget, mid))
        if sign_mid == sign_lo:
            lo = mid
        else:
            hi = mid
        alpha_star = (lo + hi) / 2.0

    g = gamma_value(env, budget, alpha_star)
    return AlphaSolution(alpha_star=alpha_star, gamma_at_star=g, max_radius=math.sqrt(g),
                         iterations=iterations, converged=converged)


def _sign(x: float) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def grid_oracle_alpha_star(
    env: Environment,
    budget: LinkBudget,
    grid_points: int = DEFAULT_CONFIG.grid_points,
) -> float:
    """Independent check on the bisection: exhaustive argmax on a uniform grid.

    Raises:
        ValueError: if fewer than 1000 grid points are requested.
    """
    if grid_points < 1000:
        raise ValueError(f"grid_points must be >= 1000, got {grid_points}")
    alphas = np.linspace(0.0, ALPHA_MAX, grid_points)
    values = gamma_values(env, budget, alphas)
    return float(alphas[int(np.argmax(values))])


@dataclass(frozen=True)
class GammaCurve:
    """Sampled squared-radius curve, with the peak row marked when interior.

    ``peak_index`` is None when the sampling is too coarse to carry an
    interior peak (or the maximizer sits on the bracket boundary).
    """

    alpha: np.ndarray
    gamma_m2: np.ndarray
    peak_index: int | None

    @property
    def alpha_star(self) -> float | None:
        return None if self.peak_index is None else float(self.alpha[self.peak_index])


def gamma_curve(
    env: Environment,
    budget: LinkBudget,
    sample_count: int,
    config: SolverConfig = DEFAULT_CONFIG,
) -> GammaCurve:
    """Uniformly sampled curve over [0, tan(89.9 deg)] for plotting/export.

    When the optimizer sits strictly inside the bracket and tops its
    neighboring samples, the exact peak point is spliced into the curve (in
    sorted position) and flagged; a two-point request stays endpoints-only
    with no flag.

    Raises:
        ValueError: if fewer than two samples are requested.
    """
    if sample_count < 2:
        raise ValueError(f"sample_count must be >= 2, got {sample_count}")
    alphas = np.linspace(0.0, ALPHA_MAX, sample_count)
    values = gamma_values(env, budget, alphas)

    peak_index: int | None = None
    if sample_count >= 3:
        sol = find_alpha_star(env, budget, config)
        if 0.0 < sol.alpha_star < ALPHA_MAX:
            pos = int(np.searchsorted(alphas, sol.alpha_star))
            if pos < sample_count and alphas[pos] == sol.alpha_star:
                if values[pos] >= values[pos - 1] and values[pos] >= values[pos + 1]:
                    peak_index = pos
            elif sol.gamma_at_star >= values[pos - 1] and sol.gamma_at_star >= values[pos]:
                alphas = np.insert(alphas, pos, sol.alpha_star)
                values = np.insert(values, pos, sol.gamma_at_star)
                peak_index = pos
    return GammaCurve(alpha=alphas, gamma_m2=values, peak_index=peak_index)
