"""GARCH(1,1) with constant mean: likelihood, estimation, long-run variance.

    r_t = mu + e_t,  e_t = sigma_t z_t,  z_t ~ N(0, 1)
    sigma_t^2 = omega + alpha e_{t-1}^2 + beta sigma_{t-1}^2

The pre-sample variance and pre-sample squared innovation are both backcast
to mean((r - mu)^2), so the recursion applies to every observation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Union

import numpy as np
from scipy import signal, special

from .construction import ReturnSeries
from .errors import BreakdownError, ConvergenceFailure, InsufficientData, NonFiniteLikelihood
from .fitting import FitConfig, minimize_from_starts

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)
N_PARAMS = 4

# (alpha, beta) starting points; omega is set to match the sample variance.
STARTS = ((0.05, 0.90), (0.10, 0.80), (0.20, 0.50), (0.02, 0.97))

Returns = Union[ReturnSeries, np.ndarray, list]


@dataclass(frozen=True)
class GarchFit:
    mu: float
    omega: float
    alpha: float
    beta: float
    loglik: float
    n_obs: int
    persistence: float
    breakdown: bool
    converged: bool = True
    iterations: int = 0

    @property
    def aic(self) -> float:
        return 2 * N_PARAMS - 2 * self.loglik

    @property
    def bic(self) -> float:
        return N_PARAMS * math.log(self.n_obs) - 2 * self.loglik

    def to_dict(self) -> dict:
        return {**asdict(self), "aic": self.aic, "bic": self.bic}


def return_values(returns: Returns) -> np.ndarray:
    if isinstance(returns, ReturnSeries):
        return returns.r
    return np.asarray(returns, dtype=float)


def conditional_variances(params, returns: Returns) -> np.ndarray:
    """sigma_t^2 for every observation under ``params = (mu, omega, alpha, beta)``."""
    mu, omega, alpha, beta = (float(p) for p in params)
    e2 = (return_values(returns) - mu) ** 2
    backcast = float(e2.mean())
    lagged = np.concatenate(([backcast], e2[:-1]))
    sigma2, _ = signal.lfilter([1.0], [1.0, -beta], omega + alpha * lagged, zi=[beta * backcast])
    return sigma2


def garch_loglik(params, returns: Returns) -> float:
    """Gaussian log-likelihood of ``returns`` under ``params = (mu, omega, alpha, beta)``."""
    mu, omega, alpha, beta = (float(p) for p in params)
    if not omega > 0 or alpha < 0 or beta < 0:
        raise ValueError(f"need omega > 0, alpha >= 0, beta >= 0; got {omega}, {alpha}, {beta}")
    r = return_values(returns)
    if r.size < 10:
        raise InsufficientData(f"GARCH likelihood needs at least 10 returns, got {r.size}")
    sigma2 = conditional_variances((mu, omega, alpha, beta), r)
    if not np.all(np.isfinite(sigma2)) or np.any(sigma2 <= 0):
        raise NonFiniteLikelihood("conditional variance left the positive reals")
    e2 = (r - mu) ** 2
    value = -0.5 * float(np.sum(LOG_2PI + np.log(sigma2) + e2 / sigma2))
    if not math.isfinite(value):
        raise NonFiniteLikelihood("log-likelihood is not finite")
    return value


def to_unconstrained(mu: float, omega: float, alpha: float, beta: float) -> np.ndarray:
    """(mu, log omega, logit alpha, logit beta)."""
    return np.array([mu, math.log(omega), special.logit(alpha), special.logit(beta)])


def from_unconstrained(theta) -> tuple[float, float, float, float]:
    mu, log_omega, a, b = (float(t) for t in theta)
    return mu, math.exp(log_omega), float(special.expit(a)), float(special.expit(b))


def fit_garch11(returns: Returns, config: FitConfig = FitConfig()) -> GarchFit:
    """Maximum-likelihood GARCH(1,1) by bounded Nelder-Mead with restarts.

    Estimation runs on returns scaled to unit sample standard deviation and
    is mapped back exactly. alpha + beta is not bounded below one, so a fit
    can reach the breakdown threshold. Raises ``ConvergenceFailure`` (with
    the best fit attached) if no restart converged.
    """
    r = return_values(returns)
    n = int(r.size)
    if n < config.min_obs:
        raise InsufficientData(f"GARCH fit needs at least {config.min_obs} returns, got {n}")
    if n < config.min_obs_warn:
        logger.warning("GARCH fit on only %d returns; estimates will be unstable", n)
    scale = float(np.std(r, ddof=1))
    if not scale > 0:
        raise InsufficientData("GARCH fit on a constant return series")

    z = r / scale
    centre = float(z.mean())
    spread = float(np.mean((z - centre) ** 2))
    starts = [
        to_unconstrained(centre, max((1.0 - a - b) * spread, 1e-6), a, b)
        for a, b in STARTS
    ]
    bounds = [(centre - 5.0, centre + 5.0), (-30.0, 10.0), (-20.0, 20.0), (-20.0, 20.0)]

    def objective(theta: np.ndarray) -> float:
        return -garch_loglik(from_unconstrained(theta), z)

    search = minimize_from_starts(objective, starts, bounds, config)
    mu_z, omega_z, alpha, beta = from_unconstrained(search.x)
    persistence = alpha + beta
    fit = GarchFit(
        mu=mu_z * scale,
        omega=omega_z * scale * scale,
        alpha=alpha,
        beta=beta,
        loglik=-search.fun - n * math.log(scale),
        n_obs=n,
        persistence=persistence,
        breakdown=persistence >= config.breakdown_threshold,
        converged=search.converged,
        iterations=search.iterations,
    )
    logger.debug("GARCH fit n=%d alpha=%.4f beta=%.4f persistence=%.5f", n, alpha, beta, persistence)
    if not search.converged:
        raise ConvergenceFailure(
            f"GARCH search did not converge within {config.max_iter} iterations", best=fit)
    return fit


def unconditional_variance(fit: GarchFit) -> float:
    """omega / (1 - alpha - beta); undefined for breakdown fits."""
    if fit.breakdown:
        raise BreakdownError(
            f"persistence {fit.persistence:.6f} is at or above the breakdown threshold", fit=fit)
    return fit.omega / (1.0 - fit.alpha - fit.beta)
