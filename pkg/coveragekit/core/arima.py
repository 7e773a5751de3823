"""ARIMA(1,0,1) with constant by conditional sum of squares, and rolling forecasts.

    r_t = c + phi r_{t-1} + e_t + theta e_{t-1}

The first observation is conditioned on and the pre-sample residual is zero.
"""

from __future__ import annotations

import datetime as dt
import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import signal

from .construction import ReturnSeries
from .errors import ConvergenceFailure, InsufficientData
from .fitting import FitConfig, minimize_from_starts
from .garch import Returns, return_values
from .model import as_date

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)
N_PARAMS = 4
MIN_OBS = 50

# (phi, theta) starting points
STARTS = ((0.0, 0.0), (0.3, -0.3), (-0.3, 0.3), (0.6, 0.0))

# (1 - phi L) and (1 + theta L) are treated as a common factor below this |phi + theta|
COMMON_FACTOR_TOL = 0.1


@dataclass(frozen=True)
class ForecastConfig:
    split_fraction: float = 0.8
    min_test: int = 20

    def __post_init__(self):
        if not 0 < self.split_fraction < 1:
            raise ValueError(f"split_fraction must lie in (0, 1), got {self.split_fraction}")


@dataclass(frozen=True)
class ArimaFit:
    c: float
    phi: float
    theta: float
    sigma2_eps: float
    loglik: float
    aic: float
    bic: float
    n_obs: int
    converged: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ForecastMetrics:
    rmse: float
    mae: float
    n_test: int
    split_fraction: float

    def __post_init__(self):
        assert self.rmse >= self.mae * (1 - 1e-12) >= 0, "rmse below mae"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ForecastPath:
    dates: np.ndarray
    actual: np.ndarray
    forecast: np.ndarray

    @property
    def rows(self) -> list[tuple[dt.date, float, float]]:
        return [(as_date(d), float(a), float(f))
                for d, a, f in zip(self.dates, self.actual, self.forecast)]


def css_residuals(c: float, phi: float, theta: float, r: np.ndarray) -> np.ndarray:
    """Residuals for observations 2..n; e_1 = 0."""
    u = r[1:] - c - phi * r[:-1]
    return signal.lfilter([1.0], [1.0, theta], u)


def _css_loglik(ssr: float, m: int) -> float:
    return -0.5 * m * (LOG_2PI + math.log(ssr / m) + 1.0)


def fit_arima101(returns: Returns, config: FitConfig = FitConfig()) -> ArimaFit:
    """CSS estimate with sigma2_eps concentrated out and phi, theta tanh-mapped.

    A fit whose AR and MA factors nearly cancel is reported as the
    constant-mean model (phi = theta = 0).
    """
    r = return_values(returns)
    if r.size < MIN_OBS:
        raise InsufficientData(f"ARIMA fit needs at least {MIN_OBS} returns, got {r.size}")
    scale = float(np.std(r, ddof=1))
    if not scale > 0:
        raise InsufficientData("ARIMA fit on a constant return series")
    z = r / scale
    m = int(z.size - 1)
    centre = float(z.mean())

    def objective(x: np.ndarray) -> float:
        e = css_residuals(x[0], math.tanh(x[1]), math.tanh(x[2]), z)
        return -_css_loglik(float(np.dot(e, e)), m)

    starts = [(centre * (1.0 - phi), math.atanh(phi), math.atanh(theta)) for phi, theta in STARTS]
    bounds = [(centre - 10.0, centre + 10.0), (-5.0, 5.0), (-5.0, 5.0)]
    search = minimize_from_starts(objective, starts, bounds, config)

    c_z, phi, theta = float(search.x[0]), math.tanh(search.x[1]), math.tanh(search.x[2])
    objective_value = search.fun
    if abs(phi + theta) < COMMON_FACTOR_TOL:
        # cancelling factors leave phi and theta unidentified along phi = -theta
        logger.debug("ARIMA factors cancel (phi=%.4f theta=%.4f); reducing to a constant mean", phi, theta)
        c_z, phi, theta = float(z[1:].mean()), 0.0, 0.0
        objective_value = objective(np.array([c_z, 0.0, 0.0]))
    e = css_residuals(c_z, phi, theta, z)
    loglik = -objective_value - m * math.log(scale)
    fit = ArimaFit(
        c=c_z * scale,
        phi=phi,
        theta=theta,
        sigma2_eps=float(np.dot(e, e)) / m * scale * scale,
        loglik=loglik,
        aic=2 * N_PARAMS - 2 * loglik,
        bic=N_PARAMS * math.log(m) - 2 * loglik,
        n_obs=m,
        converged=search.converged,
    )
    logger.debug("ARIMA fit n=%d phi=%.4f theta=%.4f", m, phi, theta)
    if not search.converged:
        raise ConvergenceFailure(
            f"ARIMA search did not converge within {config.max_iter} iterations", best=fit)
    return fit


def _forecast_errors(r: np.ndarray, n_train: int, config: FitConfig) -> np.ndarray:
    train = r[:n_train]
    if not np.std(train) > 0:
        logger.debug("constant training segment; forecasting its mean")
        return r[n_train:] - float(train.mean())
    try:
        fit = fit_arima101(train, config)
    except ConvergenceFailure as exc:
        logger.warning("%s; forecasting with the best parameters found", exc)
        fit = exc.best
    # parameters frozen, residual state carried through the test segment
    e = css_residuals(fit.c, fit.phi, fit.theta, r)
    return e[n_train - 1:]


def _split(r: np.ndarray, split_fraction: float, min_test: int) -> int:
    if not 0 < split_fraction < 1:
        raise ValueError(f"split_fraction must lie in (0, 1), got {split_fraction}")
    n_train = int(math.floor(split_fraction * r.size))
    if r.size - n_train < min_test or n_train < 2:
        raise InsufficientData(
            f"{r.size} returns leave {r.size - n_train} test points at split {split_fraction}")
    return n_train


def rolling_forecast(returns: Returns, split_fraction: float = 0.8,
                     config: FitConfig = FitConfig(), min_test: int = 20) -> ForecastMetrics:
    """One-step-ahead RMSE/MAE over the chronological test segment."""
    r = return_values(returns)
    n_train = _split(r, split_fraction, min_test)
    errors = _forecast_errors(r, n_train, config)
    return ForecastMetrics(
        rmse=math.sqrt(float(np.mean(errors ** 2))),
        mae=float(np.mean(np.abs(errors))),
        n_test=int(errors.size),
        split_fraction=split_fraction,
    )


def rolling_forecast_path(returns: ReturnSeries, split_fraction: float = 0.8,
                          config: FitConfig = FitConfig(), min_test: int = 20) -> ForecastPath:
    r = returns.r
    n_train = _split(r, split_fraction, min_test)
    errors = _forecast_errors(r, n_train, config)
    actual = r[n_train:]
    return ForecastPath(dates=returns.dates[n_train:], actual=actual, forecast=actual - errors)
