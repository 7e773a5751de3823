import math

import numpy as np
import pytest

from coveragekit.core.arima import (
    ForecastConfig,
    ForecastMetrics,
    css_residuals,
    fit_arima101,
    rolling_forecast,
    rolling_forecast_path,
)
from coveragekit.core.construction import ReturnSeries
from coveragekit.core.errors import ConvergenceFailure, InsufficientData
from coveragekit.core.rng import DeterministicStream


def _fit(r):
    try:
        return fit_arima101(r)
    except ConvergenceFailure as exc:
        return exc.best


def _arma(c, phi, theta, n, seed, scale=0.01):
    eps = DeterministicStream(seed).normal(n) * scale
    r = np.empty(n)
    r[0] = c / (1 - phi) + eps[0]
    for t in range(1, n):
        r[t] = c + phi * r[t - 1] + eps[t] + theta * eps[t - 1]
    return r


def test_css_residuals_by_hand():
    r = np.array([0.1, 0.3, -0.2, 0.05])
    c, phi, theta = 0.01, 0.5, 0.2
    e1 = r[1] - c - phi * r[0]
    e2 = r[2] - c - phi * r[1] - theta * e1
    e3 = r[3] - c - phi * r[2] - theta * e2
    np.testing.assert_allclose(css_residuals(c, phi, theta, r), [e1, e2, e3], rtol=1e-12)


def test_fit_recovers_arma_parameters():
    r = _arma(0.0005, 0.6, -0.3, 4000, seed=21)
    fit = _fit(r)
    assert abs(fit.phi - 0.6) < 0.1
    assert abs(fit.theta + 0.3) < 0.1
    assert fit.sigma2_eps == pytest.approx(1e-4, rel=0.1)
    assert fit.n_obs == 3999
    assert fit.aic == pytest.approx(8 - 2 * fit.loglik)
    assert fit.bic == pytest.approx(4 * math.log(3999) - 2 * fit.loglik)


def test_white_noise_fit_is_near_zero_dynamics():
    """AR and MA factors cancel on white noise, so the fit reduces to a constant mean."""
    r = DeterministicStream(13).normal(2000) * 0.02
    fit = _fit(r)
    assert (fit.phi, fit.theta) == (0.0, 0.0)
    assert fit.sigma2_eps == pytest.approx(4e-4, rel=0.1)
    assert fit.sigma2_eps == pytest.approx(float(np.var(r[1:])), rel=1e-9)
    assert fit.c == pytest.approx(float(r[1:].mean()), rel=1e-9, abs=1e-12)
    m = r.size - 1
    assert fit.loglik == pytest.approx(-0.5 * m * (math.log(2 * math.pi * fit.sigma2_eps) + 1.0), rel=1e-9)


def test_fit_needs_enough_varying_data():
    with pytest.raises(InsufficientData):
        fit_arima101(np.arange(20) * 0.001)
    with pytest.raises(InsufficientData):
        fit_arima101(np.zeros(200))


def test_rolling_forecast_metrics():
    r = _arma(0.0, 0.5, 0.0, 1000, seed=3)
    metrics = rolling_forecast(r, 0.8)
    assert metrics.n_test == 200
    assert metrics.rmse >= metrics.mae > 0
    # one-step errors are close to the innovation scale
    assert metrics.rmse == pytest.approx(0.01, rel=0.2)


def test_forecast_on_constant_training_segment_uses_its_mean():
    r = np.concatenate([np.zeros(80), np.full(20, 0.01)])
    metrics = rolling_forecast(r, 0.8)
    assert metrics.rmse == pytest.approx(0.01)
    assert metrics.mae == pytest.approx(0.01)


def test_constant_zero_returns_forecast_perfectly():
    metrics = rolling_forecast(np.zeros(200), 0.8)
    assert metrics.rmse == 0.0 and metrics.mae == 0.0
    assert metrics.n_test == 40


def test_forecast_split_validation():
    r = DeterministicStream(1).normal(60)
    with pytest.raises(ValueError):
        rolling_forecast(r, 1.0)
    with pytest.raises(InsufficientData):
        rolling_forecast(r, 0.8)
    with pytest.raises(ValueError):
        ForecastConfig(split_fraction=0.0)


def test_metrics_reject_rmse_below_mae():
    with pytest.raises(AssertionError):
        ForecastMetrics(rmse=0.1, mae=0.2, n_test=10, split_fraction=0.8)


def test_forecast_path_lines_up_with_test_dates():
    returns = ReturnSeries.from_values(_arma(0.0, 0.4, 0.2, 500, seed=9))
    path = rolling_forecast_path(returns, 0.8)
    assert len(path.rows) == 100
    assert path.dates[0] == returns.dates[400]
    np.testing.assert_array_equal(path.actual, returns.r[400:])
    metrics = rolling_forecast(returns, 0.8)
    errors = path.actual - path.forecast
    assert metrics.rmse == pytest.approx(math.sqrt(float(np.mean(errors ** 2))))
