import math

import numpy as np
import pytest

from coveragekit.core.errors import BreakdownError, ConvergenceFailure, InsufficientData
from coveragekit.core.fitting import FitConfig
from coveragekit.core.garch import (
    STARTS,
    GarchFit,
    conditional_variances,
    fit_garch11,
    from_unconstrained,
    garch_loglik,
    to_unconstrained,
    unconditional_variance,
)
from coveragekit.core.rng import DeterministicStream
from coveragekit.core.synthetic import DEFAULT_PARAMS, GarchParams, simulate_garch_returns


def _fit(r):
    try:
        return fit_garch11(r)
    except ConvergenceFailure as exc:
        return exc.best


def _reference_loglik(params, r):
    mu, omega, alpha, beta = params
    e = [x - mu for x in r]
    backcast = sum(x * x for x in e) / len(e)
    sigma2, prev_e2, total = backcast, backcast, 0.0
    for x in e:
        sigma2 = omega + alpha * prev_e2 + beta * sigma2
        total += -0.5 * (math.log(2 * math.pi) + math.log(sigma2) + x * x / sigma2)
        prev_e2 = x * x
    return total


def test_constant_variance_when_alpha_beta_zero():
    sigma2 = conditional_variances((0.0, 0.5, 0.0, 0.0), [1.0, -1.0, 0.5])
    np.testing.assert_allclose(sigma2, [0.5, 0.5, 0.5])


def test_variance_recursion_by_hand():
    r = [0.1, -0.2, 0.3]
    backcast = (0.01 + 0.04 + 0.09) / 3
    s1 = 0.01 + 0.1 * backcast + 0.8 * backcast
    s2 = 0.01 + 0.1 * 0.01 + 0.8 * s1
    s3 = 0.01 + 0.1 * 0.04 + 0.8 * s2
    np.testing.assert_allclose(conditional_variances((0.0, 0.01, 0.1, 0.8), r), [s1, s2, s3], rtol=1e-12)


def test_loglik_matches_reference_loop():
    r = DeterministicStream(5).normal(40) * 0.01
    params = (0.001, 2e-5, 0.07, 0.85)
    assert math.isclose(garch_loglik(params, r), _reference_loglik(params, r), rel_tol=1e-10)


def test_loglik_closed_form_for_constant_variance():
    r = np.linspace(-1.0, 1.0, 12)
    omega = 0.3
    expected = -0.5 * (12 * math.log(2 * math.pi * omega) + float(np.sum(r ** 2)) / omega)
    assert math.isclose(garch_loglik((0.0, omega, 0.0, 0.0), r), expected, rel_tol=1e-12)


def test_loglik_preconditions():
    with pytest.raises(ValueError):
        garch_loglik((0.0, 0.0, 0.1, 0.8), np.ones(20))
    with pytest.raises(InsufficientData):
        garch_loglik((0.0, 1.0, 0.1, 0.8), np.ones(5))


def test_parameter_transform_round_trip():
    mu, omega, alpha, beta = from_unconstrained(to_unconstrained(0.01, 3e-6, 0.08, 0.9))
    assert math.isclose(omega, 3e-6, rel_tol=1e-12)
    assert math.isclose(alpha, 0.08, rel_tol=1e-12) and math.isclose(beta, 0.9, rel_tol=1e-12)


def test_fit_rejects_short_and_constant_series():
    with pytest.raises(InsufficientData):
        fit_garch11(np.ones(5) * 0.01)
    with pytest.raises(InsufficientData):
        fit_garch11(np.zeros(200))


def test_fit_on_simulated_series_is_close_to_truth():
    r = simulate_garch_returns(DEFAULT_PARAMS, 3000, DeterministicStream(3, 99))
    fit = _fit(r)
    assert not fit.breakdown
    assert abs(fit.alpha + fit.beta - 0.98) < 0.05
    assert fit.aic == pytest.approx(8 - 2 * fit.loglik)
    assert fit.bic == pytest.approx(4 * math.log(3000) - 2 * fit.loglik)
    # the fitted parameters are at least as likely as the truth
    truth = (0.0, DEFAULT_PARAMS.omega, DEFAULT_PARAMS.alpha, DEFAULT_PARAMS.beta)
    assert fit.loglik >= garch_loglik(truth, r) - 1e-6
    assert fit.loglik == pytest.approx(garch_loglik((fit.mu, fit.omega, fit.alpha, fit.beta), r), rel=1e-9)


def test_unconditional_variance_and_breakdown():
    fit = GarchFit(mu=0.0, omega=2e-6, alpha=0.08, beta=0.90, loglik=0.0, n_obs=100,
                   persistence=0.98, breakdown=False)
    assert unconditional_variance(fit) == pytest.approx(1e-4)
    broken = GarchFit(mu=0.0, omega=2e-6, alpha=0.2, beta=0.7995, loglik=0.0, n_obs=100,
                      persistence=0.9995, breakdown=True)
    with pytest.raises(BreakdownError) as info:
        unconditional_variance(broken)
    assert info.value.fit is broken


def test_leading_zeros_drive_persistence_to_breakdown():
    """Long zero-return prefix followed by a volatile segment."""
    growth = np.exp(np.linspace(0.0, 2.0, 600))
    volatile = DeterministicStream(8).normal(600) * 0.01 * growth
    fit = _fit(np.concatenate([np.zeros(900), volatile]))
    assert fit.persistence >= 0.999
    assert fit.breakdown
    with pytest.raises(BreakdownError):
        unconditional_variance(fit)


def test_non_convergence_carries_best_fit():
    r = simulate_garch_returns(DEFAULT_PARAMS, 500, DeterministicStream(4, 1))
    with pytest.raises(ConvergenceFailure) as info:
        fit_garch11(r, FitConfig(max_iter=3, restarts=1))
    assert isinstance(info.value.best, GarchFit)
    assert not info.value.best.converged


@pytest.mark.slow
def test_estimator_recovers_parameters_across_seeds():
    alphas, betas, within = [], [], 0
    for seed in range(10):
        r = simulate_garch_returns(DEFAULT_PARAMS, 5000, DeterministicStream(seed, 7))
        fit = _fit(r)
        alphas.append(fit.alpha)
        betas.append(fit.beta)
        if not fit.breakdown and abs(unconditional_variance(fit) / 1e-4 - 1) <= 0.15:
            within += 1
    assert abs(np.median(alphas) - 0.08) <= 0.05
    assert abs(np.median(betas) - 0.90) <= 0.05
    assert within >= 8


def test_loglik_scale_shift():
    r = DeterministicStream(6).normal(300) * 0.01
    mu, omega, alpha, beta = 0.0005, 3e-6, 0.1, 0.85
    scaled = garch_loglik((3 * mu, 9 * omega, alpha, beta), 3 * r)
    assert scaled == pytest.approx(garch_loglik((mu, omega, alpha, beta), r) - 300 * math.log(3), abs=1e-8)


def _scaled_coordinates(fit, r):
    scale = float(np.std(r, ddof=1))
    z = r / scale
    x = to_unconstrained(fit.mu / scale, fit.omega / scale ** 2, fit.alpha, fit.beta)
    return z, x


def test_gradient_vanishes_at_the_optimum():
    r = simulate_garch_returns(DEFAULT_PARAMS, 3000, DeterministicStream(3, 99))
    fit = _fit(r)
    z, x = _scaled_coordinates(fit, r)

    def loglik(point):
        return garch_loglik(from_unconstrained(point), z)

    peak = loglik(x)
    h = 1e-5
    for j in range(4):
        step = np.zeros(4)
        step[j] = h
        gradient = (loglik(x + step) - loglik(x - step)) / (2 * h)
        assert abs(gradient) <= 1e-4 * abs(peak)


def test_fit_is_at_least_as_likely_as_every_start():
    r = simulate_garch_returns(DEFAULT_PARAMS, 1500, DeterministicStream(5, 2))
    config = FitConfig()
    fit = _fit(r)
    scale = float(np.std(r, ddof=1))
    z = r / scale
    centre = float(z.mean())
    spread = float(np.mean((z - centre) ** 2))
    for a, b in STARTS[: config.restarts]:
        start = (centre, max((1.0 - a - b) * spread, 1e-6), a, b)
        assert fit.loglik >= garch_loglik(start, z) - r.size * math.log(scale) - 1e-9


def test_white_noise_variance_matches_omega():
    params = GarchParams(omega=4e-4, alpha=0.0, beta=0.0)
    r = simulate_garch_returns(params, 20000, DeterministicStream(17))
    assert float(np.var(r, ddof=1)) == pytest.approx(4e-4, rel=0.05)


def test_leading_zeros_then_plain_noise_break_down():
    """60% leading zeros followed by N(0, 0.02^2) returns."""
    r = np.concatenate([np.zeros(900), DeterministicStream(8).normal(600) * 0.02])
    fit = _fit(r)
    assert fit.breakdown and fit.persistence >= 0.999


@pytest.mark.slow
def test_simulated_variance_matches_unconditional_variance():
    r = simulate_garch_returns(DEFAULT_PARAMS, 50000, DeterministicStream(23))
    assert float(np.var(r, ddof=1)) == pytest.approx(DEFAULT_PARAMS.unconditional_variance, rel=0.10)
