"""Derivative-free likelihood search shared by the GARCH and ARIMA estimators."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

logger = logging.getLogger(__name__)

PENALTY = 1e12


@dataclass(frozen=True)
class FitConfig:
    max_iter: int = 2000
    fatol_rel: float = 1e-10
    xatol: float = 1e-8
    restarts: int = 3
    breakdown_threshold: float = 0.999
    min_obs: int = 10
    min_obs_warn: int = 100

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if not 0 < self.breakdown_threshold <= 1:
            raise ValueError("breakdown_threshold must lie in (0, 1]")


@dataclass(frozen=True)
class SearchResult:
    x: np.ndarray
    fun: float
    initial_fun: float
    converged: bool
    iterations: int


def guarded(objective: Callable[[np.ndarray], float]) -> Callable[[np.ndarray], float]:
    """Map non-finite values and arithmetic failures to a large penalty."""

    def wrapped(x: np.ndarray) -> float:
        try:
            value = float(objective(x))
        except (ArithmeticError, ValueError):
            return PENALTY
        return value if np.isfinite(value) else PENALTY

    return wrapped


def minimize_from_starts(
    objective: Callable[[np.ndarray], float],
    starts: Sequence[Sequence[float]],
    bounds: Sequence[tuple[float, float]],
    config: FitConfig,
) -> SearchResult:
    """Bounded Nelder-Mead from each start; keep the lowest objective.

    The result counts as converged when some run that met the tolerances
    reached the best objective (within that run's tolerance).
    """
    objective = guarded(objective)
    runs = []
    initial = []
    for start in starts[: config.restarts]:
        x0 = np.asarray(start, dtype=float)
        f0 = objective(x0)
        initial.append(f0)
        fatol = config.fatol_rel * max(1.0, abs(f0))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = optimize.minimize(
                objective, x0, method="Nelder-Mead", bounds=bounds,
                options={"maxiter": config.max_iter, "xatol": config.xatol, "fatol": fatol},
            )
        logger.debug("start %s -> f=%.10g success=%s nit=%d", x0, res.fun, res.success, res.nit)
        runs.append((float(res.fun), res, fatol))

    best_fun, best, _ = min(runs, key=lambda run: run[0])
    converged = any(res.success and fun <= best_fun + tol for fun, res, tol in runs)
    return SearchResult(
        x=np.asarray(best.x, dtype=float),
        fun=best_fun,
        initial_fun=min(initial),
        converged=converged,
        iterations=int(sum(res.nit for _, res, _ in runs)),
    )
