"""Exception hierarchy shared by every coveragekit module."""

from __future__ import annotations

from typing import Any


class CoverageKitError(Exception):
    """Root of all coveragekit errors."""


class ConfigError(CoverageKitError):
    """Invalid or missing configuration, layout or analysis inputs."""


# Data, model and construction errors


class DataError(CoverageKitError):
    """Problems with instrument data as ingested or constructed."""


class EmptySeries(DataError, ValueError):
    """An instrument series has no observations."""


class MalformedRow(DataError, ValueError):
    """A row has an unparseable date or number."""


class NonPositiveClose(DataError, ValueError):
    """A closing price is zero or negative."""


class EmptyAfterCleaning(DataError):
    """Every row of a file was dropped during cleaning."""


class InternalInvariantViolation(DataError, AssertionError):
    """A structure was built inconsistently (for example a calendar missing a series date)."""


class PanelStartAfterListing(DataError, ValueError):
    """Backward fill was asked to start after the instrument's first observation."""


class InsufficientData(DataError, ValueError):
    """Too few observations for the requested computation."""


# Estimation errors


class EstimationError(CoverageKitError):
    """Base class for model fitting failures."""


class NonFiniteLikelihood(EstimationError, FloatingPointError):
    """The likelihood recursion produced a non-finite value."""


class ConvergenceFailure(EstimationError):
    """The optimizer hit its iteration limit; ``best`` holds the best fit found."""

    def __init__(self, message: str, best: Any = None):
        super().__init__(message)
        self.best = best


class BreakdownError(EstimationError):
    """A GARCH fit reached the persistence breakdown threshold."""

    def __init__(self, message: str, fit: Any = None):
        super().__init__(message)
        self.fit = fit


# Analysis errors


class AnalysisError(CoverageKitError):
    """Base class for distortion and aggregation failures."""


class DegenerateBaseline(AnalysisError, ZeroDivisionError):
    """The coverage-aware volatility is zero, so distortion is undefined."""


class UndefinedTest(AnalysisError, ValueError):
    """A statistical test has no defined value for the given sample."""


class EmptySample(AnalysisError, ValueError):
    """Nothing left to aggregate."""
