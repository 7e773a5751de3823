"""Volatility distortion between coverage-aware and naive constructions.

Distortion is (sigma_aware - sigma_naive) / sigma_aware, measured either on the
sample standard deviation of returns or on the GARCH(1,1) unconditional
variance. Positive values mean the naive construction suppresses volatility.
"""

from __future__ import annotations

import datetime as dt
import logging
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .arima import ArimaFit, ForecastConfig, fit_arima101, rolling_forecast
from .construction import (
    Construction,
    NaiveKind,
    PriceSeries,
    ReturnSeries,
    build_construction,
    log_returns,
)
from .errors import (
    BreakdownError,
    ConvergenceFailure,
    DegenerateBaseline,
    EmptySample,
    InsufficientData,
    UndefinedTest,
)
from .fitting import FitConfig
from .garch import GarchFit, fit_garch11, unconditional_variance
from .model import DAY, InstrumentMetadata, InstrumentSeries, Version, to_day
from .stats import sample_std, sign_test, t_test

logger = logging.getLogger(__name__)


class Measure(str, Enum):
    RETURN_STD = "ReturnStd"
    GARCH_UNCONDITIONAL_VARIANCE = "GarchUnconditionalVariance"


def distortion(sigma_aware: float, sigma_naive: float) -> float:
    if not sigma_aware > 0:
        raise DegenerateBaseline(f"coverage-aware volatility {sigma_aware!r} is not positive")
    return (sigma_aware - sigma_naive) / sigma_aware


# Selection


@dataclass(frozen=True)
class SelectionCriteria:
    """``listed_after=None`` admits anything listed on or after the panel start."""

    listed_after: Optional[dt.date] = dt.date(2016, 12, 31)
    min_trading_days: int = 400

    def __post_init__(self):
        if self.min_trading_days < 2:
            raise ValueError("min_trading_days must be at least 2")


def select_instruments(metadata: Iterable[InstrumentMetadata], criteria: SelectionCriteria,
                       panel_start: dt.date, version: Version = Version.UNADJUSTED) -> list[str]:
    """Tickers first observed strictly after the cutoff with enough trading days."""
    if criteria.listed_after is None:
        cutoff = to_day(panel_start) - DAY
    else:
        cutoff = to_day(criteria.listed_after)
    selected = []
    for meta in metadata:
        window = meta.preferred_window(version)
        if to_day(window.first_date) > cutoff and window.trading_days >= criteria.min_trading_days:
            selected.append(meta.ticker)
    logger.info("selected %d instruments", len(selected))
    return sorted(selected)


# Exact dilution oracle


@dataclass(frozen=True)
class ReturnSummary:
    n: int
    mean: float
    sum_of_squares: float

    @classmethod
    def from_returns(cls, values) -> "ReturnSummary":
        values = [float(x) for x in np.asarray(values, dtype=float)]
        return cls(len(values), math.fsum(values) / len(values), math.fsum(x * x for x in values))

    @classmethod
    def from_std(cls, n: int, std: float, mean: float = 0.0) -> "ReturnSummary":
        return cls(n, mean, (n - 1) * std * std + n * mean * mean)


def analytic_naive_std(summary: ReturnSummary, k: int) -> float:
    """Sample std of the returns together with ``k`` extra zero returns, in closed form."""
    if summary.n < 2:
        raise InsufficientData(f"need at least 2 returns, got {summary.n}")
    if k < 0:
        raise ValueError(f"zero count must be non-negative, got {k}")
    total = summary.n + k
    mean = summary.n * summary.mean / total
    variance = (summary.sum_of_squares - total * mean * mean) / (total - 1)
    return math.sqrt(max(variance, 0.0))


# Per-instrument measures


@dataclass(frozen=True)
class GarchOutcome:
    fit: GarchFit
    variance: Optional[float]

    @property
    def breakdown(self) -> bool:
        return self.variance is None


def garch_outcome(returns: ReturnSeries, config: FitConfig = FitConfig()) -> GarchOutcome:
    """Fit and long-run variance; a breakdown leaves the variance empty."""
    try:
        fit = fit_garch11(returns, config)
    except ConvergenceFailure as exc:
        logger.warning("%s %s: %s; using the best fit found",
                       returns.ticker, returns.construction.value, exc)
        fit = exc.best
    try:
        variance = unconditional_variance(fit)
    except BreakdownError as exc:
        logger.warning("%s %s: %s", returns.ticker, returns.construction.value, exc)
        variance = None
    return GarchOutcome(fit, variance)


@dataclass(frozen=True)
class DistortionRecord:
    ticker: str
    naive_kind: NaiveKind
    measure: Measure
    padding_days: int
    padding_ratio: float
    sigma_aware: Optional[float]
    sigma_naive: Optional[float]
    delta_sigma: Optional[float]
    garch_breakdown: bool = False

    def __post_init__(self):
        if self.garch_breakdown and self.delta_sigma is not None:
            raise ValueError("a breakdown record carries no distortion")

    def to_dict(self) -> dict:
        data = asdict(self)
        data["naive_kind"] = self.naive_kind.label
        data["measure"] = self.measure.value
        return data


def compare_constructions(aware: ReturnSeries, naive: ReturnSeries, naive_kind: NaiveKind,
                          aware_garch: GarchOutcome, naive_garch: GarchOutcome
                          ) -> tuple[DistortionRecord, DistortionRecord]:
    padding = len(naive) - len(aware)
    ratio = padding / len(aware)
    std_aware, std_naive = sample_std(aware.r), sample_std(naive.r)
    std_record = DistortionRecord(
        ticker=aware.ticker, naive_kind=naive_kind, measure=Measure.RETURN_STD,
        padding_days=padding, padding_ratio=ratio, sigma_aware=std_aware, sigma_naive=std_naive,
        delta_sigma=distortion(std_aware, std_naive),
    )
    breakdown = aware_garch.breakdown or naive_garch.breakdown
    garch_record = DistortionRecord(
        ticker=aware.ticker, naive_kind=naive_kind, measure=Measure.GARCH_UNCONDITIONAL_VARIANCE,
        padding_days=padding, padding_ratio=ratio,
        sigma_aware=aware_garch.variance, sigma_naive=naive_garch.variance,
        delta_sigma=None if breakdown else distortion(aware_garch.variance, naive_garch.variance),
        garch_breakdown=breakdown,
    )
    return std_record, garch_record


def analyze_instrument(series: InstrumentSeries, naive_kind: NaiveKind, panel_start: dt.date,
                       config: FitConfig = FitConfig()) -> tuple[DistortionRecord, DistortionRecord]:
    """ReturnStd and GARCH records for one instrument and one naive construction."""
    naive_kind = NaiveKind(naive_kind)
    aware = log_returns(build_construction(series, Construction.COVERAGE_AWARE))
    naive = log_returns(build_construction(series, naive_kind.construction, panel_start))
    return compare_constructions(aware, naive, naive_kind,
                                 garch_outcome(aware, config), garch_outcome(naive, config))


# Single-instrument construction profile


@dataclass(frozen=True)
class ConstructionProfile:
    ticker: str
    construction: Construction
    observations: int
    return_std: float
    aic: Optional[float]
    bic: Optional[float]
    rmse: Optional[float]
    mae: Optional[float]
    arima: Optional[ArimaFit] = field(default=None, compare=False, repr=False)

    def to_dict(self) -> dict:
        data = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "arima"}
        data["construction"] = self.construction.label
        return data


def construction_profile(prices: PriceSeries, returns: ReturnSeries,
                         config: FitConfig = FitConfig(),
                         forecast: ForecastConfig = ForecastConfig()) -> ConstructionProfile:
    """Observation count, return std, ARIMA(1,0,1) criteria and forecast errors."""
    aic = bic = rmse = mae = None
    try:
        fit = fit_arima101(returns, config)
    except ConvergenceFailure as exc:
        logger.warning("%s %s: %s", returns.ticker, returns.construction.value, exc)
        fit = exc.best
    except InsufficientData as exc:
        logger.warning("%s %s: no ARIMA fit (%s)", returns.ticker, returns.construction.value, exc)
        fit = None
    if fit is not None:
        aic, bic = fit.aic, fit.bic
    try:
        metrics = rolling_forecast(returns, forecast.split_fraction, config, forecast.min_test)
        rmse, mae = metrics.rmse, metrics.mae
    except InsufficientData as exc:
        logger.warning("%s %s: no forecast (%s)", returns.ticker, returns.construction.value, exc)
    return ConstructionProfile(
        ticker=prices.ticker,
        construction=prices.construction,
        observations=len(prices),
        return_std=sample_std(returns.r),
        aic=aic, bic=bic, rmse=rmse, mae=mae, arima=fit,
    )


# Aggregation


@dataclass(frozen=True)
class DistortionSummary:
    measure: Measure
    naive_kind: NaiveKind
    n: int
    mean: float
    median: float
    frac_positive: float
    sign_test_p: Optional[float]
    t_stat: Optional[float]
    t_test_p: Optional[float]
    breakdown_count: int
    minimum: float
    maximum: float
    q1: float
    q3: float
    frac_above_10pct: float
    frac_above_20pct: float

    def to_dict(self) -> dict:
        data = asdict(self)
        data["measure"] = self.measure.value
        data["naive_kind"] = self.naive_kind.label
        return data


def _deltas(records: Sequence[DistortionRecord]) -> np.ndarray:
    values = [r.delta_sigma for r in records if not r.garch_breakdown and r.delta_sigma is not None]
    return np.sort(np.asarray(values, dtype=float))


def summarize(records: Sequence[DistortionRecord]) -> DistortionSummary:
    """Aggregate one (measure, naive kind) group; breakdowns are counted, not averaged."""
    if not records:
        raise EmptySample("no records to summarize")
    groups = {(r.measure, r.naive_kind) for r in records}
    if len(groups) > 1:
        raise ValueError(f"records mix {len(groups)} measure/construction groups")
    measure, naive_kind = groups.pop()
    deltas = _deltas(records)
    if deltas.size == 0:
        raise EmptySample(f"every {measure.value} record is a breakdown")

    try:
        sign_p = sign_test(deltas)
    except UndefinedTest as exc:
        logger.warning("sign test undefined: %s", exc)
        sign_p = None
    try:
        t_stat, t_p = t_test(deltas)
    except UndefinedTest as exc:
        logger.warning("t test undefined: %s", exc)
        t_stat = t_p = None

    q1, median, q3 = (float(q) for q in np.quantile(deltas, [0.25, 0.5, 0.75]))
    n = int(deltas.size)
    return DistortionSummary(
        measure=measure,
        naive_kind=naive_kind,
        n=n,
        mean=math.fsum(deltas.tolist()) / n,
        median=median,
        frac_positive=int(np.count_nonzero(deltas > 0)) / n,
        sign_test_p=sign_p,
        t_stat=t_stat,
        t_test_p=t_p,
        breakdown_count=sum(1 for r in records if r.garch_breakdown),
        minimum=float(deltas[0]),
        maximum=float(deltas[-1]),
        q1=q1,
        q3=q3,
        frac_above_10pct=int(np.count_nonzero(deltas > 0.10)) / n,
        frac_above_20pct=int(np.count_nonzero(deltas > 0.20)) / n,
    )


def group_records(records: Iterable[DistortionRecord]
                  ) -> dict[tuple[Measure, NaiveKind], list[DistortionRecord]]:
    groups: dict[tuple[Measure, NaiveKind], list[DistortionRecord]] = defaultdict(list)
    for record in records:
        groups[(record.measure, record.naive_kind)].append(record)
    return dict(sorted(groups.items(), key=lambda item: (item[0][0].value, item[0][1].value)))


# Figure data


def histogram_bins(records: Sequence[DistortionRecord], bins: int = 20) -> list[tuple[float, float, int]]:
    """(left edge, right edge, count) over the non-breakdown distortions."""
    deltas = _deltas(records)
    if deltas.size == 0:
        return []
    counts, edges = np.histogram(deltas, bins=bins)
    return [(float(edges[i]), float(edges[i + 1]), int(c)) for i, c in enumerate(counts)]


def five_number(records: Sequence[DistortionRecord]) -> dict[str, float]:
    deltas = _deltas(records)
    if deltas.size == 0:
        raise EmptySample("no distortions for a five-number summary")
    q1, median, q3 = (float(q) for q in np.quantile(deltas, [0.25, 0.5, 0.75]))
    return {"min": float(deltas[0]), "q1": q1, "median": median, "q3": q3, "max": float(deltas[-1])}


def padding_pairs(records: Sequence[DistortionRecord]) -> list[tuple[str, int, float, float]]:
    """(ticker, padding days, padding ratio, distortion) for non-breakdown records."""
    return [(r.ticker, r.padding_days, r.padding_ratio, r.delta_sigma)
            for r in sorted(records, key=lambda r: r.ticker)
            if not r.garch_breakdown and r.delta_sigma is not None]
