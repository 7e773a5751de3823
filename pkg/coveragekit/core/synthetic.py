"""Synthetic instrument universes with known GARCH(1,1) dynamics.

Instruments list at staggered dates, trade on a configurable set of weekdays
minus randomly removed holidays, and run to the panel end. Everything is a
function of the SyntheticSpec seed and the instrument index.
"""

from __future__ import annotations

import datetime as dt
import logging
import math
from dataclasses import asdict, dataclass
from typing import Sequence, Union

import numpy as np

from .model import DAY, InstrumentSeries, InstrumentType, Version, as_date, to_day
from .rng import DeterministicStream

logger = logging.getLogger(__name__)

# stream key suffixes
_LAYOUT, _PRICES = 0, 1


@dataclass(frozen=True)
class GarchParams:
    omega: float
    alpha: float
    beta: float
    mu: float = 0.0

    def __post_init__(self):
        if not self.omega > 0 or self.alpha < 0 or self.beta < 0:
            raise ValueError("need omega > 0, alpha >= 0, beta >= 0")
        if not self.alpha + self.beta < 1:
            raise ValueError(f"alpha + beta = {self.alpha + self.beta} is not stationary")

    @property
    def unconditional_variance(self) -> float:
        return self.omega / (1.0 - self.alpha - self.beta)


DEFAULT_PARAMS = GarchParams(omega=2e-6, alpha=0.08, beta=0.90)


@dataclass(frozen=True)
class SyntheticSpec:
    n_instruments: int = 20
    panel_start: dt.date = dt.date(2015, 1, 1)
    panel_end: dt.date = dt.date(2024, 12, 31)
    listing_spread: tuple[int, int] = (0, 1500)
    trading_weekdays: tuple[int, ...] = (0, 1, 2, 3, 4)
    holiday_rate: float = 0.05
    garch_params: Union[GarchParams, tuple[GarchParams, ...]] = DEFAULT_PARAMS
    p0: float = 100.0
    seed: int = 42
    instrument_type: InstrumentType = InstrumentType.EQUITY
    ticker_prefix: str = "SYN"

    def __post_init__(self):
        if self.n_instruments < 0:
            raise ValueError("n_instruments must be non-negative")
        if self.panel_end <= self.panel_start:
            raise ValueError("panel_end must follow panel_start")
        low, high = self.listing_spread
        if not 0 <= low <= high:
            raise ValueError(f"listing_spread must satisfy 0 <= min <= max, got {self.listing_spread}")
        if self.panel_start + dt.timedelta(days=high) >= self.panel_end:
            raise ValueError("latest listing would fall on or after panel_end")
        if not self.trading_weekdays or not set(self.trading_weekdays) <= set(range(7)):
            raise ValueError("trading_weekdays must be a non-empty subset of 0..6 (Monday = 0)")
        if not 0 <= self.holiday_rate <= 0.2:
            raise ValueError("holiday_rate must lie in [0, 0.2]")
        if not self.p0 > 0:
            raise ValueError("p0 must be positive")
        if isinstance(self.garch_params, tuple) and len(self.garch_params) != self.n_instruments:
            raise ValueError("per-instrument garch_params must match n_instruments")

    def params_for(self, index: int) -> GarchParams:
        if isinstance(self.garch_params, GarchParams):
            return self.garch_params
        return self.garch_params[index]

    def ticker(self, index: int) -> str:
        return f"{self.ticker_prefix}{index:03d}"


@dataclass(frozen=True)
class GroundTruth:
    ticker: str
    omega: float
    alpha: float
    beta: float
    mu: float
    unconditional_variance: float
    listing_date: dt.date
    first_date: dt.date
    last_date: dt.date
    trading_days: int
    forward_padding: int
    backward_padding: int

    def to_dict(self) -> dict:
        data = asdict(self)
        for key in ("listing_date", "first_date", "last_date"):
            data[key] = data[key].isoformat()
        return data


def simulate_garch_returns(params: GarchParams, n: int, stream: DeterministicStream) -> np.ndarray:
    """``n`` returns; the variance recursion starts at the unconditional variance."""
    z = stream.normal(n)
    omega, alpha, beta, mu = params.omega, params.alpha, params.beta, params.mu
    r = np.empty(n)
    sigma2 = params.unconditional_variance
    for t in range(n):
        e = math.sqrt(sigma2) * z[t]
        r[t] = mu + e
        sigma2 = omega + alpha * e * e + beta * sigma2
    return r


def simulate_garch_prices(params: GarchParams, n_days: int, p0: float, seed: int,
                          key: Sequence[int] = ()) -> np.ndarray:
    """``n_days`` closes starting at ``p0`` with ``P_t = P_{t-1} exp(r_t)``."""
    if n_days < 2:
        raise ValueError(f"n_days must be at least 2, got {n_days}")
    if not p0 > 0:
        raise ValueError("p0 must be positive")
    r = simulate_garch_returns(params, n_days - 1, DeterministicStream(seed, *key))
    return p0 * np.exp(np.concatenate(([0.0], np.cumsum(r))))


def trading_days(spec: SyntheticSpec, listing: np.datetime64, stream: DeterministicStream) -> np.ndarray:
    grid = np.arange(listing, to_day(spec.panel_end) + DAY, DAY)
    # 1970-01-01 was a Thursday
    weekday = (grid.astype(np.int64) + 3) % 7
    holiday = stream.bernoulli(spec.holiday_rate, grid.size)
    return grid[np.isin(weekday, spec.trading_weekdays) & ~holiday]


def synthesize_instrument(spec: SyntheticSpec, index: int) -> tuple[InstrumentSeries, GroundTruth]:
    layout = DeterministicStream(spec.seed, index, _LAYOUT)
    low, high = spec.listing_spread
    listing = to_day(spec.panel_start) + int(layout.integers(low, high, 1)[0]) * DAY
    dates = trading_days(spec, listing, layout)
    if dates.size < 2:
        raise ValueError(f"instrument {index} has fewer than 2 trading days")

    params = spec.params_for(index)
    ticker = spec.ticker(index)
    closes = simulate_garch_prices(params, int(dates.size), spec.p0, spec.seed, (index, _PRICES))
    series = InstrumentSeries.from_closes(ticker, Version.UNADJUSTED, dates, closes)

    first, last = as_date(dates[0]), as_date(dates[-1])
    lifespan = (last - first).days + 1
    truth = GroundTruth(
        ticker=ticker,
        omega=params.omega,
        alpha=params.alpha,
        beta=params.beta,
        mu=params.mu,
        unconditional_variance=params.unconditional_variance,
        listing_date=as_date(listing),
        first_date=first,
        last_date=last,
        trading_days=int(dates.size),
        forward_padding=lifespan - int(dates.size),
        backward_padding=(last - spec.panel_start).days + 1 - int(dates.size),
    )
    return series, truth


def build_universe(spec: SyntheticSpec) -> list[tuple[InstrumentSeries, GroundTruth]]:
    if spec.n_instruments == 0:
        logger.warning("synthetic spec has no instruments")
    universe = [synthesize_instrument(spec, i) for i in range(spec.n_instruments)]
    logger.info("generated %d synthetic instruments (seed %d)", len(universe), spec.seed)
    return universe


def make_universe(spec: SyntheticSpec) -> list[InstrumentSeries]:
    return [series for series, _ in build_universe(spec)]
