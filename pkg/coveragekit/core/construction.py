"""Coverage-aware and naive calendar-day constructions of an instrument's prices."""

from __future__ import annotations

import datetime as dt
import logging
import math
from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np

from .errors import InsufficientData, PanelStartAfterListing
from .model import DAY, InstrumentSeries, as_date, to_day

logger = logging.getLogger(__name__)


class Construction(str, Enum):
    COVERAGE_AWARE = "coverage_aware"
    NAIVE_FORWARD_FILLED = "naive_forward_filled"
    NAIVE_BACKWARD_FILLED = "naive_backward_filled"

    @property
    def label(self) -> str:
        return {
            Construction.COVERAGE_AWARE: "Coverage-Aware",
            Construction.NAIVE_FORWARD_FILLED: "Naive Forward-Filled",
            Construction.NAIVE_BACKWARD_FILLED: "Naive Backward-Filled",
        }[self]


class NaiveKind(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"

    @property
    def construction(self) -> Construction:
        if self is NaiveKind.FORWARD:
            return Construction.NAIVE_FORWARD_FILLED
        return Construction.NAIVE_BACKWARD_FILLED

    @property
    def label(self) -> str:
        return "ForwardFilled" if self is NaiveKind.FORWARD else "BackwardFilled"


class Origin(IntEnum):
    OBSERVED = 0
    FORWARD_FILLED = 1
    BACKWARD_FILLED = 2


@dataclass(frozen=True, eq=False)
class PriceSeries:
    ticker: str
    construction: Construction
    dates: np.ndarray
    close: np.ndarray
    origin: np.ndarray

    def __post_init__(self):
        for name, dtype in (("dates", "datetime64[D]"), ("close", "float64"), ("origin", "int8")):
            array = np.array(getattr(self, name), dtype=dtype)
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    def __len__(self) -> int:
        return int(self.dates.size)

    @property
    def points(self) -> list[tuple[dt.date, float, Origin]]:
        return [(as_date(d), float(c), Origin(int(o)))
                for d, c, o in zip(self.dates, self.close, self.origin)]

    @property
    def fill_count(self) -> int:
        return int(np.count_nonzero(self.origin != Origin.OBSERVED))


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """Log returns keyed by the later date of each consecutive price pair."""

    ticker: str
    construction: Construction
    dates: np.ndarray
    r: np.ndarray
    padded: np.ndarray

    def __post_init__(self):
        for name, dtype in (("dates", "datetime64[D]"), ("r", "float64"), ("padded", "bool")):
            array = np.array(getattr(self, name), dtype=dtype)
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @classmethod
    def from_values(cls, values, ticker: str = "", construction: Construction = Construction.COVERAGE_AWARE,
                    start: dt.date = dt.date(2000, 1, 1)) -> "ReturnSeries":
        """Wrap a bare array of returns (consecutive dates, nothing padded)."""
        values = np.asarray(values, dtype=float)
        dates = to_day(start) + np.arange(values.size) * DAY
        return cls(ticker, construction, dates, values, np.zeros(values.size, dtype=bool))

    def __len__(self) -> int:
        return int(self.r.size)

    @property
    def points(self) -> list[tuple[dt.date, float, bool]]:
        return [(as_date(d), float(x), bool(p)) for d, x, p in zip(self.dates, self.r, self.padded)]

    @property
    def padded_count(self) -> int:
        return int(np.count_nonzero(self.padded))

    def sum_of_squares(self) -> float:
        """Exactly rounded, so independent of order and of interleaved zeros."""
        return math.fsum(float(x) * float(x) for x in self.r)

    def slice(self, start: int, stop: int | None = None) -> "ReturnSeries":
        return ReturnSeries(self.ticker, self.construction, self.dates[start:stop],
                            self.r[start:stop], self.padded[start:stop])


def coverage_aware(series: InstrumentSeries) -> PriceSeries:
    """Observed closes only, confined to [S_i, E_i]; internal gaps are kept as gaps."""
    return PriceSeries(
        ticker=series.ticker,
        construction=Construction.COVERAGE_AWARE,
        dates=series.dates,
        close=series.close,
        origin=np.full(len(series), Origin.OBSERVED, dtype=np.int8),
    )


def _calendar_grid(first: np.datetime64, last: np.datetime64) -> np.ndarray:
    return np.arange(first, last + DAY, DAY)


def naive_forward_fill(series: InstrumentSeries) -> PriceSeries:
    """Every calendar day in [S_i, E_i], carrying the last observed close forward."""
    grid = _calendar_grid(series.dates[0], series.dates[-1])
    last_seen = np.searchsorted(series.dates, grid, side="right") - 1
    observed = series.dates[last_seen] == grid
    return PriceSeries(
        ticker=series.ticker,
        construction=Construction.NAIVE_FORWARD_FILLED,
        dates=grid,
        close=series.close[last_seen],
        origin=np.where(observed, Origin.OBSERVED, Origin.FORWARD_FILLED).astype(np.int8),
    )


def naive_backward_fill(series: InstrumentSeries, panel_start: dt.date) -> PriceSeries:
    """Forward-filled series extended back to ``panel_start`` with the first close."""
    start = to_day(panel_start)
    listing = series.dates[0]
    if start > listing:
        raise PanelStartAfterListing(
            f"{series.ticker}: panel start {as_date(start)} is after listing {as_date(listing)}")
    forward = naive_forward_fill(series)
    prefix = np.arange(start, listing, DAY)
    return PriceSeries(
        ticker=series.ticker,
        construction=Construction.NAIVE_BACKWARD_FILLED,
        dates=np.concatenate([prefix, forward.dates]),
        close=np.concatenate([np.full(prefix.size, series.close[0]), forward.close]),
        origin=np.concatenate([np.full(prefix.size, Origin.BACKWARD_FILLED, dtype=np.int8),
                               forward.origin]),
    )


def log_returns(prices: PriceSeries) -> ReturnSeries:
    """Consecutive log-price differences with padding provenance.

    A return is padded when its later point is a filled price, or when its
    earlier point is backward-filled (the zero return at the listing
    boundary of a backward-filled series).
    """
    if len(prices) < 2:
        raise InsufficientData(f"{prices.ticker}: need at least 2 prices, got {len(prices)}")
    log_close = np.log(prices.close)
    later, earlier = prices.origin[1:], prices.origin[:-1]
    padded = (later != Origin.OBSERVED) | (earlier == Origin.BACKWARD_FILLED)
    return ReturnSeries(
        ticker=prices.ticker,
        construction=prices.construction,
        dates=prices.dates[1:],
        r=log_close[1:] - log_close[:-1],
        padded=padded,
    )


def build_construction(series: InstrumentSeries, construction: Construction,
                       panel_start: dt.date | None = None) -> PriceSeries:
    construction = Construction(construction)
    if construction is Construction.COVERAGE_AWARE:
        return coverage_aware(series)
    if construction is Construction.NAIVE_FORWARD_FILLED:
        return naive_forward_fill(series)
    if panel_start is None:
        raise PanelStartAfterListing(f"{series.ticker}: backward fill needs a panel start")
    return naive_backward_fill(series, panel_start)
