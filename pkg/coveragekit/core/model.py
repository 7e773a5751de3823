"""Domain types shared by every coveragekit module.

Series are stored column-wise as NumPy arrays (dates as ``datetime64[D]``)
and every array is frozen after construction, so instances can be shared
read-only between workers.
"""

from __future__ import annotations

import datetime as dt
import logging
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import EmptySeries, InternalInvariantViolation, NonPositiveClose

logger = logging.getLogger(__name__)

DAY = np.timedelta64(1, "D")

ADJUSTED_BIT = 1
UNADJUSTED_BIT = 2


def to_day(value) -> np.datetime64:
    """Coerce a date-like value to ``datetime64[D]``."""
    return np.datetime64(value, "D")


def as_date(value) -> dt.date:
    """Coerce a ``datetime64`` (or date-like) value to ``datetime.date``."""
    return np.datetime64(value, "D").astype(object)


def _frozen(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


class Version(str, Enum):
    """Dataset version a series was read from."""

    ADJUSTED = "adjusted"
    UNADJUSTED = "unadjusted"

    @property
    def bit(self) -> int:
        return ADJUSTED_BIT if self is Version.ADJUSTED else UNADJUSTED_BIT


class InstrumentType(str, Enum):
    EQUITY = "Equity"
    MUTUAL_FUND = "MutualFund"
    TREASURY_BILL = "TreasuryBill"
    BOND = "Bond"
    INDEX = "Index"
    SUKUK = "Sukuk"
    OTHER = "Other"

    @classmethod
    def parse(cls, label: Optional[str]) -> "InstrumentType":
        """Map a free-form label ("mutual fund", "T-Bill", "equity") to a type."""
        if not label:
            return cls.OTHER
        key = "".join(ch for ch in str(label).lower() if ch.isalnum())
        aliases = {
            "equity": cls.EQUITY,
            "stock": cls.EQUITY,
            "mutualfund": cls.MUTUAL_FUND,
            "fund": cls.MUTUAL_FUND,
            "treasurybill": cls.TREASURY_BILL,
            "tbill": cls.TREASURY_BILL,
            "bond": cls.BOND,
            "index": cls.INDEX,
            "sukuk": cls.SUKUK,
            "other": cls.OTHER,
        }
        return aliases.get(key, cls.OTHER)


class AvailabilityCode(IntEnum):
    """Per (instrument, date) coverage code. Bit 0 is adjusted, bit 1 unadjusted."""

    NONE = 0
    ADJUSTED_ONLY = 1
    UNADJUSTED_ONLY = 2
    BOTH = 3

    @property
    def has_adjusted(self) -> bool:
        return bool(self.value & ADJUSTED_BIT)

    @property
    def has_unadjusted(self) -> bool:
        return bool(self.value & UNADJUSTED_BIT)


def availability_code(adjusted_present: bool, unadjusted_present: bool) -> AvailabilityCode:
    return AvailabilityCode(
        (ADJUSTED_BIT if adjusted_present else 0)
        | (UNADJUSTED_BIT if unadjusted_present else 0)
    )


@dataclass(frozen=True, eq=False)
class TradingCalendar:
    """Ordered set of trading dates forming the panel's date axis."""

    dates: np.ndarray

    def __post_init__(self):
        dates = _frozen(self.dates, "datetime64[D]")
        if dates.ndim != 1:
            raise InternalInvariantViolation("calendar dates must be one-dimensional")
        if dates.size and np.any(np.diff(dates) <= np.timedelta64(0, "D")):
            raise InternalInvariantViolation(
                "calendar dates must be strictly increasing")
        object.__setattr__(self, "dates", dates)

    @classmethod
    def from_dates(cls, *date_arrays: Iterable) -> "TradingCalendar":
        """Sorted union of any number of date collections."""
        parts = [np.asarray(list(d) if not isinstance(d, np.ndarray) else d,
                            dtype="datetime64[D]") for d in date_arrays]
        if not parts:
            return cls(np.array([], dtype="datetime64[D]"))
        return cls(np.unique(np.concatenate(parts)))

    @property
    def panel_start(self) -> dt.date:
        if not self.dates.size:
            raise EmptySeries("calendar is empty")
        return as_date(self.dates[0])

    @property
    def panel_end(self) -> dt.date:
        if not self.dates.size:
            raise EmptySeries("calendar is empty")
        return as_date(self.dates[-1])

    def __len__(self) -> int:
        return int(self.dates.size)

    def __contains__(self, value) -> bool:
        day = to_day(value)
        i = int(np.searchsorted(self.dates, day))
        return i < self.dates.size and self.dates[i] == day

    def positions(self, dates: np.ndarray) -> np.ndarray:
        """Column index of every date; raises if any date is absent."""
        dates = np.asarray(dates, dtype="datetime64[D]")
        idx = np.searchsorted(self.dates, dates)
        if dates.size == 0:
            return idx
        clipped = np.minimum(idx, max(self.dates.size - 1, 0))
        if self.dates.size == 0 or np.any(self.dates[clipped] != dates):
            missing = dates[(idx >= self.dates.size) | (self.dates[clipped] != dates)]
            raise InternalInvariantViolation(
                f"{missing.size} date(s) missing from calendar, first {missing[0]}")
        return idx


def ohlc_consistent(open_, high, low, close):
    """low <= min(open, close) <= max(open, close) <= high, elementwise."""
    return (low <= np.minimum(open_, close)) & (np.maximum(open_, close) <= high)


@dataclass(frozen=True, slots=True)
class OhlcvRow:
    date: dt.date
    open: float
    high: float
    low: float
    close: float
    volume: float = 0.0

    def __post_init__(self):
        if not self.close > 0:
            raise NonPositiveClose(f"close must be positive on {self.date}, got {self.close}")

    @property
    def ohlc_consistent(self) -> bool:
        return bool(ohlc_consistent(self.open, self.high, self.low, self.close))


@dataclass(frozen=True, eq=False)
class InstrumentSeries:
    """Date-ordered OHLCV observations of one instrument in one dataset version."""

    ticker: str
    version: Version
    dates: np.ndarray
    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    volume: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "version", Version(self.version))
        object.__setattr__(self, "dates", _frozen(self.dates, "datetime64[D]"))
        for name in ("open", "high", "low", "close", "volume"):
            object.__setattr__(self, name, _frozen(getattr(self, name), "float64"))

        n = self.dates.size
        if n == 0:
            raise EmptySeries(f"{self.ticker}: series has no rows")
        if any(getattr(self, name).shape != (n,)
               for name in ("open", "high", "low", "close", "volume")):
            raise InternalInvariantViolation(f"{self.ticker}: column lengths differ")
        if np.any(np.diff(self.dates) <= np.timedelta64(0, "D")):
            raise InternalInvariantViolation(
                f"{self.ticker}: rows must be strictly increasing by date")
        if not np.all(self.close > 0):
            raise NonPositiveClose(f"{self.ticker}: every close must be positive")

    @classmethod
    def from_rows(cls, ticker: str, version: Version, rows: Sequence[OhlcvRow]) -> "InstrumentSeries":
        return cls(
            ticker=ticker,
            version=version,
            dates=[to_day(r.date) for r in rows],
            open=[r.open for r in rows],
            high=[r.high for r in rows],
            low=[r.low for r in rows],
            close=[r.close for r in rows],
            volume=[r.volume for r in rows],
        )

    @classmethod
    def from_closes(cls, ticker: str, version: Version, dates, closes) -> "InstrumentSeries":
        """Close-only series; open/high/low mirror the close and volume is zero."""
        closes = np.asarray(closes, dtype="float64")
        return cls(ticker=ticker, version=version, dates=dates, open=closes,
                   high=closes, low=closes, close=closes, volume=np.zeros_like(closes))

    @property
    def rows(self) -> tuple[OhlcvRow, ...]:
        return tuple(
            OhlcvRow(as_date(d), float(o), float(h), float(l), float(c), float(v))
            for d, o, h, l, c, v in zip(self.dates, self.open, self.high,
                                        self.low, self.close, self.volume)
        )

    def __len__(self) -> int:
        return int(self.dates.size)


@dataclass(frozen=True)
class CoverageWindow:
    """First and last observed trading dates ([S_i, E_i]) with row and day counts."""

    first_date: dt.date
    last_date: dt.date
    trading_days: int
    lifespan_days: int

    def __post_init__(self):
        if self.first_date > self.last_date:
            raise InternalInvariantViolation("first_date after last_date")
        if self.trading_days > self.lifespan_days:
            raise InternalInvariantViolation("more trading days than calendar days")

    def contains(self, day: dt.date) -> bool:
        return self.first_date <= day <= self.last_date

    def to_dict(self) -> dict:
        return {
            "first_date": self.first_date.isoformat(),
            "last_date": self.last_date.isoformat(),
            "trading_days": self.trading_days,
            "lifespan_days": self.lifespan_days,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CoverageWindow":
        return cls(
            first_date=dt.date.fromisoformat(data["first_date"]),
            last_date=dt.date.fromisoformat(data["last_date"]),
            trading_days=int(data["trading_days"]),
            lifespan_days=int(data["lifespan_days"]),
        )


def coverage_window(series: InstrumentSeries) -> CoverageWindow:
    if series is None or len(series) == 0:
        raise EmptySeries("coverage window of an empty series")
    first, last = as_date(series.dates[0]), as_date(series.dates[-1])
    return CoverageWindow(
        first_date=first,
        last_date=last,
        trading_days=len(series),
        lifespan_days=(last - first).days + 1,
    )


@dataclass(frozen=True)
class InstrumentMetadata:
    ticker: str
    instrument_type: InstrumentType = InstrumentType.OTHER
    coverage_adjusted: Optional[CoverageWindow] = None
    coverage_unadjusted: Optional[CoverageWindow] = None

    def __post_init__(self):
        if self.coverage_adjusted is None and self.coverage_unadjusted is None:
            raise InternalInvariantViolation(f"{self.ticker}: no coverage window")

    def window(self, version: Version) -> Optional[CoverageWindow]:
        if Version(version) is Version.ADJUSTED:
            return self.coverage_adjusted
        return self.coverage_unadjusted

    def preferred_window(self, version: Version = Version.UNADJUSTED) -> CoverageWindow:
        """Window for ``version``, falling back to the other version."""
        return self.window(version) or self.coverage_adjusted or self.coverage_unadjusted

    def to_dict(self) -> dict:
        return {
            "ticker": self.ticker,
            "instrument_type": self.instrument_type.value,
            "adjusted": self.coverage_adjusted.to_dict() if self.coverage_adjusted else None,
            "unadjusted": self.coverage_unadjusted.to_dict() if self.coverage_unadjusted else None,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "InstrumentMetadata":
        return cls(
            ticker=data["ticker"],
            instrument_type=InstrumentType(data.get("instrument_type", "Other")),
            coverage_adjusted=CoverageWindow.from_dict(data["adjusted"]) if data.get("adjusted") else None,
            coverage_unadjusted=CoverageWindow.from_dict(data["unadjusted"]) if data.get("unadjusted") else None,
        )


@dataclass(frozen=True, eq=False)
class AvailabilityMatrix:
    """Dense (ticker x date) grid of availability codes."""

    calendar: TradingCalendar
    tickers: tuple[str, ...]
    codes: np.ndarray
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tickers", tuple(self.tickers))
        codes = _frozen(self.codes, "uint8")
        if codes.shape != (len(self.tickers), len(self.calendar)):
            raise InternalInvariantViolation(
                f"grid shape {codes.shape} does not match "
                f"{len(self.tickers)} tickers x {len(self.calendar)} dates")
        if codes.size and codes.max() > AvailabilityCode.BOTH:
            raise InternalInvariantViolation("availability codes must lie in 0..3")
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.tickers)})

    @property
    def shape(self) -> tuple[int, int]:
        return self.codes.shape

    def row(self, ticker: str) -> np.ndarray:
        return self.codes[self._index[ticker]]

    def code(self, ticker: str, day) -> AvailabilityCode:
        day = to_day(day)
        if day not in self.calendar:
            return AvailabilityCode.NONE
        col = int(self.calendar.positions(np.array([day]))[0])
        return AvailabilityCode(int(self.codes[self._index[ticker], col]))

    def valid_dates(self, ticker: str, version: Optional[Version] = None) -> np.ndarray:
        """Dates on which ``ticker`` has data (in ``version`` if given)."""
        row = self.row(ticker)
        mask = row > 0 if version is None else (row & Version(version).bit) > 0
        return self.calendar.dates[mask]

    def available_counts(self) -> np.ndarray:
        """Instruments with an observation in at least one version, per date."""
        return (self.codes > 0).sum(axis=0)

    def both_counts(self) -> np.ndarray:
        """Instruments observed in both versions, per date."""
        return (self.codes == AvailabilityCode.BOTH).sum(axis=0)

    def coverage_fraction(self) -> np.ndarray:
        if not self.tickers:
            return np.zeros(len(self.calendar))
        return self.available_counts() / len(self.tickers)
