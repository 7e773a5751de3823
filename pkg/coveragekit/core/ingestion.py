"""Per-instrument end-of-day CSV ingestion and availability matrix assembly."""

from __future__ import annotations

import datetime as dt
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Mapping, Optional, Union

import numpy as np
import pandas as pd

from .errors import ConfigError, EmptyAfterCleaning, MalformedRow, NonPositiveClose
from .model import (
    AvailabilityMatrix,
    InstrumentMetadata,
    InstrumentSeries,
    InstrumentType,
    OhlcvRow,
    TradingCalendar,
    Version,
    coverage_window,
    ohlc_consistent,
)

logger = logging.getLogger(__name__)

CANONICAL_COLUMNS = ("date", "open", "high", "low", "close", "volume")


@dataclass(frozen=True)
class CsvSchema:
    """Column names and date format of the vendor files.

    ``columns`` maps canonical names to the header used in the files; any
    canonical name not listed is looked up as-is (case-insensitively).
    """

    columns: Mapping[str, str] = field(default_factory=dict)
    date_format: str = "%Y-%m-%d"

    def source(self, canonical: str) -> str:
        return self.columns.get(canonical, canonical)


@dataclass(frozen=True)
class CorpusLayout:
    adjusted_dir: Optional[Path] = None
    unadjusted_dir: Optional[Path] = None
    metadata_path: Optional[Path] = None

    def directory(self, version: Version) -> Optional[Path]:
        return self.adjusted_dir if Version(version) is Version.ADJUSTED else self.unadjusted_dir

    def validate(self) -> None:
        usable = [
            d for d in (self.adjusted_dir, self.unadjusted_dir)
            if d is not None and Path(d).is_dir() and any(Path(d).glob("*.csv"))
        ]
        if not usable:
            raise ConfigError(
                "neither the adjusted nor the unadjusted directory exists with CSV files "
                f"(adjusted={self.adjusted_dir}, unadjusted={self.unadjusted_dir})")
        if self.metadata_path is not None and not Path(self.metadata_path).is_file():
            raise ConfigError(f"metadata file not found: {self.metadata_path}")


@dataclass(frozen=True)
class IngestWarning:
    ticker: str
    date: Optional[str]
    message: str


@dataclass
class IngestReport:
    instruments_loaded: int = 0
    rows_loaded: int = 0
    warnings: list[IngestWarning] = field(default_factory=list)
    rejects: list[tuple[str, str]] = field(default_factory=list)

    def warn(self, ticker: str, date: Optional[str], message: str) -> None:
        self.warnings.append(IngestWarning(ticker, date, message))
        logger.debug("%s %s: %s", ticker, date or "-", message)

    def reject(self, ticker: str, reason: str) -> None:
        self.rejects.append((ticker, reason))
        logger.warning("Rejected %s: %s", ticker, reason)

    def merge(self, other: "IngestReport") -> None:
        self.instruments_loaded += other.instruments_loaded
        self.rows_loaded += other.rows_loaded
        self.warnings.extend(other.warnings)
        self.rejects.extend(other.rejects)

    def to_dict(self) -> dict:
        return {
            "instruments_loaded": self.instruments_loaded,
            "rows_loaded": self.rows_loaded,
            "warnings": [
                {"ticker": w.ticker, "date": w.date, "message": w.message}
                for w in self.warnings
            ],
            "rejects": [{"ticker": t, "reason": r} for t, r in self.rejects],
        }


@dataclass(frozen=True)
class SeriesPair:
    """Adjusted and unadjusted series of one ticker; either may be absent."""

    ticker: str
    adjusted: Optional[InstrumentSeries] = None
    unadjusted: Optional[InstrumentSeries] = None

    def get(self, version: Version) -> Optional[InstrumentSeries]:
        return self.adjusted if Version(version) is Version.ADJUSTED else self.unadjusted

    def preferred(self, version: Version = Version.UNADJUSTED) -> InstrumentSeries:
        return self.get(version) or self.adjusted or self.unadjusted

    def all_dates(self) -> list[np.ndarray]:
        return [s.dates for s in (self.adjusted, self.unadjusted) if s is not None]


def _read_text(content: Union[bytes, str, BinaryIO]) -> str:
    if hasattr(content, "read"):
        content = content.read()
    if isinstance(content, bytes):
        return content.decode("utf-8-sig")
    return content


def parse_row(raw: Mapping[str, str], schema: CsvSchema = CsvSchema()) -> OhlcvRow:
    """One row of canonical column name -> raw text.

    Raises ``MalformedRow`` for an unparseable date or number and
    ``NonPositiveClose`` for a close at or below zero.
    """
    text = (raw.get("date") or "").strip()
    try:
        day = dt.datetime.strptime(text, schema.date_format).date()
    except ValueError as exc:
        raise MalformedRow(f"unparseable date {text!r}") from exc
    values = {}
    for name in ("open", "high", "low", "close", "volume"):
        if name not in raw:
            continue
        field_text = str(raw[name]).replace(",", "").strip()
        try:
            value = float(field_text)
        except ValueError as exc:
            raise MalformedRow(f"unparseable {name} {field_text!r}") from exc
        if not math.isfinite(value):
            raise MalformedRow(f"non-finite {name} {field_text!r}")
        values[name] = value
    if "close" not in values:
        raise MalformedRow("no close value")
    if values.get("volume", 0.0) < 0:
        raise MalformedRow(f"negative volume {values['volume']}")
    close = values["close"]
    if not close > 0:
        raise NonPositiveClose(f"non-positive close {close}")
    return OhlcvRow(day, values.get("open", close), values.get("high", close),
                    values.get("low", close), close, values.get("volume", 0.0))


def parse_eod_file(
    content: Union[bytes, str, BinaryIO],
    ticker: str,
    version: Version,
    schema: CsvSchema = CsvSchema(),
    report: Optional[IngestReport] = None,
) -> InstrumentSeries:
    """Parse one instrument file into a cleaned, date-sorted series.

    Bad rows are skipped and recorded on ``report``; the file is rejected
    with ``EmptyAfterCleaning`` only when no valid row remains.
    """
    report = report if report is not None else IngestReport()
    try:
        frame = pd.read_csv(io.StringIO(_read_text(content)), dtype=str,
                            keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise EmptyAfterCleaning(f"{ticker}: file is empty")

    headers = {str(c).strip().lower(): c for c in frame.columns}
    located = {}
    for canonical in CANONICAL_COLUMNS:
        source = schema.source(canonical).strip().lower()
        if source in headers:
            located[canonical] = headers[source]
    for required in ("date", "close"):
        if required not in located:
            raise EmptyAfterCleaning(f"{ticker}: missing '{schema.source(required)}' column")
    absent = [c for c in CANONICAL_COLUMNS if c not in located]
    if absent:
        report.warn(ticker, None, f"columns {absent} absent; prices mirror close, volume is 0")

    raw_dates = frame[located["date"]].str.strip()
    dates = pd.to_datetime(raw_dates, format=schema.date_format, errors="coerce")
    numbers = {}
    for name in ("open", "high", "low", "close", "volume"):
        if name in located:
            numbers[name] = pd.to_numeric(
                frame[located[name]].str.replace(",", "", regex=False).str.strip(),
                errors="coerce")
    close = numbers["close"]
    for name in ("open", "high", "low"):
        numbers.setdefault(name, close)
    numbers.setdefault("volume", pd.Series(0.0, index=frame.index))

    malformed = dates.isna()
    for name, column in numbers.items():
        malformed |= column.isna() | ~np.isfinite(column.fillna(0.0))
    malformed |= numbers["volume"] < 0
    bad = malformed | (close <= 0)
    for i in np.flatnonzero(bad.to_numpy()):
        # row-wise parse of the rejected rows names the problem
        try:
            parse_row({name: frame[column].iloc[i] for name, column in located.items()}, schema)
            reason = "malformed row"
        except (MalformedRow, NonPositiveClose) as exc:
            reason = str(exc)
        report.warn(ticker, raw_dates.iloc[i] or None, f"{reason}, row skipped")

    keep = ~bad
    table = pd.DataFrame({"date": dates[keep].dt.normalize(),
                          **{k: v[keep].astype(float) for k, v in numbers.items()}})
    if table.empty:
        raise EmptyAfterCleaning(f"{ticker}: no valid rows")

    table = table.sort_values("date", kind="mergesort")
    duplicated = table["date"].duplicated(keep="last")
    for day in table.loc[duplicated, "date"].drop_duplicates():
        report.warn(ticker, day.date().isoformat(),
                    "duplicate date, keeping the last occurrence")
    table = table.loc[~duplicated]

    consistent = ohlc_consistent(table["open"].to_numpy(), table["high"].to_numpy(),
                                 table["low"].to_numpy(), table["close"].to_numpy())
    for day in table.loc[~consistent, "date"]:
        report.warn(ticker, day.date().isoformat(), "OHLC ordering violated, row kept")

    dropped = int(bad.sum())
    if dropped:
        logger.warning("%s (%s): skipped %d bad row(s)", ticker, Version(version).value, dropped)

    return InstrumentSeries(
        ticker=ticker,
        version=version,
        dates=table["date"].to_numpy(dtype="datetime64[D]"),
        open=table["open"].to_numpy(),
        high=table["high"].to_numpy(),
        low=table["low"].to_numpy(),
        close=table["close"].to_numpy(),
        volume=table["volume"].to_numpy(),
    )


def _parse_path(path: Path, version: Version, schema: CsvSchema):
    report = IngestReport()
    ticker = path.stem
    try:
        series = parse_eod_file(path.read_bytes(), ticker, version, schema, report)
    except EmptyAfterCleaning as exc:
        report.reject(ticker, f"{Version(version).value}: {exc}")
        return ticker, None, report
    except UnicodeDecodeError as exc:
        report.reject(ticker, f"{Version(version).value}: not UTF-8 ({exc.reason})")
        return ticker, None, report
    report.rows_loaded = len(series)
    return ticker, series, report


def read_type_table(path: Path) -> dict[str, InstrumentType]:
    """Read the optional ``ticker,instrument_type`` CSV."""
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    frame.columns = [str(c).strip().lower() for c in frame.columns]
    if "ticker" not in frame.columns:
        raise ConfigError(f"{path}: metadata file needs a 'ticker' column")
    labels = frame.get("instrument_type", pd.Series([""] * len(frame), dtype=str))
    return {str(t).strip(): InstrumentType.parse(label) for t, label in zip(frame["ticker"], labels)}


def build_metadata(pairs: Mapping[str, SeriesPair],
                   types: Optional[Mapping[str, InstrumentType]] = None) -> dict[str, InstrumentMetadata]:
    types = types or {}
    return {
        ticker: InstrumentMetadata(
            ticker=ticker,
            instrument_type=types.get(ticker, InstrumentType.OTHER),
            coverage_adjusted=coverage_window(pair.adjusted) if pair.adjusted else None,
            coverage_unadjusted=coverage_window(pair.unadjusted) if pair.unadjusted else None,
        )
        for ticker, pair in sorted(pairs.items())
    }


def load_corpus(
    layout: CorpusLayout,
    schema: CsvSchema = CsvSchema(),
    workers: int = 1,
) -> tuple[dict[str, SeriesPair], dict[str, InstrumentMetadata], IngestReport]:
    """Load every instrument file of both versions.

    Returns the series pairs and metadata keyed by ticker (sorted), and the
    ingest report. Files are parsed concurrently when ``workers > 1``.
    """
    if layout.adjusted_dir is None and layout.unadjusted_dir is None:
        raise ConfigError("no input directories configured")
    layout.validate()

    jobs = []
    for version in (Version.ADJUSTED, Version.UNADJUSTED):
        directory = layout.directory(version)
        if directory is None or not Path(directory).is_dir():
            continue
        jobs.extend((path, version) for path in sorted(Path(directory).glob("*.csv")))

    logger.info("Parsing %d file(s)", len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _parse_path(job[0], job[1], schema), jobs))
    else:
        results = [_parse_path(path, version, schema) for path, version in jobs]

    report = IngestReport()
    found: dict[str, dict[Version, InstrumentSeries]] = {}
    for (_, version), (ticker, series, file_report) in zip(jobs, results):
        report.merge(file_report)
        if series is not None:
            found.setdefault(ticker, {})[version] = series

    pairs = {
        ticker: SeriesPair(ticker, by_version.get(Version.ADJUSTED),
                           by_version.get(Version.UNADJUSTED))
        for ticker, by_version in sorted(found.items())
    }
    types = read_type_table(Path(layout.metadata_path)) if layout.metadata_path else {}
    unknown = sorted(set(types) - set(pairs))
    if unknown:
        logger.warning("%d metadata ticker(s) have no price file, e.g. %s", len(unknown), unknown[0])

    metadata = build_metadata(pairs, types)
    report.instruments_loaded = len(pairs)
    logger.info("Loaded %d instrument(s), %d row(s), %d warning(s), %d reject(s)",
                report.instruments_loaded, report.rows_loaded,
                len(report.warnings), len(report.rejects))
    return pairs, metadata, report


def build_calendar(pairs: Mapping[str, SeriesPair]) -> TradingCalendar:
    """Union of every observed trading date across instruments and versions."""
    dates = [d for pair in pairs.values() for d in pair.all_dates()]
    return TradingCalendar.from_dates(*dates)


def build_availability_matrix(pairs: Mapping[str, SeriesPair],
                              calendar: TradingCalendar) -> AvailabilityMatrix:
    tickers = tuple(sorted(pairs))
    codes = np.zeros((len(tickers), len(calendar)), dtype=np.uint8)
    for i, ticker in enumerate(tickers):
        pair = pairs[ticker]
        for version in (Version.ADJUSTED, Version.UNADJUSTED):
            series = pair.get(version)
            if series is not None:
                codes[i, calendar.positions(series.dates)] |= version.bit
    return AvailabilityMatrix(calendar=calendar, tickers=tickers, codes=codes)


def type_composition(metadata: Iterable[InstrumentMetadata]) -> dict[InstrumentType, int]:
    """Instrument count per type, in enum order."""
    counts = {t: 0 for t in InstrumentType}
    for record in metadata:
        counts[record.instrument_type] += 1
    return counts


def lifespans(metadata: Iterable[InstrumentMetadata],
              version: Version = Version.UNADJUSTED) -> dict[str, int]:
    return {m.ticker: m.preferred_window(version).lifespan_days for m in metadata}


def lifespan_histogram(metadata: Iterable[InstrumentMetadata], bins: int = 30,
                       version: Version = Version.UNADJUSTED) -> tuple[np.ndarray, np.ndarray]:
    """Histogram counts and edges of instrument lifespans in calendar days."""
    values = np.fromiter(lifespans(metadata, version).values(), dtype=float)
    if values.size == 0:
        return np.zeros(bins, dtype=int), np.linspace(0.0, 1.0, bins + 1)
    return np.histogram(values, bins=bins)
