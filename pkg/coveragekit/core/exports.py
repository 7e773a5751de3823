"""Result and corpus files: CSV with 17 significant digits, JSON with sorted keys."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from .construction import NaiveKind, Origin, PriceSeries, ReturnSeries
from .distortion import DistortionRecord, Measure
from .model import (
    AvailabilityMatrix,
    InstrumentMetadata,
    InstrumentSeries,
    InstrumentType,
    TradingCalendar,
    as_date,
)

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
RECORD_COLUMNS = ("ticker", "naive_kind", "measure", "padding_days", "sigma_aware",
                  "sigma_naive", "delta_sigma", "garch_breakdown", "padding_ratio")


def _iso(dates: np.ndarray) -> list[str]:
    return [as_date(d).isoformat() for d in dates]


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_json(data: Any, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n",
                    encoding="utf-8")
    return path


def read_json(path: Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


# Availability matrix and metadata


def write_availability_matrix(matrix: AvailabilityMatrix, path: Path) -> Path:
    """One row per trading date, one column per ticker."""
    frame = pd.DataFrame(matrix.codes.T.astype(int), columns=list(matrix.tickers))
    frame.insert(0, "date", _iso(matrix.calendar.dates))
    return write_csv(frame, path)


def read_availability_matrix(path: Path) -> AvailabilityMatrix:
    frame = pd.read_csv(path, dtype={"date": str})
    tickers = tuple(str(c) for c in frame.columns[1:])
    calendar = TradingCalendar(np.array(frame["date"].tolist(), dtype="datetime64[D]"))
    codes = frame[list(frame.columns[1:])].to_numpy(dtype=np.uint8).T.copy()
    return AvailabilityMatrix(calendar=calendar, tickers=tickers, codes=codes)


def write_metadata(metadata: Iterable[InstrumentMetadata], path: Path) -> Path:
    return write_json([m.to_dict() for m in sorted(metadata, key=lambda m: m.ticker)], path)


def read_metadata(path: Path) -> dict[str, InstrumentMetadata]:
    return {d["ticker"]: InstrumentMetadata.from_dict(d) for d in read_json(path)}


def write_coverage_counts(matrix: AvailabilityMatrix, path: Path) -> Path:
    frame = pd.DataFrame({
        "date": _iso(matrix.calendar.dates),
        "available": matrix.available_counts(),
        "both_versions": matrix.both_counts(),
        "coverage_fraction": matrix.coverage_fraction(),
    })
    return write_csv(frame, path)


def write_type_composition(counts: Mapping[InstrumentType, int], path: Path) -> Path:
    frame = pd.DataFrame({"instrument_type": [t.value for t in counts],
                          "count": list(counts.values())})
    return write_csv(frame, path)


def write_lifespans(lifespans: Mapping[str, int], histogram: tuple[np.ndarray, np.ndarray],
                    path: Path, histogram_path: Path) -> tuple[Path, Path]:
    counts, edges = histogram
    write_csv(pd.DataFrame({"ticker": list(lifespans), "lifespan_days": list(lifespans.values())}), path)
    write_csv(pd.DataFrame({"bin_left": edges[:-1], "bin_right": edges[1:], "count": counts}),
              histogram_path)
    return path, histogram_path


# Corpus files


def write_eod_csv(series: InstrumentSeries, path: Path) -> Path:
    frame = pd.DataFrame({
        "date": _iso(series.dates),
        "open": series.open,
        "high": series.high,
        "low": series.low,
        "close": series.close,
        "volume": series.volume.astype(np.int64),
    })
    return write_csv(frame, path)


def write_type_table(types: Mapping[str, InstrumentType], path: Path) -> Path:
    frame = pd.DataFrame({"ticker": list(types), "instrument_type": [t.value for t in types.values()]})
    return write_csv(frame, path)


def write_price_series(prices: PriceSeries, path: Path) -> Path:
    frame = pd.DataFrame({
        "date": _iso(prices.dates),
        "value": prices.close,
        "origin": [Origin(int(o)).name.lower() for o in prices.origin],
    })
    return write_csv(frame, path)


def write_return_series(returns: ReturnSeries, path: Path) -> Path:
    frame = pd.DataFrame({"date": _iso(returns.dates), "r": returns.r, "padded": returns.padded})
    return write_csv(frame, path)


# Analysis results


def records_frame(records: Sequence[DistortionRecord]) -> pd.DataFrame:
    rows = [{k: v for k, v in r.to_dict().items() if k in RECORD_COLUMNS} for r in records]
    return pd.DataFrame(rows, columns=list(RECORD_COLUMNS))


def write_records(records: Sequence[DistortionRecord], path: Path) -> Path:
    return write_csv(records_frame(records), path)


def read_records(path: Path) -> list[DistortionRecord]:
    frame = pd.read_csv(path, dtype={"ticker": str})
    kinds = {kind.label: kind for kind in NaiveKind}

    def optional(value) -> float | None:
        return None if pd.isna(value) else float(value)

    records = []
    for row in frame.itertuples(index=False):
        records.append(DistortionRecord(
            ticker=row.ticker,
            naive_kind=kinds[row.naive_kind],
            measure=Measure(row.measure),
            padding_days=int(row.padding_days),
            padding_ratio=float(row.padding_ratio),
            sigma_aware=optional(row.sigma_aware),
            sigma_naive=optional(row.sigma_naive),
            delta_sigma=optional(row.delta_sigma),
            garch_breakdown=bool(row.garch_breakdown),
        ))
    return records


def write_rows(rows: Sequence[Mapping[str, Any]], columns: Sequence[str], path: Path) -> Path:
    return write_csv(pd.DataFrame(list(rows), columns=list(columns)), path)
