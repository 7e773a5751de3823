"""Command orchestration: ingest, simulate, analyze and report.

Per-instrument analysis runs in a worker pool when asked to; every file is
written afterwards from the calling process, in ticker order.
"""

from __future__ import annotations

import datetime as dt
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Iterator, Optional

import pandas as pd

from coveragekit import __version__
from coveragekit.shared.output_utils import clean_outputs, ensure_dir, render_and_write
from coveragekit.shared.project_utils import is_analysis_dir

from . import exports
from .arima import ForecastConfig, ForecastPath, rolling_forecast_path
from .construction import Construction, NaiveKind, PriceSeries, ReturnSeries, build_construction, log_returns
from .distortion import (
    ConstructionProfile,
    DistortionRecord,
    DistortionSummary,
    GarchOutcome,
    compare_constructions,
    construction_profile,
    five_number,
    garch_outcome,
    group_records,
    histogram_bins,
    padding_pairs,
    select_instruments,
    summarize,
)
from .errors import ConfigError, CoverageKitError, EmptySample, InsufficientData
from .fitting import FitConfig
from .ingestion import (
    CorpusLayout,
    CsvSchema,
    IngestReport,
    SeriesPair,
    build_availability_matrix,
    build_calendar,
    build_metadata,
    lifespan_histogram,
    lifespans,
    load_corpus,
    type_composition,
)
from .model import AvailabilityMatrix, InstrumentMetadata, InstrumentSeries, TradingCalendar, Version
from .synthetic import GroundTruth, SyntheticSpec, build_universe, make_universe

logger = logging.getLogger(__name__)

Tracker = Callable[[Iterable, int, str], Iterable]

INGEST_FILES = ("availability_matrix.csv", "metadata.json", "ingest_report.json",
                "coverage_counts.csv", "instrument_types.csv", "lifespans.csv",
                "lifespan_histogram.csv")
ANALYSIS_FILES = ("distortion_records.csv", "summary.json", "profiles.csv", "fits.json",
                  "run_manifest.json")
PROFILE_COLUMNS = ("ticker", "construction", "observations", "return_std", "aic", "bic", "rmse", "mae")


def _untracked(items: Iterable, total: int, description: str) -> Iterable:
    return items


# Ingest


@dataclass(frozen=True)
class IngestResult:
    pairs: dict[str, SeriesPair]
    metadata: dict[str, InstrumentMetadata]
    report: IngestReport
    calendar: TradingCalendar
    matrix: AvailabilityMatrix


def run_ingest(layout: CorpusLayout, schema: CsvSchema = CsvSchema(), workers: int = 1) -> IngestResult:
    pairs, metadata, report = load_corpus(layout, schema, workers)
    if not pairs:
        raise InsufficientData("every instrument file was rejected")
    calendar = build_calendar(pairs)
    matrix = build_availability_matrix(pairs, calendar)
    logger.info("availability matrix: %d instruments x %d trading days", *matrix.shape)
    return IngestResult(pairs, metadata, report, calendar, matrix)


def write_ingest_outputs(result: IngestResult, out_dir: Path, bins: int = 30) -> list[Path]:
    clean_outputs(out_dir, INGEST_FILES)
    metadata = list(result.metadata.values())
    written = [
        exports.write_availability_matrix(result.matrix, out_dir / "availability_matrix.csv"),
        exports.write_metadata(metadata, out_dir / "metadata.json"),
        exports.write_json(result.report.to_dict(), out_dir / "ingest_report.json"),
        exports.write_coverage_counts(result.matrix, out_dir / "coverage_counts.csv"),
        exports.write_type_composition(type_composition(metadata), out_dir / "instrument_types.csv"),
    ]
    written.extend(exports.write_lifespans(lifespans(metadata), lifespan_histogram(metadata, bins),
                                           out_dir / "lifespans.csv", out_dir / "lifespan_histogram.csv"))
    return written


# Simulate


def run_simulate(spec: SyntheticSpec, out_dir: Path) -> list[GroundTruth]:
    """Write a synthetic corpus in the ingestion layout plus its ground truth."""
    universe = build_universe(spec)
    for version in Version:
        clean_outputs(out_dir / version.value, (), ("*.csv",))
        ensure_dir(out_dir / version.value)
    for series, _ in universe:
        for version in Version:
            exports.write_eod_csv(series, out_dir / version.value / f"{series.ticker}.csv")
    exports.write_type_table({series.ticker: spec.instrument_type for series, _ in universe},
                             out_dir / "metadata.csv")
    truths = [truth for _, truth in universe]
    exports.write_json({
        "seed": spec.seed,
        "panel_start": spec.panel_start.isoformat(),
        "panel_end": spec.panel_end.isoformat(),
        "trading_weekdays": list(spec.trading_weekdays),
        "holiday_rate": spec.holiday_rate,
        "instruments": [t.to_dict() for t in truths],
    }, out_dir / "ground_truth.json")
    return truths


# Analyze


@dataclass(frozen=True)
class InstrumentTask:
    series: InstrumentSeries
    panel_start: dt.date
    naive_kinds: tuple[NaiveKind, ...]
    fit: FitConfig
    forecast: ForecastConfig
    profiles: bool


@dataclass(frozen=True)
class InstrumentResult:
    ticker: str
    records: tuple[DistortionRecord, ...] = ()
    profiles: tuple[ConstructionProfile, ...] = ()
    fits: tuple[dict, ...] = ()
    error: Optional[str] = None


def _garch_record(returns: ReturnSeries, outcome: GarchOutcome) -> dict:
    return {"ticker": returns.ticker, "construction": returns.construction.label, "model": "GARCH(1,1)",
            "unconditional_variance": outcome.variance, **outcome.fit.to_dict()}


def _arima_record(profile: ConstructionProfile) -> Optional[dict]:
    if profile.arima is None:
        return None
    return {"ticker": profile.ticker, "construction": profile.construction.label,
            "model": "ARIMA(1,0,1)", **profile.arima.to_dict()}


def analyze_task(task: InstrumentTask) -> InstrumentResult:
    """All records, profiles and fit records of one instrument; failures are reported, not raised."""
    ticker = task.series.ticker
    try:
        constructions = [(Construction.COVERAGE_AWARE, None)] + [(k.construction, k) for k in task.naive_kinds]
        built = {}
        for construction, _ in constructions:
            prices = build_construction(task.series, construction, task.panel_start)
            returns = log_returns(prices)
            built[construction] = (prices, returns, garch_outcome(returns, task.fit))

        _, aware, aware_garch = built[Construction.COVERAGE_AWARE]
        records: list[DistortionRecord] = []
        for construction, kind in constructions[1:]:
            _, naive, naive_garch = built[construction]
            records.extend(compare_constructions(aware, naive, kind, aware_garch, naive_garch))

        fits = [_garch_record(returns, outcome) for _, returns, outcome in built.values()]
        profiles = []
        if task.profiles:
            for prices, returns, _ in built.values():
                profile = construction_profile(prices, returns, task.fit, task.forecast)
                profiles.append(profile)
                arima = _arima_record(profile)
                if arima is not None:
                    fits.append(arima)
    except CoverageKitError as exc:
        logger.warning("%s skipped: %s", ticker, exc)
        return InstrumentResult(ticker, error=f"{type(exc).__name__}: {exc}")
    return InstrumentResult(ticker, tuple(records), tuple(profiles), tuple(fits))


@dataclass(frozen=True)
class Illustration:
    ticker: str
    prices: dict[Construction, PriceSeries]
    returns: dict[Construction, ReturnSeries]
    forecasts: dict[Construction, ForecastPath]


@dataclass
class AnalysisResult:
    panel_start: dt.date
    selected: list[str]
    records: list[DistortionRecord] = field(default_factory=list)
    summaries: list[DistortionSummary] = field(default_factory=list)
    profiles: list[ConstructionProfile] = field(default_factory=list)
    fits: list[dict] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)
    illustration: Optional[Illustration] = None


def load_analysis_universe(config) -> tuple[dict[str, InstrumentSeries], dict[str, InstrumentMetadata], dt.date]:
    """Series (in the configured version) and metadata from the corpus or the synthetic spec."""
    version = config.analysis.version
    if config.synthetic is not None:
        pairs = {s.ticker: SeriesPair(s.ticker, unadjusted=s) for s in make_universe(config.synthetic)}
    else:
        options = config.ingest
        pairs, _, _ = load_corpus(options.layout, options.schema, options.workers)
    if not pairs:
        raise EmptySample("no instruments to analyze")
    metadata = build_metadata(pairs)
    panel_start = build_calendar(pairs).panel_start
    series = {ticker: pair.preferred(version) for ticker, pair in pairs.items()}
    return series, metadata, panel_start


def _illustrate(series: InstrumentSeries, task: InstrumentTask) -> Illustration:
    prices, returns, forecasts = {}, {}, {}
    for construction in [Construction.COVERAGE_AWARE] + [k.construction for k in task.naive_kinds]:
        p = build_construction(series, construction, task.panel_start)
        r = log_returns(p)
        prices[construction], returns[construction] = p, r
        try:
            forecasts[construction] = rolling_forecast_path(
                r, task.forecast.split_fraction, task.fit, task.forecast.min_test)
        except InsufficientData as exc:
            logger.warning("%s %s: no forecast path (%s)", series.ticker, construction.value, exc)
    return Illustration(series.ticker, prices, returns, forecasts)


def run_analysis(config, track: Tracker = _untracked) -> AnalysisResult:
    series, metadata, panel_start = load_analysis_universe(config)
    selected = select_instruments(metadata.values(), config.selection, panel_start, config.analysis.version)
    if not selected:
        raise EmptySample("no instrument passes the selection criteria")

    tasks = [InstrumentTask(series[t], panel_start, config.analysis.naive_kinds, config.fit,
                            config.forecast, config.analysis.profiles) for t in selected]
    result = AnalysisResult(panel_start=panel_start, selected=selected)
    workers = min(config.analysis.workers, len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes: Iterator[InstrumentResult] = pool.map(analyze_task, tasks)
            _collect(result, track(outcomes, len(tasks), "Analyzing instruments"))
    else:
        _collect(result, track(map(analyze_task, tasks), len(tasks), "Analyzing instruments"))

    if not result.records:
        raise EmptySample("every selected instrument failed")
    for (measure, kind), group in group_records(result.records).items():
        try:
            result.summaries.append(summarize(group))
        except EmptySample as exc:
            logger.warning("no %s summary for %s: %s", measure.value, kind.label, exc)

    ticker = config.analysis.illustrate
    if ticker:
        if ticker not in series:
            raise ConfigError(f"illustrate: unknown ticker {ticker!r}")
        result.illustration = _illustrate(series[ticker], replace(tasks[0], series=series[ticker]))
    logger.info("analyzed %d instruments, %d skipped", len(selected) - len(result.skipped),
                len(result.skipped))
    return result


def _collect(result: AnalysisResult, outcomes: Iterable[InstrumentResult]) -> None:
    for outcome in outcomes:
        if outcome.error is not None:
            result.skipped.append((outcome.ticker, outcome.error))
            continue
        result.records.extend(outcome.records)
        result.profiles.extend(outcome.profiles)
        result.fits.extend(outcome.fits)


def _clean_float(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_analysis_outputs(result: AnalysisResult, config, out_dir: Path) -> list[Path]:
    clean_outputs(out_dir, ANALYSIS_FILES)
    figures = ensure_dir(out_dir / "figures")
    clean_outputs(figures, (), ("*.csv",))
    groups = group_records(result.records)
    written = [exports.write_records(result.records, out_dir / "distortion_records.csv")]

    written.append(exports.write_json({
        "panel_start": result.panel_start.isoformat(),
        "selected": len(result.selected),
        "skipped": [{"ticker": t, "reason": r} for t, r in result.skipped],
        "summaries": [{k: _clean_float(v) for k, v in s.to_dict().items()} for s in result.summaries],
    }, out_dir / "summary.json"))
    written.append(exports.write_rows([p.to_dict() for p in result.profiles], PROFILE_COLUMNS,
                                      out_dir / "profiles.csv"))
    written.append(exports.write_json(
        [{k: _clean_float(v) for k, v in fit.items()} for fit in result.fits], out_dir / "fits.json"))

    histogram_rows, boxplot_rows, padding_rows = [], [], []
    for (measure, kind), group in groups.items():
        labels = {"measure": measure.value, "naive_kind": kind.label}
        histogram_rows += [{**labels, "bin_left": lo, "bin_right": hi, "count": n}
                           for lo, hi, n in histogram_bins(group, config.analysis.histogram_bins)]
        try:
            boxplot_rows.append({**labels, **five_number(group)})
        except EmptySample:
            pass
        padding_rows += [{**labels, "ticker": t, "padding_days": d, "padding_ratio": ratio, "delta_sigma": delta}
                         for t, d, ratio, delta in padding_pairs(group)]
    written.append(exports.write_rows(histogram_rows, ("measure", "naive_kind", "bin_left", "bin_right", "count"),
                                      figures / "v1_histogram.csv"))
    written.append(exports.write_rows(boxplot_rows, ("measure", "naive_kind", "min", "q1", "median", "q3", "max"),
                                      figures / "v2_boxplot.csv"))
    written.append(exports.write_rows(padding_rows, ("measure", "naive_kind", "ticker", "padding_days",
                                                     "padding_ratio", "delta_sigma"),
                                      figures / "v4_padding.csv"))

    if result.illustration is not None:
        written.extend(_write_illustration(result.illustration, figures))

    written.append(exports.write_json({
        "package": "coveragekit",
        "version": __version__,
        "config": config.to_dict(),
        "files": sorted(str(p.relative_to(out_dir)) for p in written),
    }, out_dir / "run_manifest.json"))
    return written


def _write_illustration(illustration: Illustration, figures: Path) -> list[Path]:
    written = []
    ticker = illustration.ticker
    for construction, prices in illustration.prices.items():
        written.append(exports.write_price_series(prices, figures / f"prices_{ticker}_{construction.value}.csv"))
        written.append(exports.write_return_series(illustration.returns[construction],
                                                   figures / f"returns_{ticker}_{construction.value}.csv"))
    rows = []
    for construction, path in illustration.forecasts.items():
        rows += [{"construction": construction.label, "date": d.isoformat(), "actual": a, "forecast": f}
                 for d, a, f in path.rows]
    written.append(exports.write_rows(rows, ("construction", "date", "actual", "forecast"),
                                      figures / f"forecast_{ticker}.csv"))
    return written


# Report


@dataclass(frozen=True)
class ReportInputs:
    summaries: list[dict]
    profiles: pd.DataFrame
    records: list[DistortionRecord]
    selected: int
    skipped: list[dict]


def load_report_inputs(analysis_dir: Path) -> ReportInputs:
    summary_path = analysis_dir / "summary.json"
    records_path = analysis_dir / "distortion_records.csv"
    if not is_analysis_dir(analysis_dir):
        raise ConfigError(f"{analysis_dir} holds no analysis outputs (summary.json, distortion_records.csv)")
    summary = exports.read_json(summary_path)
    profiles_path = analysis_dir / "profiles.csv"
    profiles = pd.read_csv(profiles_path, dtype={"ticker": str}) if profiles_path.is_file() \
        else pd.DataFrame(columns=list(PROFILE_COLUMNS))
    return ReportInputs(
        summaries=summary.get("summaries", []),
        profiles=profiles.astype(object).where(profiles.notna(), None),
        records=exports.read_records(records_path),
        selected=int(summary.get("selected", 0)),
        skipped=summary.get("skipped", []),
    )


def report_context(inputs: ReportInputs) -> dict:
    profile_rows = inputs.profiles.to_dict(orient="records")
    by_ticker: dict[str, list[dict]] = {}
    for row in profile_rows:
        by_ticker.setdefault(str(row["ticker"]), []).append(row)
    breakdowns = sorted({r.ticker for r in inputs.records if r.garch_breakdown})
    return {
        "selected": inputs.selected,
        "skipped": inputs.skipped,
        "summaries": inputs.summaries,
        "profiles": by_ticker,
        "breakdowns": breakdowns,
    }


def render_report(analysis_dir: Path, out_path: Path, inputs: Optional[ReportInputs] = None) -> Path:
    """Markdown report over an analysis output directory."""
    inputs = inputs or load_report_inputs(analysis_dir)
    return render_and_write("report.md.jinja", out_path, report_context(inputs))
