"""Run configuration: one TOML file plus command-line overrides.

Tables: [input] [ingest] [synthetic] [selection] [econometrics] [analysis]
[output]. See Docs/configuration.md for every key.
"""

from __future__ import annotations

import copy
import datetime as dt
import logging
import tomllib
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping, MutableMapping, Optional

from coveragekit.core.arima import ForecastConfig
from coveragekit.core.construction import NaiveKind
from coveragekit.core.distortion import SelectionCriteria
from coveragekit.core.errors import ConfigError
from coveragekit.core.fitting import FitConfig
from coveragekit.core.ingestion import CorpusLayout, CsvSchema
from coveragekit.core.model import InstrumentType, Version
from coveragekit.core.synthetic import GarchParams, SyntheticSpec

logger = logging.getLogger(__name__)

TABLES = ("input", "ingest", "synthetic", "selection", "econometrics", "analysis", "output")


@dataclass(frozen=True)
class IngestOptions:
    adjusted_dir: Optional[Path] = None
    unadjusted_dir: Optional[Path] = None
    metadata_path: Optional[Path] = None
    columns: Mapping[str, str] = field(default_factory=dict)
    date_format: str = "%Y-%m-%d"
    workers: int = 1

    @property
    def layout(self) -> CorpusLayout:
        return CorpusLayout(self.adjusted_dir, self.unadjusted_dir, self.metadata_path)

    @property
    def schema(self) -> CsvSchema:
        return CsvSchema(columns=dict(self.columns), date_format=self.date_format)


@dataclass(frozen=True)
class AnalysisOptions:
    naive_kinds: tuple[NaiveKind, ...] = (NaiveKind.FORWARD, NaiveKind.BACKWARD)
    version: Version = Version.UNADJUSTED
    workers: int = 1
    illustrate: Optional[str] = None
    profiles: bool = True
    histogram_bins: int = 20

    def __post_init__(self):
        if not self.naive_kinds:
            raise ValueError("at least one naive kind is required")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs; exactly one input source is set."""

    ingest: Optional[IngestOptions] = None
    synthetic: Optional[SyntheticSpec] = None
    selection: SelectionCriteria = SelectionCriteria()
    fit: FitConfig = FitConfig()
    forecast: ForecastConfig = ForecastConfig()
    analysis: AnalysisOptions = AnalysisOptions()
    output_dir: Path = Path("coveragekit-out")

    def __post_init__(self):
        if (self.ingest is None) == (self.synthetic is None):
            raise ConfigError("configure exactly one input source: [input] directories or [synthetic]")

    def to_dict(self) -> dict:
        """Plain echo of the configuration for the run manifest."""
        def plain(value: Any) -> Any:
            if hasattr(value, "__dataclass_fields__"):
                return {f.name: plain(getattr(value, f.name)) for f in fields(value)}
            if isinstance(value, (list, tuple)):
                return [plain(v) for v in value]
            if isinstance(value, Mapping):
                return {str(k): plain(v) for k, v in value.items()}
            if isinstance(value, (Path, dt.date)):
                return str(value)
            if hasattr(value, "value"):
                return value.value
            return value
        return plain(self)


def load_config_file(path: Optional[Path]) -> dict:
    """Parsed TOML with relative paths resolved against the file's directory."""
    if path is None:
        return {}
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    unknown = sorted(set(raw) - set(TABLES))
    if unknown:
        raise ConfigError(f"{path}: unknown table(s) {', '.join(unknown)}")
    base = path.parent
    for table, key in (("input", "adjusted_dir"), ("input", "unadjusted_dir"),
                       ("input", "metadata"), ("output", "dir")):
        value = raw.get(table, {}).get(key)
        if value and not Path(value).is_absolute():
            raw[table][key] = str(base / value)
    logger.debug("loaded config %s", path)
    return raw


def apply_overrides(raw: Mapping, overrides: Mapping[str, Any]) -> dict:
    """Copy of ``raw`` with dotted keys (``"analysis.workers"``) set; ``None`` values are skipped."""
    merged: dict = copy.deepcopy(dict(raw))
    for dotted, value in overrides.items():
        if value is None:
            continue
        table, key = dotted.split(".", 1)
        target: MutableMapping = merged.setdefault(table, {})
        target[key] = value
    return merged


def _take(table: Mapping, allowed: set[str], name: str) -> dict:
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise ConfigError(f"[{name}] unknown key(s): {', '.join(unknown)}")
    return dict(table)


def _date(value: Any, key: str) -> dt.date:
    if isinstance(value, dt.datetime):
        return value.date()
    if isinstance(value, dt.date):
        return value
    try:
        return dt.date.fromisoformat(str(value))
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a date, got {value!r}") from exc


def _path(value: Any) -> Optional[Path]:
    return Path(value).expanduser() if value else None


def _ingest(raw: Mapping) -> Optional[IngestOptions]:
    source = _take(raw.get("input", {}), {"adjusted_dir", "unadjusted_dir", "metadata"}, "input")
    options = _take(raw.get("ingest", {}), {"columns", "date_format", "workers"}, "ingest")
    if not source.get("adjusted_dir") and not source.get("unadjusted_dir"):
        return None
    return IngestOptions(
        adjusted_dir=_path(source.get("adjusted_dir")),
        unadjusted_dir=_path(source.get("unadjusted_dir")),
        metadata_path=_path(source.get("metadata")),
        columns=dict(options.get("columns", {})),
        date_format=str(options.get("date_format", "%Y-%m-%d")),
        workers=int(options.get("workers", 1)),
    )


SYNTHETIC_KEYS = {"n_instruments", "panel_start", "panel_end", "listing_spread", "trading_weekdays",
                  "holiday_rate", "p0", "seed", "omega", "alpha", "beta", "mu", "instrument_type"}


def _synthetic(raw: Mapping) -> Optional[SyntheticSpec]:
    if "synthetic" not in raw:
        return None
    table = _take(raw["synthetic"], SYNTHETIC_KEYS, "synthetic")
    defaults = SyntheticSpec()
    base = defaults.garch_params
    params = GarchParams(
        omega=float(table.get("omega", base.omega)),
        alpha=float(table.get("alpha", base.alpha)),
        beta=float(table.get("beta", base.beta)),
        mu=float(table.get("mu", base.mu)),
    )
    return SyntheticSpec(
        n_instruments=int(table.get("n_instruments", defaults.n_instruments)),
        panel_start=_date(table.get("panel_start", defaults.panel_start), "synthetic.panel_start"),
        panel_end=_date(table.get("panel_end", defaults.panel_end), "synthetic.panel_end"),
        listing_spread=tuple(int(x) for x in table.get("listing_spread", defaults.listing_spread)),
        trading_weekdays=tuple(int(x) for x in table.get("trading_weekdays", defaults.trading_weekdays)),
        holiday_rate=float(table.get("holiday_rate", defaults.holiday_rate)),
        garch_params=params,
        p0=float(table.get("p0", defaults.p0)),
        seed=int(table.get("seed", defaults.seed)),
        instrument_type=InstrumentType.parse(table.get("instrument_type", defaults.instrument_type.value)),
    )


def _selection(raw: Mapping) -> SelectionCriteria:
    table = _take(raw.get("selection", {}), {"listed_after", "min_trading_days"}, "selection")
    listed_after = table.get("listed_after", SelectionCriteria.listed_after)
    if isinstance(listed_after, str) and listed_after.strip().lower() in ("", "none", "panel_start"):
        listed_after = None
    elif listed_after is not None:
        listed_after = _date(listed_after, "selection.listed_after")
    return SelectionCriteria(
        listed_after=listed_after,
        min_trading_days=int(table.get("min_trading_days", SelectionCriteria.min_trading_days)),
    )


def _econometrics(raw: Mapping) -> tuple[FitConfig, ForecastConfig]:
    fit_keys = {f.name for f in fields(FitConfig)}
    forecast_keys = {f.name for f in fields(ForecastConfig)}
    table = _take(raw.get("econometrics", {}), fit_keys | forecast_keys, "econometrics")
    fit = FitConfig(**{k: v for k, v in table.items() if k in fit_keys})
    forecast = ForecastConfig(**{k: v for k, v in table.items() if k in forecast_keys})
    return fit, forecast


def _analysis(raw: Mapping) -> AnalysisOptions:
    table = _take(raw.get("analysis", {}),
                  {"naive_kinds", "version", "workers", "illustrate", "profiles", "histogram_bins"},
                  "analysis")
    defaults = AnalysisOptions()
    kinds = table.get("naive_kinds", [k.value for k in defaults.naive_kinds])
    if isinstance(kinds, str):
        kinds = [kinds]
    return AnalysisOptions(
        naive_kinds=tuple(dict.fromkeys(NaiveKind(str(k).lower()) for k in kinds)),
        version=Version(str(table.get("version", defaults.version.value)).lower()),
        workers=int(table.get("workers", defaults.workers)),
        illustrate=table.get("illustrate") or None,
        profiles=bool(table.get("profiles", defaults.profiles)),
        histogram_bins=int(table.get("histogram_bins", defaults.histogram_bins)),
    )


def build_run_config(raw: Mapping) -> RunConfig:
    try:
        fit, forecast = _econometrics(raw)
        output = _take(raw.get("output", {}), {"dir"}, "output")
        return RunConfig(
            ingest=_ingest(raw),
            synthetic=_synthetic(raw),
            selection=_selection(raw),
            fit=fit,
            forecast=forecast,
            analysis=_analysis(raw),
            output_dir=Path(output.get("dir", "coveragekit-out")).expanduser(),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_run_config(path: Optional[Path] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    return build_run_config(apply_overrides(load_config_file(path), overrides or {}))
