import datetime as dt

import numpy as np
import pytest

from coveragekit.core.errors import ConfigError, EmptyAfterCleaning, MalformedRow, NonPositiveClose
from coveragekit.core.ingestion import (
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
    parse_eod_file,
    parse_row,
    read_type_table,
    type_composition,
)
from coveragekit.core.model import AvailabilityCode, InstrumentSeries, InstrumentType, Version, as_date
from coveragekit.core.synthetic import SyntheticSpec, build_universe


def test_parse_skips_bad_rows_and_keeps_last_duplicate(eod_dir):
    report = IngestReport()
    series = parse_eod_file((eod_dir / "unadjusted" / "BBB.csv").read_bytes(), "BBB",
                            Version.UNADJUSTED, report=report)
    assert list(series.dates.astype(str)) == ["2020-01-03", "2020-01-06"]
    np.testing.assert_array_equal(series.close, [5.0, 5.3])
    messages = [w.message for w in report.warnings]
    assert "unparseable date 'not-a-date', row skipped" in messages
    assert any("non-positive close" in m for m in messages)
    assert any("duplicate date" in m for m in messages)


def test_parse_with_renamed_columns_and_date_format():
    schema = CsvSchema(columns={"date": "Tag", "close": "Schluss"}, date_format="%d.%m.%Y")
    report = IngestReport()
    series = parse_eod_file("Tag,Schluss\n03.01.2020,1.5\n", "X", Version.ADJUSTED, schema, report)
    assert series.close[0] == 1.5
    assert series.high[0] == 1.5 and series.volume[0] == 0.0
    assert series.dates[0] == np.datetime64("2020-01-03")
    assert any("absent" in w.message for w in report.warnings)


def test_parse_flags_ohlc_violation_but_keeps_row():
    report = IngestReport()
    series = parse_eod_file("date,open,high,low,close,volume\n2020-01-02,10,9,8,10,1\n",
                            "X", Version.UNADJUSTED, report=report)
    assert len(series) == 1
    assert any("OHLC" in w.message for w in report.warnings)


def test_parse_rejects_files_without_usable_rows():
    with pytest.raises(EmptyAfterCleaning):
        parse_eod_file("date,close\nbad,x\n", "X", Version.UNADJUSTED)
    with pytest.raises(EmptyAfterCleaning):
        parse_eod_file("date,open\n2020-01-02,1\n", "X", Version.UNADJUSTED)
    with pytest.raises(EmptyAfterCleaning):
        parse_eod_file("", "X", Version.UNADJUSTED)


def test_read_type_table(eod_dir):
    types = read_type_table(eod_dir / "types.csv")
    assert types == {"AAA": InstrumentType.EQUITY, "BBB": InstrumentType.MUTUAL_FUND}


@pytest.mark.parametrize("workers", [1, 3])
def test_load_corpus(eod_dir, workers):
    layout = CorpusLayout(eod_dir / "adjusted", eod_dir / "unadjusted", eod_dir / "types.csv")
    pairs, metadata, report = load_corpus(layout, workers=workers)
    assert list(pairs) == ["AAA", "BBB"]
    assert pairs["AAA"].adjusted is not None and pairs["BBB"].adjusted is None
    assert [t for t, _ in report.rejects] == ["CCC"]
    assert report.instruments_loaded == 2
    assert report.rows_loaded == 3 + 2 + 2
    assert metadata["BBB"].instrument_type is InstrumentType.MUTUAL_FUND
    assert metadata["AAA"].coverage_adjusted.first_date == dt.date(2020, 1, 3)
    assert metadata["AAA"].coverage_unadjusted.first_date == dt.date(2020, 1, 2)


def test_load_corpus_needs_a_directory(tmp_path):
    with pytest.raises(ConfigError):
        load_corpus(CorpusLayout())
    with pytest.raises(ConfigError):
        load_corpus(CorpusLayout(unadjusted_dir=tmp_path / "missing"))


def test_availability_matrix_from_corpus(eod_dir):
    pairs, metadata, _ = load_corpus(CorpusLayout(eod_dir / "adjusted", eod_dir / "unadjusted"))
    calendar = build_calendar(pairs)
    assert list(calendar.dates.astype(str)) == ["2020-01-02", "2020-01-03", "2020-01-06"]
    matrix = build_availability_matrix(pairs, calendar)
    assert matrix.code("AAA", dt.date(2020, 1, 2)) is AvailabilityCode.UNADJUSTED_ONLY
    assert matrix.code("AAA", dt.date(2020, 1, 3)) is AvailabilityCode.BOTH
    assert matrix.code("BBB", dt.date(2020, 1, 2)) is AvailabilityCode.NONE
    # every valid unadjusted date of a ticker is one of its observed dates
    for ticker, pair in pairs.items():
        np.testing.assert_array_equal(matrix.valid_dates(ticker, Version.UNADJUSTED), pair.unadjusted.dates)


def test_composition_and_lifespans(eod_dir):
    layout = CorpusLayout(eod_dir / "adjusted", eod_dir / "unadjusted", eod_dir / "types.csv")
    _, metadata, _ = load_corpus(layout)
    counts = type_composition(metadata.values())
    assert counts[InstrumentType.EQUITY] == 1 and counts[InstrumentType.MUTUAL_FUND] == 1
    assert sum(counts.values()) == 2
    assert lifespans(metadata.values()) == {"AAA": 5, "BBB": 4}
    hist, edges = lifespan_histogram(metadata.values(), bins=4)
    assert hist.sum() == 2 and edges.size == 5


def test_parse_row():
    row = parse_row({"date": "2020-01-02", "open": "10", "high": "11", "low": "9",
                     "close": "1,010.5", "volume": "7"})
    assert row.date == dt.date(2020, 1, 2)
    assert row.close == 1010.5 and row.volume == 7.0
    assert parse_row({"date": "2020-01-02", "close": "3"}).high == 3.0
    with pytest.raises(MalformedRow):
        parse_row({"date": "02/01/2020", "close": "3"})
    with pytest.raises(MalformedRow):
        parse_row({"date": "2020-01-02", "close": "x"})
    with pytest.raises(MalformedRow):
        parse_row({"date": "2020-01-02", "close": "3", "volume": "-1"})
    with pytest.raises(NonPositiveClose):
        parse_row({"date": "2020-01-02", "close": "0"})


def _listing_only_pairs():
    spec = SyntheticSpec(n_instruments=5, panel_start=dt.date(2019, 1, 1), panel_end=dt.date(2020, 6, 30),
                         listing_spread=(0, 300), holiday_rate=0.0, seed=3)
    pairs = {}
    for series, _ in build_universe(spec):
        # the adjusted history starts ten sessions later
        adjusted = InstrumentSeries.from_closes(series.ticker, Version.ADJUSTED, series.dates[10:],
                                                series.close[10:])
        pairs[series.ticker] = SeriesPair(series.ticker, adjusted=adjusted, unadjusted=series)
    return pairs


def test_matrix_rows_start_and_end_at_the_coverage_window():
    pairs = _listing_only_pairs()
    metadata = build_metadata(pairs)
    matrix = build_availability_matrix(pairs, build_calendar(pairs))
    for ticker, meta in metadata.items():
        for version in Version:
            present = np.flatnonzero(matrix.row(ticker) & version.bit)
            window = meta.window(version)
            assert as_date(matrix.calendar.dates[present[0]]) == window.first_date
            assert as_date(matrix.calendar.dates[present[-1]]) == window.last_date
            assert present.size == window.trading_days


def test_available_counts_never_fall_without_delistings():
    pairs = _listing_only_pairs()
    matrix = build_availability_matrix(pairs, build_calendar(pairs))
    counts = matrix.available_counts()
    assert np.all(np.diff(counts) >= 0)
    assert counts[-1] == 5
