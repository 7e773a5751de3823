import datetime as dt

import numpy as np
import pytest

from coveragekit.core.errors import EmptySeries, InternalInvariantViolation, NonPositiveClose
from coveragekit.core.model import (
    AvailabilityCode,
    AvailabilityMatrix,
    CoverageWindow,
    InstrumentMetadata,
    InstrumentSeries,
    InstrumentType,
    OhlcvRow,
    TradingCalendar,
    Version,
    availability_code,
    coverage_window,
    ohlc_consistent,
)

from tests.helpers import series_from


def test_availability_code_bits():
    assert availability_code(False, False) is AvailabilityCode.NONE
    assert availability_code(True, False) is AvailabilityCode.ADJUSTED_ONLY
    assert availability_code(False, True) is AvailabilityCode.UNADJUSTED_ONLY
    assert availability_code(True, True) is AvailabilityCode.BOTH
    assert AvailabilityCode.BOTH.has_adjusted and AvailabilityCode.BOTH.has_unadjusted
    assert not AvailabilityCode.UNADJUSTED_ONLY.has_adjusted


@pytest.mark.parametrize("label, expected", [
    ("equity", InstrumentType.EQUITY),
    ("Mutual Fund", InstrumentType.MUTUAL_FUND),
    ("T-Bill", InstrumentType.TREASURY_BILL),
    ("", InstrumentType.OTHER),
    ("warrant", InstrumentType.OTHER),
])
def test_instrument_type_parse(label, expected):
    assert InstrumentType.parse(label) is expected


def test_calendar_union_is_sorted_and_unique():
    calendar = TradingCalendar.from_dates(
        np.array(["2020-01-06", "2020-01-02"], dtype="datetime64[D]"),
        ["2020-01-02", "2020-01-03"],
    )
    assert len(calendar) == 3
    assert calendar.panel_start == dt.date(2020, 1, 2)
    assert calendar.panel_end == dt.date(2020, 1, 6)
    assert dt.date(2020, 1, 3) in calendar
    assert dt.date(2020, 1, 4) not in calendar


def test_calendar_positions_reject_missing_dates():
    calendar = TradingCalendar.from_dates(["2020-01-02", "2020-01-03"])
    np.testing.assert_array_equal(calendar.positions(np.array(["2020-01-03"], dtype="datetime64[D]")), [1])
    with pytest.raises(InternalInvariantViolation):
        calendar.positions(np.array(["2020-01-04"], dtype="datetime64[D]"))


def test_empty_calendar_has_no_panel_start():
    with pytest.raises(EmptySeries):
        TradingCalendar.from_dates().panel_start


def test_series_rejects_unsorted_and_non_positive():
    with pytest.raises(InternalInvariantViolation):
        series_from("X", ["2020-01-03", "2020-01-02"], [1.0, 2.0])
    with pytest.raises(NonPositiveClose):
        series_from("X", ["2020-01-02", "2020-01-03"], [1.0, 0.0])
    with pytest.raises(EmptySeries):
        series_from("X", [], [])


def test_series_arrays_are_read_only(gap_series):
    with pytest.raises(ValueError):
        gap_series.close[0] = 1.0


def test_rows_round_through_series():
    rows = [OhlcvRow(dt.date(2020, 1, 2), 1.0, 2.0, 0.5, 1.5, 10.0),
            OhlcvRow(dt.date(2020, 1, 3), 1.5, 2.0, 1.0, 1.8, 12.0)]
    series = InstrumentSeries.from_rows("X", Version.ADJUSTED, rows)
    assert series.rows == tuple(rows)
    assert rows[0].ohlc_consistent


def test_ohlc_row_requires_positive_close():
    with pytest.raises(NonPositiveClose):
        OhlcvRow(dt.date(2020, 1, 2), 1.0, 1.0, 1.0, -1.0)


def test_coverage_window_counts(gap_series):
    window = coverage_window(gap_series)
    assert window == CoverageWindow(dt.date(2020, 1, 3), dt.date(2020, 1, 9), 4, 7)
    assert window.contains(dt.date(2020, 1, 8))
    assert CoverageWindow.from_dict(window.to_dict()) == window


def test_metadata_needs_a_window_and_falls_back():
    with pytest.raises(InternalInvariantViolation):
        InstrumentMetadata("X")
    window = CoverageWindow(dt.date(2020, 1, 3), dt.date(2020, 1, 9), 4, 7)
    meta = InstrumentMetadata("X", InstrumentType.BOND, coverage_adjusted=window)
    assert meta.window(Version.UNADJUSTED) is None
    assert meta.preferred_window(Version.UNADJUSTED) == window
    assert InstrumentMetadata.from_dict(meta.to_dict()) == meta


def test_availability_matrix_queries():
    calendar = TradingCalendar.from_dates(["2020-01-02", "2020-01-03", "2020-01-06"])
    matrix = AvailabilityMatrix(calendar, ("A", "B"), np.array([[3, 2, 0], [0, 1, 3]]))
    assert matrix.shape == (2, 3)
    assert matrix.code("A", dt.date(2020, 1, 2)) is AvailabilityCode.BOTH
    assert matrix.code("A", dt.date(2020, 1, 4)) is AvailabilityCode.NONE
    np.testing.assert_array_equal(matrix.available_counts(), [1, 2, 1])
    np.testing.assert_array_equal(matrix.both_counts(), [1, 0, 1])
    np.testing.assert_allclose(matrix.coverage_fraction(), [0.5, 1.0, 0.5])
    assert list(matrix.valid_dates("B", Version.ADJUSTED).astype(str)) == ["2020-01-03", "2020-01-06"]
    assert list(matrix.valid_dates("A", Version.ADJUSTED).astype(str)) == ["2020-01-02"]


def test_availability_matrix_rejects_bad_codes():
    calendar = TradingCalendar.from_dates(["2020-01-02"])
    with pytest.raises(InternalInvariantViolation):
        AvailabilityMatrix(calendar, ("A",), np.array([[4]]))
    with pytest.raises(InternalInvariantViolation):
        AvailabilityMatrix(calendar, ("A", "B"), np.array([[1]]))


def test_ohlc_consistency_is_elementwise():
    flags = ohlc_consistent(np.array([10.0, 10.0]), np.array([11.0, 9.0]),
                            np.array([9.0, 8.0]), np.array([10.5, 10.0]))
    np.testing.assert_array_equal(flags, [True, False])
    assert not OhlcvRow(dt.date(2020, 1, 2), 10.0, 9.0, 8.0, 10.0).ohlc_consistent
