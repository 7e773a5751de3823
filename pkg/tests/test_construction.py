import datetime as dt
import math

import numpy as np
import pytest

from coveragekit.core.construction import (
    Construction,
    NaiveKind,
    Origin,
    ReturnSeries,
    build_construction,
    coverage_aware,
    log_returns,
    naive_backward_fill,
    naive_forward_fill,
)
from coveragekit.core.errors import InsufficientData, PanelStartAfterListing
from coveragekit.core.rng import DeterministicStream
from coveragekit.core.stats import sample_std
from coveragekit.core.distortion import ReturnSummary, analytic_naive_std

from tests.helpers import series_from


def test_coverage_aware_keeps_observed_points_only(gap_series):
    prices = coverage_aware(gap_series)
    assert len(prices) == 4
    assert prices.fill_count == 0
    returns = log_returns(prices)
    np.testing.assert_allclose(returns.r, np.diff(np.log([100.0, 102.0, 101.0, 104.0])))
    assert returns.padded_count == 0


def test_forward_fill_covers_every_calendar_day(gap_series):
    prices = naive_forward_fill(gap_series)
    assert len(prices) == 7
    np.testing.assert_array_equal(prices.close, [100, 100, 100, 102, 101, 101, 104])
    assert [o for _, _, o in prices.points].count(Origin.FORWARD_FILLED) == 3
    returns = log_returns(prices)
    assert len(returns) == 6
    assert returns.padded_count == 3
    np.testing.assert_array_equal(returns.r[returns.padded], 0.0)


def test_backward_fill_extends_to_panel_start(gap_series):
    prices = naive_backward_fill(gap_series, dt.date(2020, 1, 1))
    assert len(prices) == 9
    assert prices.origin[0] == Origin.BACKWARD_FILLED and prices.origin[1] == Origin.BACKWARD_FILLED
    assert prices.origin[2] == Origin.OBSERVED
    returns = log_returns(prices)
    assert len(returns) == 8
    # both pre-listing zeros and the zero into the listing day count as padding
    assert returns.padded_count == 5
    np.testing.assert_array_equal(returns.r[:2], 0.0)


def test_backward_fill_rejects_late_panel_start(gap_series):
    with pytest.raises(PanelStartAfterListing):
        naive_backward_fill(gap_series, dt.date(2020, 1, 4))
    with pytest.raises(PanelStartAfterListing):
        build_construction(gap_series, Construction.NAIVE_BACKWARD_FILLED)


def test_backward_fill_at_listing_equals_forward_fill(gap_series):
    backward = naive_backward_fill(gap_series, dt.date(2020, 1, 3))
    forward = naive_forward_fill(gap_series)
    np.testing.assert_array_equal(backward.close, forward.close)
    np.testing.assert_array_equal(backward.origin, forward.origin)


def test_returns_need_two_prices():
    single = series_from("ONE", ["2020-01-02"], [10.0])
    with pytest.raises(InsufficientData):
        log_returns(coverage_aware(single))
    # a single observed day still yields zero-only padding returns once back-filled
    returns = log_returns(naive_backward_fill(single, dt.date(2020, 1, 1)))
    assert len(returns) == 1 and returns.padded.all()


def test_naive_kind_maps_to_construction():
    assert NaiveKind.FORWARD.construction is Construction.NAIVE_FORWARD_FILLED
    assert NaiveKind.BACKWARD.construction is Construction.NAIVE_BACKWARD_FILLED
    assert NaiveKind("backward").label == "BackwardFilled"


def test_slice_and_from_values():
    returns = ReturnSeries.from_values([0.1, -0.2, 0.3])
    part = returns.slice(1)
    assert len(part) == 2
    assert part.dates[0] == np.datetime64("2000-01-02")


def _random_instrument(index: int):
    stream = DeterministicStream(2024, index)
    start = np.datetime64("2019-01-01") + int(stream.integers(0, 200, 1)[0])
    grid = np.arange(start, start + 400)
    keep = stream.uniform(grid.size) < 0.6
    keep[0] = keep[-1] = True
    dates = grid[keep]
    closes = 50.0 * np.exp(np.cumsum(0.02 * stream.normal(dates.size)))
    return series_from(f"R{index:03d}", dates.astype(str), closes)


@pytest.mark.parametrize("chunk", range(4))
def test_padding_only_adds_zeros(chunk):
    """Squared returns agree exactly across constructions; counts add up."""
    panel_start = dt.date(2018, 12, 1)
    for index in range(chunk * 50, (chunk + 1) * 50):
        series = _random_instrument(index)
        aware = log_returns(coverage_aware(series))
        for kind in NaiveKind:
            naive = log_returns(build_construction(series, kind.construction, panel_start))
            assert naive.sum_of_squares() == aware.sum_of_squares()
            assert len(naive) == len(aware) + naive.padded_count
            np.testing.assert_array_equal(naive.r[naive.padded], 0.0)


def test_naive_std_matches_dilution_oracle():
    panel_start = dt.date(2018, 12, 1)
    for index in range(40):
        series = _random_instrument(index)
        aware = log_returns(coverage_aware(series))
        summary = ReturnSummary.from_returns(aware.r)
        for kind in NaiveKind:
            naive = log_returns(build_construction(series, kind.construction, panel_start))
            k = len(naive) - len(aware)
            assert math.isclose(sample_std(naive.r), analytic_naive_std(summary, k), rel_tol=1e-12)
