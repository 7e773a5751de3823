import datetime as dt
from pathlib import Path

import pytest

from coveragekit.core.synthetic import SyntheticSpec

from tests.helpers import series_from


@pytest.fixture
def gap_series():
    # Fri, Mon, Tue, Thu: weekend gap plus a Wednesday holiday
    return series_from("GAP", ["2020-01-03", "2020-01-06", "2020-01-07", "2020-01-09"],
                       [100.0, 102.0, 101.0, 104.0])


@pytest.fixture
def small_spec():
    return SyntheticSpec(n_instruments=4, panel_start=dt.date(2018, 1, 1),
                         panel_end=dt.date(2020, 12, 31), listing_spread=(0, 300), seed=11)


@pytest.fixture
def eod_dir(tmp_path: Path) -> Path:
    """Corpus with one clean file, one messy file and one unusable file."""
    unadjusted = tmp_path / "unadjusted"
    unadjusted.mkdir()
    (unadjusted / "AAA.csv").write_text(
        "date,open,high,low,close,volume\n"
        "2020-01-02,10,11,9,10.5,100\n"
        "2020-01-03,10.5,11,10,10.8,120\n"
        "2020-01-06,10.8,11.2,10.6,11.0,90\n")
    (unadjusted / "BBB.csv").write_text(
        "Date,Open,High,Low,Close,Volume\n"
        "2020-01-06,5,5.5,4.5,5.2,10\n"
        "2020-01-03,5,5.5,4.5,5.0,10\n"
        "not-a-date,5,5,5,5,1\n"
        "2020-01-07,5,5.5,4.5,-1,10\n"
        "2020-01-06,5,5.5,4.5,5.3,10\n")
    (unadjusted / "CCC.csv").write_text("date,open,high,low,close,volume\nbad,1,1,1,x,1\n")
    adjusted = tmp_path / "adjusted"
    adjusted.mkdir()
    (adjusted / "AAA.csv").write_text(
        "date,open,high,low,close,volume\n"
        "2020-01-03,10.5,11,10,10.8,120\n"
        "2020-01-06,10.8,11.2,10.6,11.0,90\n")
    (tmp_path / "types.csv").write_text("ticker,instrument_type\nAAA,equity\nBBB,Mutual Fund\n")
    return tmp_path
