import numpy as np

from coveragekit.core.model import InstrumentSeries, Version


def series_from(ticker, days, closes, version=Version.UNADJUSTED):
    """Close-only series from ISO date strings."""
    return InstrumentSeries.from_closes(ticker, version, np.array(days, dtype="datetime64[D]"), closes)
