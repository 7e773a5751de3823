"""Sample standard deviation and the two location tests used on distortion samples."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import EmptySample, InsufficientData, UndefinedTest


def sample_std(values: Sequence[float]) -> float:
    """Standard deviation with the n - 1 denominator."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise InsufficientData(f"sample std needs at least 2 values, got {values.size}")
    return float(np.std(values, ddof=1))


def sign_test(deltas: Sequence[float]) -> float:
    """Exact two-sided binomial p-value for a zero median; zeros are dropped."""
    deltas = np.asarray(deltas, dtype=float)
    if deltas.size == 0:
        raise EmptySample("sign test on an empty sample")
    nonzero = deltas[deltas != 0]
    if nonzero.size == 0:
        raise UndefinedTest("sign test on an all-zero sample")
    positives = int(np.count_nonzero(nonzero > 0))
    return float(stats.binomtest(positives, int(nonzero.size), 0.5, alternative="two-sided").pvalue)


def t_test(deltas: Sequence[float]) -> tuple[float, float]:
    """One-sample t statistic against zero and its two-sided p-value."""
    deltas = np.asarray(deltas, dtype=float)
    if deltas.size < 2:
        raise UndefinedTest(f"t test needs at least 2 values, got {deltas.size}")
    if np.ptp(deltas) == 0:
        raise UndefinedTest("t test on a zero-variance sample")
    result = stats.ttest_1samp(deltas, 0.0)
    t, p = float(result.statistic), float(result.pvalue)
    if not math.isfinite(t):
        raise UndefinedTest("t statistic is not finite")
    return t, p
