"""Paired one-sided Wilcoxon signed-rank test."""
from __future__ import annotations

import math

import numpy as np
from scipy.stats import norm, rankdata

from .errors import AllZeroDifferences, SizeMismatch, TooFewPairs

EXACT_MAX = 25


def _exact_upper_tail(ranks: np.ndarray, w_plus: float) -> float:
    # Ranks may be half-integers under ties; doubling makes them integral.
    r2 = np.rint(2 * ranks).astype(np.int64)
    total = int(r2.sum())
    counts = np.zeros(total + 1)
    counts[0] = 1.0
    for r in r2:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    target = int(np.rint(2 * w_plus))
    return float(counts[target:].sum() / 2.0 ** len(r2))


def signed_rank_statistic(x, y):
    """Return ``(W+, ranks)`` over the nonzero differences ``x - y``."""
    d = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    d = d[d != 0]
    ranks = rankdata(np.abs(d))
    return float(ranks[d > 0].sum()), ranks


def wilcoxon_signed_rank(x, y) -> float:
    """One-sided p-value for ``median(x - y) > 0``.

    Zero differences are dropped and tied magnitudes get average ranks.
    Up to 25 nonzero differences the null distribution of ``W+`` is
    enumerated exactly over all sign patterns; beyond that a normal
    approximation with tie-corrected variance and continuity correction
    is used.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.size != y.size:
        raise SizeMismatch(f"paired samples have lengths {x.size} and {y.size}")
    if x.size < 5:
        raise TooFewPairs(f"need at least 5 pairs, got {x.size}")
    w_plus, ranks = signed_rank_statistic(x, y)
    m = ranks.size
    if m == 0:
        raise AllZeroDifferences("all paired differences are zero")
    if m <= EXACT_MAX:
        return _exact_upper_tail(ranks, w_plus)
    mean = m * (m + 1) / 4.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    var = m * (m + 1) * (2 * m + 1) / 24.0 - float(np.sum(tie_counts ** 3 - tie_counts)) / 48.0
    z = (w_plus - mean - 0.5) / math.sqrt(var)
    return float(norm.sf(z))
