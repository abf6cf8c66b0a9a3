"""Empirical CDF, empirical quantiles, and sample VaR/CVaR estimators.

The VaR estimate is the empirical quantile ``inf {x : F_n(x) >= alpha}``,
which for a sorted sample of size ``n`` is the order statistic with
1-based index ``ceil(n * alpha)``.  The CVaR estimate adds the scaled sum
of positive exceedances over the VaR estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RiskLevel",
    "SortedSample",
    "empirical_cdf",
    "empirical_quantile",
    "estimate_var",
    "estimate_cvar",
]


@dataclass(frozen=True)
class RiskLevel:
    """Confidence level strictly inside (0, 1); 0.95 and 0.99 are typical."""

    alpha: float

    def __post_init__(self) -> None:
        alpha = self.alpha
        if not isinstance(alpha, (int, float)) or isinstance(alpha, bool):
            raise ValueError(f"alpha must be a real number, got {alpha!r}")
        if not math.isfinite(alpha) or not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie strictly in (0, 1), got {alpha!r}")


def as_alpha(level: RiskLevel | float) -> float:
    """Normalize a risk level (RiskLevel or bare float) to a validated alpha."""
    if isinstance(level, RiskLevel):
        return level.alpha
    return RiskLevel(float(level)).alpha


class SortedSample:
    """Immutable ascending-ordered buffer of finite observations.

    The constructor accepts data in any order and sorts once; every value
    must be finite (NaN and infinities are rejected).  Instances are
    read-only and safe to share across threads.
    """

    __slots__ = ("_values",)

    def __init__(self, values) -> None:
        arr = np.array(values, dtype=np.float64, copy=True)
        if arr.ndim != 1:
            raise ValueError(f"sample must be one-dimensional, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("sample must contain at least one value")
        if not np.isfinite(arr).all():
            raise ValueError("sample values must be finite (no NaN or infinities)")
        arr.sort()
        arr.flags.writeable = False
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        """Sorted, read-only view of the observations."""
        return self._values

    @property
    def n(self) -> int:
        return self._values.size

    def __len__(self) -> int:
        return self._values.size

    def __repr__(self) -> str:
        return f"SortedSample(n={self.n}, min={self._values[0]}, max={self._values[-1]})"


def empirical_cdf(sample: SortedSample, x: float) -> float:
    """Fraction of observations <= x (right-continuous step function)."""
    x = float(x)
    if math.isnan(x):
        raise ValueError("x must not be NaN")
    count = int(np.searchsorted(sample.values, x, side="right"))
    return count / sample.n


def empirical_quantile(sample: SortedSample, p: float) -> float:
    """Smallest sample value whose empirical CDF reaches p, for p in (0, 1].

    Equals the order statistic with 1-based index ``ceil(n * p)``; p = 1
    returns the sample maximum.
    """
    p = float(p)
    if math.isnan(p) or not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    n = sample.n
    k = math.ceil(n * p)
    # Float rounding in n * p can push ceil one step off the smallest index
    # with k / n >= p; nudge so the result matches the inf definition exactly.
    if k > 1 and (k - 1) / n >= p:
        k -= 1
    elif k < n and k / n < p:
        k += 1
    k = min(max(k, 1), n)
    return float(sample.values[k - 1])


def estimate_var(sample: SortedSample, level: RiskLevel | float) -> float:
    """Sample Value-at-Risk: the empirical alpha-quantile."""
    return empirical_quantile(sample, as_alpha(level))


def estimate_cvar(sample: SortedSample, level: RiskLevel | float) -> float:
    """Sample Conditional Value-at-Risk.

    Returns ``v + sum((x_i - v)^+) / (n * (1 - alpha))`` where v is the
    sample VaR.  Never below the sample VaR.  The exceedance sum uses
    numpy's pairwise summation, keeping million-point samples accurate to
    well under 1e-10 relative error.
    """
    alpha = as_alpha(level)
    v = estimate_var(sample, alpha)
    values = sample.values
    start = int(np.searchsorted(values, v, side="right"))
    excess = float(np.sum(values[start:] - v))
    return v + excess / (sample.n * (1.0 - alpha))
