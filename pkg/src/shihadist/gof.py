"""Goodness-of-fit statistics and diagnostic plot coordinates.

The K-S and A-D p-values treat the fitted parameters as known. For the
Kolmogorov distance the exact finite-sample law is used when ``n < 100``
and the sample has no ties; otherwise the limiting law at ``sqrt(n) D``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .competitors import ModelSpec, model_cdf, model_quantile
from .errors import ConvergenceError, DataError, DomainError
from .estimation import information_criteria
from .numerics import anderson_darling_sf, kolmogorov_sf

__all__ = [
    "GofReport",
    "SummaryStats",
    "ks_statistic",
    "ks_test",
    "ad_statistic",
    "ad_test",
    "gof_report",
    "information_criteria",
    "ttt_points",
    "qq_pp_points",
    "summary_stats",
]

_CLAMP = 1e-12


@dataclass(frozen=True)
class GofReport:
    ks_stat: float
    ks_p: float
    ad_stat: float
    ad_p: float
    clamped: bool = False

    def __post_init__(self):
        for name in ("ks_stat", "ks_p", "ad_p"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
        if not self.ad_stat >= 0.0:
            raise DomainError(f"ad_stat must be nonnegative, got {self.ad_stat}")


@dataclass(frozen=True)
class SummaryStats:
    """Table-style sample summary.

    ``kurtosis`` is the plain moment ratio ``m4 / m2**2``; ``skewness`` is
    ``m3 / m2**1.5`` with ``m_j`` the central sample moments (divisor ``n``).
    """

    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float
    variance: float
    skewness: float
    kurtosis: float


def _sorted_data(data) -> np.ndarray:
    y = np.sort(np.asarray(data, dtype=float).ravel())
    if y.size == 0:
        raise DataError("data must be nonempty")
    if np.any(~np.isfinite(y)) or np.any(y <= 0):
        raise DataError("observations must be finite and strictly positive")
    return y


def ks_statistic(u_sorted: np.ndarray) -> float:
    """Kolmogorov distance of sorted probability-integral values from uniform."""
    n = u_sorted.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u_sorted), np.max(u_sorted - (i - 1) / n)))


def ks_test(m: ModelSpec, data) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov test of ``data`` against model ``m``.

    Returns ``(D, p)``. Ties in the data switch the p-value to the
    limiting distribution, since the exact law assumes a continuous sample.
    """
    y = _sorted_data(data)
    d = ks_statistic(np.asarray(model_cdf(m, y), dtype=float))
    has_ties = bool(np.any(np.diff(y) == 0))
    return d, kolmogorov_sf(d, y.size, exact=(y.size < 100 and not has_ties))


def ad_statistic(u_sorted: np.ndarray) -> float:
    n = u_sorted.size
    i = np.arange(1, n + 1)
    s = np.sum((2 * i - 1) * (np.log(u_sorted) + np.log1p(-u_sorted[::-1])))
    return float(max(-n - s / n, 0.0))


def ad_test(m: ModelSpec, data, return_clamped: bool = False):
    """Anderson-Darling test; fitted cdf values are clamped to ``[1e-12, 1 - 1e-12]``.

    Returns ``(A2, p)``, plus a flag telling whether any value was clamped
    when ``return_clamped`` is set.
    """
    y = _sorted_data(data)
    u = np.asarray(model_cdf(m, y), dtype=float)
    clamped = bool(np.any((u < _CLAMP) | (u > 1.0 - _CLAMP)))
    a2 = ad_statistic(np.clip(u, _CLAMP, 1.0 - _CLAMP))
    p = anderson_darling_sf(a2, y.size)
    return (a2, p, clamped) if return_clamped else (a2, p)


def gof_report(m: ModelSpec, data) -> GofReport:
    d, pd = ks_test(m, data)
    a2, pa, clamped = ad_test(m, data, return_clamped=True)
    return GofReport(ks_stat=d, ks_p=pd, ad_stat=a2, ad_p=pa, clamped=clamped)


def ttt_points(data) -> np.ndarray:
    """Scaled total-time-on-test curve, shape ``(n + 1, 2)`` starting at ``(0, 0)``.

    Row ``i`` is ``(i/n, (sum_{j<=i} y_(j) + (n - i) y_(i)) / sum_j y_j)``.
    A concave curve points to an increasing hazard, convex to decreasing.
    """
    y = _sorted_data(data)
    n = y.size
    i = np.arange(1, n + 1)
    t = (np.cumsum(y) + (n - i) * y) / y.sum()
    return np.vstack([[0.0, 0.0], np.column_stack([i / n, t])])


def qq_pp_points(m: ModelSpec, data):
    """QQ and PP coordinates at plotting positions ``(i - 0.5)/n``.

    Returns ``(qq, pp, failed)``: ``qq`` rows are (model quantile, order
    statistic), ``pp`` rows (plotting position, fitted cdf). A quantile the
    solver cannot reach is stored as NaN and its index listed in ``failed``.
    """
    y = _sorted_data(data)
    n = y.size
    pos = (np.arange(1, n + 1) - 0.5) / n
    q = np.empty(n)
    failed = []
    for j, prob in enumerate(pos):
        try:
            q[j] = model_quantile(m, float(prob))
        except (ConvergenceError, DomainError, ValueError):
            q[j] = np.nan
            failed.append(j)
    qq = np.column_stack([q, y])
    pp = np.column_stack([pos, np.asarray(model_cdf(m, y), dtype=float)])
    return qq, pp, tuple(failed)


def summary_stats(data) -> SummaryStats:
    """Five-number summary plus moments.

    Quartiles interpolate linearly between order statistics at position
    ``h = (n - 1) p + 1``; the variance uses divisor ``n - 1``.
    """
    y = np.sort(np.asarray(data, dtype=float).ravel())
    if y.size < 2:
        raise DataError("summary statistics need at least two observations")
    if np.any(~np.isfinite(y)):
        raise DataError("observations must be finite")
    q1, med, q3 = np.quantile(y, [0.25, 0.5, 0.75])
    mean = math.fsum(y) / y.size
    dev = y - mean
    sd = math.sqrt(np.mean(dev**2))
    # standardise first so tiny spreads do not underflow; constant samples have no shape
    if sd > 0:
        z = dev / sd
        skew, kurt = float(np.mean(z**3)), float(np.mean(z**4))
    else:
        skew = kurt = math.nan
    return SummaryStats(
        min=float(y[0]), q1=float(q1), median=float(med), q3=float(q3), max=float(y[-1]),
        mean=mean, variance=float(np.sum(dev**2) / (y.size - 1)),
        skewness=skew, kurtosis=kurt,
    )
