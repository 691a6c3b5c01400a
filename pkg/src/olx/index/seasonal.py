"""Diagnostic multiplicative seasonal profile of an index series.

Classical ratio-to-trend decomposition on monthly means: the trend is a
centered 2x12 moving average, each month's ratio to it is averaged over
the years, and the twelve factors are renormalized to mean 1. The profile
is a diagnostic; the published index itself is never seasonally adjusted.
"""

from __future__ import annotations

import calendar
from datetime import date

from ..errors import IndexComputationError, SeasonalSpanError
from .series import IndexSeries

REQUIRED_MONTHS = 24


def _complete_monthly_means(points: dict[date, float]) -> list[tuple[int, int, float]]:
    """Mean per complete calendar month, in order, partial edge months dropped."""
    by_month: dict[tuple[int, int], list[float]] = {}
    for d, v in points.items():
        by_month.setdefault((d.year, d.month), []).append(v)
    out = []
    for (year, month), values in by_month.items():
        if len(values) == calendar.monthrange(year, month)[1]:
            out.append((year, month, sum(values) / len(values)))
    return out


def seasonal_profile(series: IndexSeries) -> dict[int, float]:
    """Twelve monthly factors (1=January), mean-1 normalized.

    Requires at least 24 complete calendar months of points.
    """
    monthly = _complete_monthly_means(series.points)
    if len(monthly) < REQUIRED_MONTHS:
        raise SeasonalSpanError(
            f"seasonal profile needs {REQUIRED_MONTHS} complete months, got {len(monthly)}"
        )
    means = [m for _, _, m in monthly]

    ratios_by_month: dict[int, list[float]] = {m: [] for m in range(1, 13)}
    for i in range(6, len(means) - 6):
        trend = (0.5 * means[i - 6] + sum(means[i - 5 : i + 6]) + 0.5 * means[i + 6]) / 12.0
        if trend <= 0:
            raise IndexComputationError("non-positive trend; cannot form seasonal ratios")
        ratios_by_month[monthly[i][1]].append(means[i] / trend)

    factors = {m: sum(r) / len(r) for m, r in ratios_by_month.items() if r}
    if len(factors) < 12:
        raise SeasonalSpanError("series does not cover every calendar month")
    grand = sum(factors.values()) / 12.0
    return {m: factors[m] / grand for m in range(1, 13)}
