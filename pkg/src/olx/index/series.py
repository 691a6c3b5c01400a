"""Index series construction: smoothing, base normalization, chain linking.

The index at day d is 100 x W(d)/W(base), where W is the trailing
window total of daily posting counts over the platform basket. Window
*totals* rather than means are used internally: with equal window lengths
the ratio is identical, integer sums stay exact, and multiplying every
count by a constant provably cannot move the index.

Adding platforms mid-series goes through chain linking: the new basket's
growth is spliced onto the old level at the link date, so the published
series has no level shift at the transition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from typing import Iterable, Mapping

from ..errors import (
    DegenerateBaseError,
    DegenerateLinkError,
    IndexComputationError,
    LinkWindowError,
)
from ..taxonomy import OccupationCategory
from .cube import DailyCountCube

DEFAULT_WINDOW_DAYS = 28


def _check_consecutive(days: list[date], what: str) -> None:
    for prev, cur in zip(days, days[1:]):
        if cur - prev != timedelta(days=1):
            raise ValueError(f"{what} must be keyed by consecutive dates ({prev} -> {cur})")


def moving_average(daily: Mapping[date, float], window_days: int) -> dict[date, float]:
    """Trailing arithmetic mean; defined only where a full window exists.

    Input must be keyed by consecutive ascending dates. A window longer
    than the series yields an empty result.
    """
    if window_days < 1:
        raise ValueError("window_days must be >= 1")
    days = list(daily)
    _check_consecutive(days, "moving_average input")
    values = list(daily.values())
    if len(values) < window_days:
        return {}
    out: dict[date, float] = {}
    running = sum(values[: window_days - 1])
    for i in range(window_days - 1, len(values)):
        running += values[i]
        out[days[i]] = running / window_days
        running -= values[i - window_days + 1]
    return out


def _window_totals(daily: Mapping[date, int], window_days: int) -> dict[date, int]:
    """Trailing window sums (exact for integer counts)."""
    days = list(daily)
    _check_consecutive(days, "daily totals")
    values = list(daily.values())
    if len(values) < window_days:
        return {}
    out: dict[date, int] = {}
    running = sum(values[: window_days - 1])
    for i in range(window_days - 1, len(values)):
        running += values[i]
        out[days[i]] = running
        running -= values[i - window_days + 1]
    return out


@dataclass(frozen=True)
class ChainLinkEvent:
    """One basket transition: platforms added and the splice factor."""

    link_date: date
    platforms_added: frozenset[str]
    link_factor: float

    def __post_init__(self):
        if not self.platforms_added:
            raise ValueError("a chain link must add at least one platform")
        if not (self.link_factor > 0):
            raise ValueError("link_factor must be positive")


@dataclass(frozen=True)
class IndexSeries:
    """Chained index points plus the provenance of every basket change."""

    base_date: date
    window_days: int
    points: dict[date, float]
    link_events: tuple[ChainLinkEvent, ...] = ()
    platform_set_history: tuple[tuple[date, frozenset[str]], ...] = ()

    def __post_init__(self):
        days = list(self.points)
        if not days:
            raise ValueError("an index series cannot be empty")
        _check_consecutive(days, "index points")
        if self.base_date not in self.points:
            raise ValueError("base_date must be a point of the series")
        if self.points[self.base_date] != 100.0:
            raise ValueError("index value at the base date must be exactly 100")
        if any(v < 0 or math.isnan(v) for v in self.points.values()):
            raise ValueError("index values must be non-negative")

    @property
    def first_date(self) -> date:
        return next(iter(self.points))

    @property
    def last_date(self) -> date:
        return next(reversed(self.points))

    @property
    def current_platforms(self) -> frozenset[str]:
        return self.platform_set_history[-1][1]

    def value(self, day: date) -> float:
        try:
            return self.points[day]
        except KeyError:
            raise IndexComputationError(f"{day} is outside the index series") from None

    def clipped(self, start: date | None, end: date | None) -> dict[date, float]:
        """Points within [start, end], both ends inclusive."""
        return {
            d: v
            for d, v in self.points.items()
            if (start is None or d >= start) and (end is None or d <= end)
        }


def build_index(
    cube: DailyCountCube,
    platforms: Iterable[str],
    base_date: date | None = None,
    window_days: int = DEFAULT_WINDOW_DAYS,
    occupation: OccupationCategory | None = None,
    buyer_country: str | None = None,
) -> IndexSeries:
    """Index over a fixed platform basket, normalized to 100 at the base.

    ``base_date`` defaults to the first day with a full trailing window.
    """
    basket = frozenset(platforms)
    daily = cube.daily_totals(basket, occupation, buyer_country)
    totals = _window_totals(daily, window_days)
    if not totals:
        raise IndexComputationError(
            f"selection has {len(daily)} day(s) of data; window needs {window_days}"
        )
    if base_date is None:
        base_date = next(iter(totals))
    if base_date not in totals:
        raise IndexComputationError(f"base date {base_date} lacks a full trailing window")
    base_total = totals[base_date]
    if base_total == 0:
        raise DegenerateBaseError(f"window total at base date {base_date} is zero")
    points = {d: 100.0 * t / base_total for d, t in totals.items()}
    return IndexSeries(
        base_date=base_date,
        window_days=window_days,
        points=points,
        platform_set_history=((next(iter(points)), basket),),
    )


def chain_link(
    old: IndexSeries,
    cube: DailyCountCube,
    new_platforms: Iterable[str],
    link_date: date,
    occupation: OccupationCategory | None = None,
    buyer_country: str | None = None,
) -> IndexSeries:
    """Splice an enlarged platform basket onto an existing series.

    Points before the link date are carried over untouched; from the link
    date onward the series follows the new basket's growth, anchored so
    both segments agree exactly at the link date. Repeated application
    composes, one event per basket change.
    """
    basket = frozenset(new_platforms)
    if not basket >= old.current_platforms:
        raise LinkWindowError("new basket must contain every current platform")
    added = basket - old.current_platforms
    if link_date not in old.points:
        raise IndexComputationError(f"link date {link_date} is outside the old series")

    window = old.window_days
    earliest_needed = link_date - timedelta(days=window - 1)
    first_days = cube.platform_first_days()
    for pid in sorted(basket):
        first = first_days.get(pid)
        if first is None or first > earliest_needed:
            raise LinkWindowError(
                f"platform {pid!r} lacks the full {window}-day window before {link_date}"
                f" (first data: {first})"
            )

    daily_new = cube.daily_totals(basket, occupation, buyer_country)
    totals_new = _window_totals(daily_new, window)
    if link_date not in totals_new:
        raise LinkWindowError(f"new basket has no full window at {link_date}")
    link_total = totals_new[link_date]
    if link_total == 0:
        raise DegenerateLinkError(f"new-basket window total at {link_date} is zero")

    anchor = old.points[link_date]
    points: dict[date, float] = {d: v for d, v in old.points.items() if d < link_date}
    points.update(
        {d: anchor * t / link_total for d, t in totals_new.items() if d >= link_date}
    )
    # An identity link (no platforms added) exercises the splice arithmetic
    # but records no event: every recorded event names what it added.
    events = old.link_events
    history = old.platform_set_history
    if added:
        link_factor = anchor / (link_total / window)
        events = events + (
            ChainLinkEvent(link_date=link_date, platforms_added=added, link_factor=link_factor),
        )
        history = history + ((link_date, basket),)
    return replace(old, points=points, link_events=events, platform_set_history=history)


def annualized_growth(ratio: float, days: float) -> float:
    """Compound annual growth implied by `ratio` over `days` (365.25-day years)."""
    if days <= 0:
        raise ValueError("days must be positive")
    return ratio ** (365.25 / days) - 1.0


@dataclass(frozen=True)
class GrowthStats:
    t0: date
    t1: date
    total_growth: float
    annualized: float


def growth_stats(series: IndexSeries, t0: date, t1: date) -> GrowthStats:
    """Total and annualized growth between two dates of the series."""
    if t0 >= t1:
        raise ValueError("t0 must precede t1")
    v0, v1 = series.value(t0), series.value(t1)
    if v0 == 0:
        raise DegenerateBaseError(f"index value at {t0} is zero")
    ratio = v1 / v0
    return GrowthStats(
        t0=t0,
        t1=t1,
        total_growth=ratio - 1.0,
        annualized=annualized_growth(ratio, (t1 - t0).days),
    )
