"""Noise-free expected index computed from scenario means.

Works from the generative means directly (no sampling), applying the same
window-total normalization and link-date splicing the pipeline is
expected to perform, but through its own closed-form arithmetic. The
pipeline's Poisson-sampled measurement should track this curve within a
tolerance band that shrinks as daily volume grows.
"""

from __future__ import annotations

from datetime import date, timedelta

from ..errors import ScenarioError
from .scenario import PlatformScenario, ScenarioConfig


def platform_mean(scenario: ScenarioConfig, p: PlatformScenario, day: date) -> float:
    """Expected posting count for one platform on one day."""
    start = max(p.launch_date or scenario.start_date, scenario.start_date)
    if day < start or day > scenario.end_date:
        return 0.0
    years = (day - start).days / 365.25
    seasonal = p.monthly_seasonal_factors[day.month - 1]
    return p.base_daily_volume * (1.0 + p.annual_growth_rate) ** years * seasonal


def expected_index(
    scenario: ScenarioConfig,
    window_days: int | None = None,
    base_date: date | None = None,
) -> dict[date, float]:
    """Analytic index curve for the scenario's basket-and-link plan."""
    window = window_days or scenario.window_days
    base = base_date or scenario.base_date

    added_later = set()
    for plan in scenario.link_schedule:
        added_later |= plan.platforms_added
    basket = [p for p in scenario.platforms if p.platform_id not in added_later]
    if not basket:
        raise ScenarioError("link schedule leaves no initial basket")

    days = []
    d = scenario.start_date
    while d <= scenario.end_date:
        days.append(d)
        d += timedelta(days=1)
    if len(days) < window:
        raise ScenarioError("scenario shorter than the smoothing window")

    def window_total(platforms: list[PlatformScenario], end_day: date) -> float:
        return sum(
            platform_mean(scenario, p, end_day - timedelta(days=k))
            for p in platforms
            for k in range(window)
        )

    if base is None:
        base = days[window - 1]
    base_total = window_total(basket, base)
    if base_total <= 0:
        raise ScenarioError("expected index base window has zero volume")

    points: dict[date, float] = {}
    current = list(basket)
    anchor_value = 100.0
    anchor_total = base_total
    links = sorted(scenario.link_schedule, key=lambda plan: plan.link_date)
    link_iter = iter(links)
    next_link = next(link_iter, None)

    for day in days[window - 1 :]:
        while next_link is not None and day >= next_link.link_date:
            value_at_link = anchor_value * window_total(current, next_link.link_date) / anchor_total
            current = current + [
                p for p in scenario.platforms if p.platform_id in next_link.platforms_added
            ]
            anchor_value = value_at_link
            anchor_total = window_total(current, next_link.link_date)
            next_link = next(link_iter, None)
        points[day] = anchor_value * window_total(current, day) / anchor_total
    if base in points:
        points[base] = 100.0
    return points
