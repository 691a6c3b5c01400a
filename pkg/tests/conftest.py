"""Shared fixtures and record builders for the test suite."""

from __future__ import annotations

from datetime import date, datetime, timedelta, timezone

import pytest

from olx.records import VacancyPosting, WorkerObservation
from olx.taxonomy import PlatformRegistry


def mk_posting(
    platform_id: str,
    posting_id: str,
    day: date,
    native_category: str = "Web Development",
    buyer_country: str = "US",
    hour: int = 12,
) -> VacancyPosting:
    posted = datetime(day.year, day.month, day.day, hour, tzinfo=timezone.utc)
    return VacancyPosting(
        platform_id=platform_id,
        posting_id=posting_id,
        posted_at=posted,
        native_category=native_category,
        buyer_country=buyer_country,
        title=f"job {posting_id}",
        fetched_at=posted + timedelta(hours=1),
    )


def mk_worker(
    platform_id: str,
    worker_id: str,
    day: date,
    country: str = "IN",
    given_name: str | None = "Maria",
    native_category: str | None = "Web Development",
) -> WorkerObservation:
    return WorkerObservation(
        platform_id=platform_id,
        worker_id=worker_id,
        country=country,
        observed_at=datetime(day.year, day.month, day.day, 9, tzinfo=timezone.utc),
        given_name=given_name,
        native_category=native_category,
    )


def daily_postings(platform_id: str, start: date, counts: list[int], **kwargs) -> list[VacancyPosting]:
    """`counts[i]` postings on start+i days, ids unique per platform."""
    out = []
    for i, n in enumerate(counts):
        day = start + timedelta(days=i)
        for j in range(n):
            out.append(mk_posting(platform_id, f"{day.isoformat()}-{j}", day, **kwargs))
    return out


@pytest.fixture(scope="session")
def registry() -> PlatformRegistry:
    return PlatformRegistry.default()
