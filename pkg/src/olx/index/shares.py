"""Share tables: where supply comes from and what demand asks for.

Supply shares count distinct worker profiles active in a trailing window;
demand shares split windowed posting counts by occupation. Both are plain
fractions of their denominator, reported with the denominator so a
consumer can always see how much data stands behind a share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Iterable

import pandas as pd

from ..records import WorkerObservation
from ..taxonomy import LanguageDomain, OccupationCategory, PlatformRegistry
from .cube import DailyCountCube

WORKER_COLUMNS = ["platform_id", "worker_id", "observed_day", "country", "category", "given_name"]


def build_worker_frame(
    observations: Iterable[WorkerObservation] | pd.DataFrame,
    registry: PlatformRegistry | None = None,
) -> pd.DataFrame:
    """Normalize worker observations into the supply-side frame.

    Native categories are crosswalked when a registry is supplied;
    otherwise every worker lands in ``unclassified``.
    """
    if isinstance(observations, pd.DataFrame):
        frame = observations
        if "observed_day" not in frame.columns and "observed_at" in frame.columns:
            frame = frame.copy()
            frame["observed_day"] = pd.to_datetime(frame["observed_at"], utc=True).dt.date
        if "category" not in frame.columns:
            frame = frame.copy()
            frame["category"] = _classify_column(frame, registry)
        if "given_name" not in frame.columns:
            frame = frame.copy()
            frame["given_name"] = None
        missing = [c for c in WORKER_COLUMNS if c not in frame.columns]
        if missing:
            raise ValueError(f"worker frame missing columns {missing}")
        return frame[WORKER_COLUMNS]
    rows = [
        {
            "platform_id": o.platform_id,
            "worker_id": o.worker_id,
            "observed_day": o.observed_at.date(),
            "country": o.country,
            "native_category": o.native_category,
            "given_name": o.given_name,
        }
        for o in observations
    ]
    frame = pd.DataFrame(rows, columns=[*WORKER_COLUMNS[:4], "native_category", "given_name"])
    if frame.empty:
        return pd.DataFrame(columns=WORKER_COLUMNS)
    frame["category"] = _classify_column(frame, registry)
    return frame[WORKER_COLUMNS]


def _classify_column(frame: pd.DataFrame, registry: PlatformRegistry | None) -> list[str]:
    if registry is None or "native_category" not in frame.columns:
        return [OccupationCategory.UNCLASSIFIED.value] * len(frame)

    def norm(label) -> str:
        return label if isinstance(label, str) else ""

    keys = [(pid, norm(label)) for pid, label in zip(frame["platform_id"], frame["native_category"])]
    mapping = {k: registry.classify_occupation(*k).value for k in set(keys)}
    return [mapping[k] for k in keys]


@dataclass(frozen=True)
class ShareTable:
    """Fractions per key over a trailing window, with their denominator."""

    as_of: date
    window_days: int
    axis: str  # "supply_country" | "demand_occupation"
    shares: dict[str, float]
    denominator: int
    filters: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.denominator > 0:
            total = sum(self.shares.values())
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"shares sum to {total}, expected 1")
        elif self.shares:
            raise ValueError("zero denominator requires an empty share table")

    @property
    def top_key(self) -> str | None:
        """Argmax key; ties break lexicographically for determinism."""
        if not self.shares:
            return None
        return min(self.shares, key=lambda k: (-self.shares[k], k))


def _window_mask(days: pd.Series, as_of: date, window_days: int) -> pd.Series:
    start = as_of - timedelta(days=window_days - 1)
    return (days >= start) & (days <= as_of)


def supply_share_by_country(
    workers: Iterable[WorkerObservation] | pd.DataFrame,
    as_of: date,
    window_days: int,
    occupation: OccupationCategory | None = None,
    registry: PlatformRegistry | None = None,
) -> ShareTable:
    """Country shares of distinct workers active in the trailing window.

    A profile observed several times in the window counts once (its latest
    observation wins); unknown origins are reported under ``ZZ``.
    """
    frame = build_worker_frame(workers, registry)
    filters: dict[str, str] = {}
    if not frame.empty:
        frame = frame[_window_mask(frame["observed_day"], as_of, window_days)]
    if occupation is not None:
        filters["occupation"] = occupation.value
        frame = frame[frame["category"] == occupation.value]
    if frame.empty:
        return ShareTable(as_of, window_days, "supply_country", {}, 0, filters)
    distinct = (
        frame.sort_values("observed_day")
        .drop_duplicates(["platform_id", "worker_id"], keep="last")
    )
    counts = distinct.groupby("country").size().sort_index()
    denominator = int(counts.sum())
    shares = {country: int(n) / denominator for country, n in counts.items()}
    return ShareTable(as_of, window_days, "supply_country", shares, denominator, filters)


def _resolve_platforms(
    platforms: Iterable[str] | None,
    domain: LanguageDomain | None,
    registry: PlatformRegistry | None,
) -> frozenset[str] | None:
    if domain is None:
        return frozenset(platforms) if platforms is not None else None
    if registry is None:
        raise ValueError("a registry is required to resolve a language-domain filter")
    in_domain = registry.platforms_in_domain(domain)
    if platforms is not None:
        in_domain &= frozenset(platforms)
    return in_domain


def demand_share_by_occupation(
    cube: DailyCountCube,
    as_of: date,
    window_days: int,
    buyer_country: str | None = None,
    domain: LanguageDomain | None = None,
    registry: PlatformRegistry | None = None,
    platforms: Iterable[str] | None = None,
) -> ShareTable:
    """Occupation shares of windowed posting counts under the given filters."""
    selected = _resolve_platforms(platforms, domain, registry)
    counts = cube.window_counts_by(
        "category", as_of, window_days, platforms=selected, buyer_country=buyer_country
    )
    filters: dict[str, str] = {}
    if buyer_country is not None:
        filters["country"] = buyer_country
    if domain is not None:
        filters["domain"] = domain.value
    denominator = sum(counts.values())
    if denominator == 0:
        return ShareTable(as_of, window_days, "demand_occupation", {}, 0, filters)
    shares = {category: n / denominator for category, n in sorted(counts.items())}
    return ShareTable(as_of, window_days, "demand_occupation", shares, denominator, filters)


def top_category_by_country(
    cube: DailyCountCube,
    as_of: date,
    window_days: int,
    domain: LanguageDomain | None = None,
    registry: PlatformRegistry | None = None,
    platforms: Iterable[str] | None = None,
) -> dict[str, str]:
    """Most-demanded occupation per buyer country (the map payload).

    Invariant under any positive rescaling of the counts: only count
    ordering matters, with lexicographic tie-breaking.
    """
    selected = _resolve_platforms(platforms, domain, registry)
    frame = cube._select(platforms=selected)
    if frame.empty:
        return {}
    start = as_of - timedelta(days=window_days - 1)
    frame = frame[(frame["day"] >= start) & (frame["day"] <= as_of)]
    if frame.empty:
        return {}
    counts = frame.groupby(["buyer_country", "category"])["count"].sum().reset_index()
    out: dict[str, str] = {}
    for country, group in counts.groupby("buyer_country"):
        ranked = sorted(zip(group["category"], group["count"]), key=lambda kv: (-kv[1], kv[0]))
        out[str(country)] = ranked[0][0]
    return out
