"""Daily posting counts by platform, occupation and buyer country.

The cube is the single aggregate every demand-side statistic is computed
from. It is pandas-backed so million-posting inputs stay cheap, but the
slices handed to the series math are plain ``dict[date, int]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterable

import pandas as pd

from ..records import VacancyPosting
from ..taxonomy import UNKNOWN_COUNTRY, OccupationCategory, PlatformRegistry, normalize_country

_COLUMNS = ["day", "platform_id", "category", "buyer_country", "count"]


@dataclass(frozen=True)
class DailyCountCube:
    """Non-negative counts keyed by (day, platform, category, buyer country)."""

    frame: pd.DataFrame  # columns: _COLUMNS, one row per non-empty cell

    def __post_init__(self):
        if list(self.frame.columns) != _COLUMNS:
            raise ValueError(f"cube frame must have columns {_COLUMNS}")
        if len(self.frame) and (self.frame["count"] < 0).any():
            raise ValueError("cube counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.frame["count"].sum())

    @property
    def span(self) -> tuple[date, date] | None:
        if self.frame.empty:
            return None
        return self.frame["day"].min(), self.frame["day"].max()

    def platform_first_days(self) -> dict[str, date]:
        """Earliest observed day per platform (chain-link preconditions)."""
        if self.frame.empty:
            return {}
        return self.frame.groupby("platform_id")["day"].min().to_dict()

    def _select(
        self,
        platforms: Iterable[str] | None = None,
        occupation: OccupationCategory | None = None,
        buyer_country: str | None = None,
    ) -> pd.DataFrame:
        f = self.frame
        if platforms is not None:
            f = f[f["platform_id"].isin(set(platforms))]
        if occupation is not None:
            f = f[f["category"] == occupation.value]
        if buyer_country is not None:
            f = f[f["buyer_country"] == buyer_country]
        return f

    def daily_totals(
        self,
        platforms: Iterable[str] | None = None,
        occupation: OccupationCategory | None = None,
        buyer_country: str | None = None,
    ) -> dict[date, int]:
        """Zero-filled consecutive daily totals over the selection's span."""
        sel = self._select(platforms, occupation, buyer_country)
        if sel.empty:
            return {}
        by_day = sel.groupby("day")["count"].sum()
        first, last = by_day.index.min(), by_day.index.max()
        out: dict[date, int] = {}
        d = first
        while d <= last:
            out[d] = int(by_day.get(d, 0))
            d += timedelta(days=1)
        return out

    def window_counts_by(
        self,
        axis: str,
        as_of: date,
        window_days: int,
        platforms: Iterable[str] | None = None,
        occupation: OccupationCategory | None = None,
        buyer_country: str | None = None,
    ) -> dict[str, int]:
        """Counts grouped by one axis over the trailing window ending at as_of."""
        if axis not in ("category", "buyer_country", "platform_id"):
            raise ValueError(f"unknown cube axis {axis!r}")
        sel = self._select(platforms, occupation, buyer_country)
        start = as_of - timedelta(days=window_days - 1)
        sel = sel[(sel["day"] >= start) & (sel["day"] <= as_of)]
        if sel.empty:
            return {}
        return {k: int(v) for k, v in sel.groupby(axis)["count"].sum().items()}

    def scaled(self, k: int) -> "DailyCountCube":
        """Every count multiplied by a positive integer (invariance tests)."""
        if k <= 0:
            raise ValueError("scale factor must be positive")
        frame = self.frame.copy()
        frame["count"] = frame["count"] * k
        return DailyCountCube(frame)


def build_count_cube(
    postings: Iterable[VacancyPosting] | pd.DataFrame,
    registry: PlatformRegistry,
) -> DailyCountCube:
    """Aggregate deduplicated postings into the daily count cube.

    A posting lands in the UTC calendar day of ``posted_at``; its native
    category is crosswalked through the registry and its buyer country is
    re-normalized defensively, so unclassifiable values fall into the
    ``unclassified`` / ``ZZ`` buckets rather than being dropped: the cube
    total always equals the number of input postings.
    """
    if isinstance(postings, pd.DataFrame):
        raw = postings
    else:
        raw = pd.DataFrame(
            {
                "platform_id": p.platform_id,
                "posted_at": p.posted_at,
                "native_category": p.native_category,
                "buyer_country": p.buyer_country,
            }
            for p in postings
        )
    if raw.empty:
        return DailyCountCube(pd.DataFrame(columns=_COLUMNS))

    posted = pd.to_datetime(raw["posted_at"], utc=True)
    day = posted.dt.date

    # Classify per unique (platform, label) pair, then broadcast.
    pairs = raw[["platform_id", "native_category"]].drop_duplicates()
    category_map = {
        (pid, label): registry.classify_occupation(pid, label).value
        for pid, label in pairs.itertuples(index=False)
    }
    category = pd.Series(
        [category_map[k] for k in zip(raw["platform_id"], raw["native_category"])],
        index=raw.index,
    )

    known = {c: normalize_country(c) for c in raw["buyer_country"].dropna().unique()}
    country = raw["buyer_country"].map(known).fillna(UNKNOWN_COUNTRY)

    grouped = (
        pd.DataFrame(
            {
                "day": day,
                "platform_id": raw["platform_id"],
                "category": category,
                "buyer_country": country,
            }
        )
        .groupby(["day", "platform_id", "category", "buyer_country"], sort=True)
        .size()
        .rename("count")
        .reset_index()
    )
    return DailyCountCube(grouped)
