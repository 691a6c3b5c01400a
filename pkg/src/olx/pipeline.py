"""Snapshot rebuild: observations in, one immutable published bundle out.

Reads everything the crawlers persisted, builds the count cube, the
chain-linked index series per language domain, and the gender-labelled
worker table, then publishes them as a snapshot. Rebuilds are exclusive
via a file lock and never leave a partial snapshot behind.
"""

from __future__ import annotations

import fcntl
from contextlib import contextmanager
from datetime import date
from pathlib import Path

import pandas as pd

from .config import LinkScheduleEntry, ObservatoryConfig
from .demographics import NameGenderTable, label_workers
from .errors import OlxError
from .exports import link_events_csv, series_csv
from .index import DailyCountCube, IndexSeries, build_count_cube, build_index, chain_link
from .store import DataLayout, ObservationStore, SnapshotCatalog
from .taxonomy import LanguageDomain, OccupationCategory, PlatformRegistry

CUBE_ARTIFACT = "cube.csv.gz"
WORKERS_ARTIFACT = "workers.csv.gz"

DOMAIN_KEYS = ("ALL", "EN", "ES", "RU")


def series_artifact(domain_key: str) -> str:
    return f"series_{domain_key}.csv"


def link_events_artifact(domain_key: str) -> str:
    return f"link_events_{domain_key}.csv"


@contextmanager
def rebuild_lock(layout: DataLayout):
    """Exclusive advisory lock; a second concurrent rebuild fails fast."""
    path = layout.ensure().rebuild_lock_path
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as handle:
        try:
            fcntl.flock(handle, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except BlockingIOError:
            raise OlxError("another rebuild is already running") from None
        try:
            yield
        finally:
            fcntl.flock(handle, fcntl.LOCK_UN)


def build_domain_series(
    cube: DailyCountCube,
    platforms: frozenset[str],
    schedule: tuple[LinkScheduleEntry, ...],
    window_days: int,
    base_date: date | None = None,
    occupation: OccupationCategory | None = None,
    buyer_country: str | None = None,
) -> IndexSeries:
    """Chained index over one platform set, applying the link schedule.

    Link entries are restricted to the given set; if the schedule covers
    the entire set (a domain whose platforms all arrived via one link),
    the series is simply built over the whole set with no link events.
    """
    plans = []
    added_later: set[str] = set()
    for entry in sorted(schedule, key=lambda e: e.link_date):
        added = entry.platforms_added & platforms
        if added:
            plans.append((entry.link_date, added))
            added_later |= added
    initial = platforms - added_later
    if not initial:
        initial = platforms
        plans = []
    series = build_index(
        cube,
        initial,
        base_date=base_date,
        window_days=window_days,
        occupation=occupation,
        buyer_country=buyer_country,
    )
    current = set(initial)
    for link_date, added in plans:
        current |= added
        series = chain_link(
            series,
            cube,
            current,
            link_date,
            occupation=occupation,
            buyer_country=buyer_country,
        )
    return series


def domain_platforms(registry: PlatformRegistry, domain_key: str) -> frozenset[str]:
    if domain_key == "ALL":
        return registry.platforms_in_domain(None)
    return registry.platforms_in_domain(LanguageDomain(domain_key))


def rebuild(
    layout: DataLayout,
    registry: PlatformRegistry,
    config: ObservatoryConfig,
    name_table: NameGenderTable | None = None,
) -> int:
    """Recompute every published artifact and publish one snapshot.

    Returns the new snapshot id; raises without publishing anything if any
    stage fails (e.g. missing chain-link overlap).
    """
    name_table = name_table or (
        NameGenderTable.from_csv(config.name_table_path)
        if config.name_table_path
        else NameGenderTable.default()
    )
    store = ObservationStore(layout)
    with rebuild_lock(layout):
        postings = store.read_postings_frame()
        if postings.empty:
            raise OlxError("no postings have been ingested; nothing to rebuild")
        cube = build_count_cube(postings, registry)

        workers_raw = store.read_workers_frame()
        if workers_raw.empty:
            workers = pd.DataFrame(
                columns=["platform_id", "worker_id", "observed_day", "country",
                         "category", "given_name", "gender_label"]
            )
        else:
            workers = label_workers(workers_raw, name_table, registry)

        series_by_domain: dict[str, IndexSeries] = {}
        for key in DOMAIN_KEYS:
            platforms = domain_platforms(registry, key)
            platforms = frozenset(p for p in platforms if p in cube.platform_first_days())
            if not platforms:
                continue
            base = config.base_date if key == "ALL" else None
            series_by_domain[key] = build_domain_series(
                cube, platforms, config.link_schedule, config.window_days, base_date=base
            )

        if "ALL" not in series_by_domain:
            raise OlxError("not enough data to build the headline index series")

        def writer(staging: Path) -> dict:
            cube.frame.to_csv(staging / CUBE_ARTIFACT, index=False, compression="gzip")
            workers.to_csv(staging / WORKERS_ARTIFACT, index=False, compression="gzip")
            for key, series in series_by_domain.items():
                (staging / series_artifact(key)).write_text(
                    series_csv(series.points), encoding="utf-8"
                )
                (staging / link_events_artifact(key)).write_text(
                    link_events_csv(series.link_events), encoding="utf-8"
                )
            return {
                "window_days": config.window_days,
                "supply_window_days": config.supply_window_days,
                "demand_window_days": config.demand_window_days,
                "domains": {
                    key: {
                        "base_date": series.base_date.isoformat(),
                        "first_date": series.first_date.isoformat(),
                        "last_date": series.last_date.isoformat(),
                        "platforms": sorted(series.current_platforms),
                        "link_events": len(series.link_events),
                    }
                    for key, series in series_by_domain.items()
                },
                "link_schedule": [
                    {
                        "link_date": entry.link_date.isoformat(),
                        "platforms_added": sorted(entry.platforms_added),
                    }
                    for entry in config.link_schedule
                ],
            }

        catalog = SnapshotCatalog(layout)
        provenance = {
            "postings": int(len(postings)),
            "workers": int(len(workers)),
            "platforms": sorted(cube.platform_first_days()),
        }
        return catalog.publish(writer, provenance=provenance)
