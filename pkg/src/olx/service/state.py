"""Snapshot loading and per-snapshot caching for the query layer.

The CURRENT pointer is re-read on every request (one tiny file read); a
rebuild that publishes mid-flight is picked up on the next request while
in-flight requests keep the snapshot they started with. Loaded artifacts
and recomputed filtered series are cached per snapshot id.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass
from datetime import date

import pandas as pd

from ..config import LinkScheduleEntry
from ..index import DailyCountCube, IndexSeries
from ..pipeline import CUBE_ARTIFACT, WORKERS_ARTIFACT, build_domain_series, domain_platforms
from ..store import DataLayout, SnapshotCatalog, SnapshotHandle
from ..taxonomy import OccupationCategory, PlatformRegistry

_CACHE_SLOTS = 4  # snapshots kept warm
_SERIES_SLOTS = 64  # filtered series per snapshot


@dataclass
class SnapshotData:
    snapshot_id: int
    manifest: dict
    cube: DailyCountCube
    workers: pd.DataFrame

    @property
    def window_days(self) -> int:
        return int(self.manifest["window_days"])

    @property
    def supply_window_days(self) -> int:
        return int(self.manifest.get("supply_window_days", 90))

    @property
    def demand_window_days(self) -> int:
        return int(self.manifest.get("demand_window_days", 90))

    def domain_meta(self, domain_key: str) -> dict | None:
        return self.manifest.get("domains", {}).get(domain_key)

    def last_date(self, domain_key: str = "ALL") -> date:
        meta = self.domain_meta(domain_key) or self.domain_meta("ALL")
        return date.fromisoformat(meta["last_date"])

    def link_schedule(self) -> tuple[LinkScheduleEntry, ...]:
        return tuple(
            LinkScheduleEntry(
                link_date=date.fromisoformat(entry["link_date"]),
                platforms_added=frozenset(entry["platforms_added"]),
            )
            for entry in self.manifest.get("link_schedule", [])
        )


def _load_snapshot(handle: SnapshotHandle) -> SnapshotData:
    cube_frame = pd.read_csv(handle.file(CUBE_ARTIFACT))
    cube_frame["day"] = pd.to_datetime(cube_frame["day"]).dt.date
    workers = pd.read_csv(handle.file(WORKERS_ARTIFACT))
    if not workers.empty:
        workers["observed_day"] = pd.to_datetime(workers["observed_day"]).dt.date
    return SnapshotData(
        snapshot_id=handle.snapshot_id,
        manifest=handle.manifest,
        cube=DailyCountCube(cube_frame),
        workers=workers,
    )


class SnapshotCache:
    def __init__(self, layout: DataLayout, registry: PlatformRegistry):
        self.catalog = SnapshotCatalog(layout)
        self.registry = registry
        self._lock = threading.Lock()
        self._snapshots: OrderedDict[int, SnapshotData] = OrderedDict()
        self._series: OrderedDict[tuple, IndexSeries] = OrderedDict()

    def current(self) -> SnapshotData:
        handle = self.catalog.get()  # raises SnapshotError when nothing published
        with self._lock:
            cached = self._snapshots.get(handle.snapshot_id)
            if cached is not None:
                self._snapshots.move_to_end(handle.snapshot_id)
                return cached
        data = _load_snapshot(handle)
        with self._lock:
            self._snapshots[handle.snapshot_id] = data
            while len(self._snapshots) > _CACHE_SLOTS:
                self._snapshots.popitem(last=False)
        return data

    def series(
        self,
        data: SnapshotData,
        domain_key: str,
        occupation: OccupationCategory | None = None,
        buyer_country: str | None = None,
    ) -> IndexSeries:
        """Chained series for a domain and optional filters, cached."""
        key = (
            data.snapshot_id,
            domain_key,
            occupation.value if occupation else None,
            buyer_country,
        )
        with self._lock:
            hit = self._series.get(key)
            if hit is not None:
                self._series.move_to_end(key)
                return hit
        platforms = domain_platforms(self.registry, domain_key)
        platforms = frozenset(p for p in platforms if p in data.cube.platform_first_days())
        meta = data.domain_meta(domain_key)
        base = None
        if meta is not None and occupation is None and buyer_country is None:
            base = date.fromisoformat(meta["base_date"])
        series = build_domain_series(
            data.cube,
            platforms,
            data.link_schedule(),
            data.window_days,
            base_date=base,
            occupation=occupation,
            buyer_country=buyer_country,
        )
        with self._lock:
            self._series[key] = series
            while len(self._series) > _SERIES_SLOTS:
                self._series.popitem(last=False)
        return series
