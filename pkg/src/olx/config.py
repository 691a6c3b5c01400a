"""Observatory configuration: index parameters, link schedule, crawl knobs.

One YAML document drives `crawl`, `rebuild` and `serve`; the simulator can
emit a matching file for a scenario so the whole loop runs against the
same assumptions the data was generated under.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path

import yaml

from .errors import OlxError
from .index.series import DEFAULT_WINDOW_DAYS


@dataclass(frozen=True)
class LinkScheduleEntry:
    link_date: date
    platforms_added: frozenset[str]


@dataclass(frozen=True)
class ObservatoryConfig:
    data_dir: str | None = None
    adapters_dir: str = "adapters"
    window_days: int = DEFAULT_WINDOW_DAYS
    base_date: date | None = None
    link_schedule: tuple[LinkScheduleEntry, ...] = ()
    supply_window_days: int = 90
    demand_window_days: int = 90
    worker_sample_size: int = 0
    worker_seed: int = 17
    crawl_parallelism: int = 1
    name_table_path: str | None = None  # None: packaged fixture table

    def to_yaml(self, path: Path | str) -> None:
        doc = {
            "data_dir": self.data_dir,
            "adapters_dir": self.adapters_dir,
            "window_days": self.window_days,
            "base_date": self.base_date.isoformat() if self.base_date else None,
            "link_schedule": [
                {
                    "link_date": entry.link_date.isoformat(),
                    "platforms_added": sorted(entry.platforms_added),
                }
                for entry in self.link_schedule
            ],
            "supply_window_days": self.supply_window_days,
            "demand_window_days": self.demand_window_days,
            "worker_sample_size": self.worker_sample_size,
            "worker_seed": self.worker_seed,
            "crawl_parallelism": self.crawl_parallelism,
            "name_table_path": self.name_table_path,
        }
        Path(path).write_text(yaml.safe_dump(doc, sort_keys=False), encoding="utf-8")

    @classmethod
    def from_yaml(cls, path: Path | str) -> "ObservatoryConfig":
        try:
            doc = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except OSError as exc:
            raise OlxError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "ObservatoryConfig":
        schedule = tuple(
            LinkScheduleEntry(
                link_date=date.fromisoformat(str(entry["link_date"])),
                platforms_added=frozenset(entry["platforms_added"]),
            )
            for entry in doc.get("link_schedule", [])
        )
        base = doc.get("base_date")
        return cls(
            data_dir=doc.get("data_dir"),
            adapters_dir=doc.get("adapters_dir", "adapters"),
            window_days=int(doc.get("window_days", DEFAULT_WINDOW_DAYS)),
            base_date=date.fromisoformat(str(base)) if base else None,
            link_schedule=schedule,
            supply_window_days=int(doc.get("supply_window_days", 90)),
            demand_window_days=int(doc.get("demand_window_days", 90)),
            worker_sample_size=int(doc.get("worker_sample_size", 0)),
            worker_seed=int(doc.get("worker_seed", 17)),
            crawl_parallelism=int(doc.get("crawl_parallelism", 1)),
            name_table_path=doc.get("name_table_path"),
        )

    def with_overrides(self, **kwargs) -> "ObservatoryConfig":
        supplied = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **supplied) if supplied else self
