"""Observation records and their JSON-lines wire format.

One vacancy posting is one demand-side observation; one worker profile
sighting is one supply-side observation. Both are persisted as JSONL with
RFC 3339 UTC timestamps, one object per line.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone


def format_ts(ts: datetime) -> str:
    """RFC 3339 UTC at second resolution, e.g. 2020-09-16T08:15:00Z."""
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_ts(raw: str) -> datetime:
    """Parse an RFC 3339 timestamp; naive values are rejected."""
    ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        raise ValueError(f"timestamp {raw!r} lacks a timezone")
    return ts.astimezone(timezone.utc)


@dataclass(frozen=True)
class VacancyPosting:
    """One job/project posted on a platform (the demand unit)."""

    platform_id: str
    posting_id: str
    posted_at: datetime
    native_category: str
    buyer_country: str
    title: str
    fetched_at: datetime

    @property
    def key(self) -> tuple[str, str]:
        return (self.platform_id, self.posting_id)

    def to_json_line(self) -> str:
        record = asdict(self)
        record["posted_at"] = format_ts(self.posted_at)
        record["fetched_at"] = format_ts(self.fetched_at)
        return json.dumps(record, ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json_line(cls, line: str) -> "VacancyPosting":
        record = json.loads(line)
        return cls(
            platform_id=record["platform_id"],
            posting_id=record["posting_id"],
            posted_at=parse_ts(record["posted_at"]),
            native_category=record["native_category"],
            buyer_country=record["buyer_country"],
            title=record["title"],
            fetched_at=parse_ts(record["fetched_at"]),
        )


@dataclass(frozen=True)
class WorkerObservation:
    """One sighting of a freelancer profile (the supply unit)."""

    platform_id: str
    worker_id: str
    country: str
    observed_at: datetime
    given_name: str | None = None
    native_category: str | None = None

    @property
    def key(self) -> tuple[str, str]:
        return (self.platform_id, self.worker_id)

    def to_json_line(self) -> str:
        record = asdict(self)
        record["observed_at"] = format_ts(self.observed_at)
        return json.dumps(record, ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json_line(cls, line: str) -> "WorkerObservation":
        record = json.loads(line)
        return cls(
            platform_id=record["platform_id"],
            worker_id=record["worker_id"],
            country=record["country"],
            observed_at=parse_ts(record["observed_at"]),
            given_name=record.get("given_name"),
            native_category=record.get("native_category"),
        )
