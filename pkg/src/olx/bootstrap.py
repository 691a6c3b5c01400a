"""Bulk-load generated fixtures straight into the observation store.

The HTTP crawl path is the product; this is the fast lane for seeding a
data root from a simulator fixture set at million-posting scale. It
writes the same JSONL day files, fills the seen set and advances the
watermarks, so a later incremental crawl behaves exactly as if the data
had been crawled.
"""

from __future__ import annotations

import pandas as pd

from .sim.generate import FixtureSet
from .store import DataLayout, ObservationStore, SeenStore, WatermarkStore


def _write_day_files(layout: DataLayout, kind: str, frame: pd.DataFrame, day_col: str) -> int:
    """One JSONL file per (platform, day); rows serialized in a single pass."""
    frame = frame.sort_values(["platform_id", day_col], kind="stable").reset_index(drop=True)
    lines = frame.drop(columns=[day_col]).to_json(
        orient="records", lines=True, force_ascii=False
    ).split("\n")
    sizes = frame.groupby(["platform_id", day_col], sort=True).size()
    offset = 0
    for (platform_id, day), n in sizes.items():
        path = layout.day_file(kind, platform_id, day)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a", encoding="utf-8") as f:
            f.write("\n".join(lines[offset : offset + n]) + "\n")
        offset += n
    return offset


def ingest_fixtures(fixtures: FixtureSet, layout: DataLayout) -> dict[str, int]:
    """Write ledger postings/workers into the store; returns row counts."""
    layout.ensure()
    counts = {"postings": 0, "workers": 0}

    postings = fixtures.ledger.postings
    if not postings.empty:
        ts = postings["posted_at"].dt.strftime("%Y-%m-%dT%H:%M:%SZ")
        wire = pd.DataFrame(
            {
                "platform_id": postings["platform_id"],
                "posting_id": postings["posting_id"],
                "posted_at": ts,
                "native_category": postings["native_category"],
                "buyer_country": postings["buyer_country"],
                "title": postings["title"],
                "fetched_at": ts,
                "day": postings["day"],
            }
        )
        counts["postings"] = _write_day_files(layout, "postings", wire, "day")

        seen = SeenStore(layout)
        for platform_id, group in postings.groupby("platform_id"):
            keys = list(zip(group["platform_id"], group["posting_id"]))
            seen.insert_if_absent(keys, group["day"].max())
        seen.flush()

        watermarks = WatermarkStore(layout)
        for platform_id, latest in postings.groupby("platform_id")["posted_at"].max().items():
            watermarks.advance(str(platform_id), latest.to_pydatetime())

    workers = fixtures.ledger.workers
    if not workers.empty:
        wire = pd.DataFrame(
            {
                "platform_id": workers["platform_id"],
                "worker_id": workers["worker_id"],
                "country": workers["country"],
                "observed_at": workers["observed_at"].dt.strftime("%Y-%m-%dT%H:%M:%SZ"),
                "given_name": workers["given_name"],
                "native_category": workers["native_category"],
                "day": workers["observed_day"],
            }
        )
        counts["workers"] = _write_day_files(layout, "workers", wire, "day")
    return counts


def verify_conservation(fixtures: FixtureSet, layout: DataLayout) -> bool:
    """Persisted (platform, day) posting counts equal the ledger exactly."""
    return ObservationStore(layout).posting_counts() == fixtures.ledger.demand_counts()
