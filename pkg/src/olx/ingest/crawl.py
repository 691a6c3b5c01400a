"""The crawl cycle: fetch new postings per platform, dedup, persist, advance.

Per-platform failures are isolated: a dead platform keeps its old
watermark and the rest of the cycle completes. The order of operations is
deliberate (dedup -> persist postings -> flush seen -> advance watermark):
a crash anywhere after persist means re-offered postings are absorbed by
the seen set rather than counted twice.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone

import httpx

from ..errors import IngestError
from ..records import VacancyPosting
from ..store import ObservationStore, SeenStore, WatermarkStore
from ..taxonomy import PlatformRegistry
from .adapters import AdapterConfig, fetch_new_postings, fetch_worker_profiles

# Re-fetch window absorbing clock skew between crawler and platform;
# dedup makes the overlap harmless.
WATERMARK_OVERLAP = timedelta(hours=1)

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def dedup(batch: list[VacancyPosting], seen: SeenStore) -> list[VacancyPosting]:
    """Postings whose identity is new; their keys enter the seen set now.

    Batch-internal duplicates count once. Insertion is atomic with the
    return value; durability comes with the caller's flush.
    """
    unique: list[VacancyPosting] = []
    batch_keys: set[tuple[str, str]] = set()
    newest: date | None = None
    for p in batch:
        if p.key in batch_keys:
            continue
        batch_keys.add(p.key)
        unique.append(p)
        day = p.posted_at.date()
        newest = day if newest is None else max(newest, day)
    if not unique:
        return []
    inserted = seen.insert_if_absent((p.key for p in unique), newest)
    return [p for p in unique if p.key in inserted]


@dataclass
class PlatformCrawl:
    platform_id: str
    new_postings: int = 0
    fetched: int = 0
    skipped: int = 0
    new_workers: int = 0
    error: str | None = None
    watermark: datetime | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class CrawlReport:
    platforms: dict[str, PlatformCrawl] = field(default_factory=dict)

    @property
    def total_new_postings(self) -> int:
        return sum(p.new_postings for p in self.platforms.values())

    @property
    def failed_platforms(self) -> list[str]:
        return sorted(pid for pid, p in self.platforms.items() if not p.ok)


def _crawl_one(
    adapter: AdapterConfig,
    store: ObservationStore,
    seen: SeenStore,
    watermarks: WatermarkStore,
    worker_seen: SeenStore | None,
    worker_sample_size: int,
    worker_seed: int,
    client: httpx.Client,
) -> PlatformCrawl:
    pid = adapter.platform_id
    entry = PlatformCrawl(platform_id=pid, watermark=watermarks.get(pid))
    watermark = watermarks.get(pid)
    since = (watermark - WATERMARK_OVERLAP) if watermark is not None else _EPOCH

    result = fetch_new_postings(adapter, since, client=client)
    entry.fetched = len(result.postings)
    entry.skipped = result.skipped

    fresh = dedup(result.postings, seen)
    store.append_postings(fresh)
    seen.flush()
    entry.new_postings = len(fresh)
    if fresh:
        entry.watermark = watermarks.advance(pid, max(p.posted_at for p in fresh))

    if worker_sample_size > 0 and adapter.profile_path_template:
        profiles = fetch_worker_profiles(adapter, worker_sample_size, worker_seed, client=client)
        entry.skipped += profiles.skipped
        if worker_seen is not None:
            keyed = {
                (pid, f"{w.worker_id}@{w.observed_at.date().isoformat()}"): w
                for w in profiles.workers
            }
            newest = max((w.observed_at.date() for w in profiles.workers), default=None)
            inserted = (
                worker_seen.insert_if_absent(keyed, newest) if newest is not None else set()
            )
            new_workers = [w for k, w in keyed.items() if k in inserted]
        else:
            new_workers = profiles.workers
        store.append_workers(new_workers)
        if worker_seen is not None:
            worker_seen.flush()
        entry.new_workers = len(new_workers)
    return entry


def crawl_cycle(
    registry: PlatformRegistry,
    adapters: list[AdapterConfig],
    store: ObservationStore,
    seen: SeenStore,
    watermarks: WatermarkStore,
    worker_seen: SeenStore | None = None,
    worker_sample_size: int = 0,
    worker_seed: int = 0,
    client: httpx.Client | None = None,
    max_workers: int = 1,
) -> CrawlReport:
    """One cycle over every adapter; per-platform errors are contained."""
    for adapter in adapters:
        if adapter.platform_id not in registry:
            raise IngestError(
                f"adapter {adapter.platform_id!r} is not in the registry",
                platform_id=adapter.platform_id,
                retryable=False,
            )
    own = client is None
    client = client or httpx.Client()
    report = CrawlReport()

    def run(adapter: AdapterConfig) -> PlatformCrawl:
        try:
            return _crawl_one(
                adapter, store, seen, watermarks,
                worker_seen, worker_sample_size, worker_seed, client,
            )
        except IngestError as exc:
            return PlatformCrawl(
                platform_id=adapter.platform_id,
                error=str(exc),
                watermark=watermarks.get(adapter.platform_id),
            )

    try:
        if max_workers <= 1:
            results = [run(a) for a in adapters]
        else:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                results = list(pool.map(run, adapters))
    finally:
        if own:
            client.close()
    for entry in results:
        report.platforms[entry.platform_id] = entry
    return report
