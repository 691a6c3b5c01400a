"""Ingestion: platform adapters, fetching, deduplication, crawl cycle."""

from .adapters import (
    AdapterConfig,
    FetchResult,
    fetch_new_postings,
    fetch_worker_profiles,
    load_adapters,
    resolve_pointer,
)
from .crawl import WATERMARK_OVERLAP, CrawlReport, PlatformCrawl, crawl_cycle, dedup

__all__ = [
    "AdapterConfig",
    "CrawlReport",
    "FetchResult",
    "PlatformCrawl",
    "WATERMARK_OVERLAP",
    "crawl_cycle",
    "dedup",
    "fetch_new_postings",
    "fetch_worker_profiles",
    "load_adapters",
    "resolve_pointer",
]
