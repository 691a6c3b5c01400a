"""Platform adapters: paginated fetching and payload parsing.

An adapter config is pure data (shipped as one YAML file per platform):
where the listings live, whether pages are JSON or HTML, and which
selector extracts each logical field. JSON selectors are JSON pointers
into one item object; HTML selectors name the ``data-field`` attribute of
the element carrying the value inside each ``class="item"`` element.

Single bad items are skipped and counted, never fatal; transport failures
raise a retryable error carrying the platform id so one platform cannot
take down a crawl cycle.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from html.parser import HTMLParser
from pathlib import Path
from typing import Any

import httpx
import yaml

from ..errors import IngestError
from ..records import VacancyPosting, WorkerObservation, parse_ts
from ..taxonomy import normalize_country

POSTING_FIELDS = ("posting_id", "posted_at", "native_category", "buyer_country", "title")
PROFILE_FIELDS = ("worker_id", "observed_at", "country", "given_name", "native_category")

# posted_at this far past the local clock marks an item as malformed
_FUTURE_TOLERANCE = timedelta(minutes=5)
_RETRIES = 2


@dataclass(frozen=True)
class AdapterConfig:
    platform_id: str
    base_url: str
    list_path_template: str  # must contain {page}; {page_size} optional
    payload_kind: str  # "json" | "html"
    field_selectors: dict[str, str]
    profile_path_template: str = ""
    profile_selectors: dict[str, str] = field(default_factory=dict)
    items_pointer: str = "/items"  # JSON payloads only
    page_size: int = 500
    politeness_delay_ms: int = 0

    def __post_init__(self):
        if self.page_size < 1:
            raise ValueError("page_size must be >= 1")
        if self.politeness_delay_ms < 0:
            raise ValueError("politeness_delay_ms must be >= 0")
        if self.payload_kind not in ("json", "html"):
            raise ValueError(f"unsupported payload_kind {self.payload_kind!r}")
        if "{page}" not in self.list_path_template:
            raise ValueError("list_path_template needs a {page} placeholder")

    def list_url(self, page: int) -> str:
        path = self.list_path_template.format(page=page, page_size=self.page_size)
        return self.base_url.rstrip("/") + path

    def profile_url(self, page: int) -> str:
        if not self.profile_path_template:
            raise IngestError(
                f"adapter {self.platform_id} exposes no profile listing",
                platform_id=self.platform_id,
                retryable=False,
            )
        path = self.profile_path_template.format(page=page, page_size=self.page_size)
        return self.base_url.rstrip("/") + path

    def to_yaml(self, path: Path | str) -> None:
        doc = {
            "platform_id": self.platform_id,
            "base_url": self.base_url,
            "list_path_template": self.list_path_template,
            "payload_kind": self.payload_kind,
            "field_selectors": dict(self.field_selectors),
            "profile_path_template": self.profile_path_template,
            "profile_selectors": dict(self.profile_selectors),
            "items_pointer": self.items_pointer,
            "page_size": self.page_size,
            "politeness_delay_ms": self.politeness_delay_ms,
        }
        Path(path).write_text(yaml.safe_dump(doc, sort_keys=True), encoding="utf-8")

    @classmethod
    def from_yaml(cls, path: Path | str) -> "AdapterConfig":
        doc = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        return cls(**doc)


def load_adapters(directory: Path | str) -> list[AdapterConfig]:
    """All adapter configs under a directory, sorted by platform id."""
    configs = [AdapterConfig.from_yaml(p) for p in sorted(Path(directory).glob("*.yaml"))]
    return sorted(configs, key=lambda c: c.platform_id)


def resolve_pointer(doc: Any, pointer: str) -> Any:
    """Minimal RFC 6901 JSON pointer lookup."""
    if pointer in ("", "/"):
        return doc
    for token in pointer.lstrip("/").split("/"):
        token = token.replace("~1", "/").replace("~0", "~")
        if isinstance(doc, list):
            doc = doc[int(token)]
        else:
            doc = doc[token]
    return doc


class _ItemHTMLParser(HTMLParser):
    """Collects data-field spans inside class="item" elements."""

    def __init__(self):
        super().__init__()
        self.items: list[dict[str, str]] = []
        self._depth = 0
        self._item_depth: int | None = None
        self._current: dict[str, str] | None = None
        self._field: str | None = None
        self._text: list[str] = []

    def handle_starttag(self, tag, attrs):
        self._depth += 1
        attrs = dict(attrs)
        classes = (attrs.get("class") or "").split()
        if self._item_depth is None and "item" in classes:
            self._item_depth = self._depth
            self._current = {}
        elif self._current is not None and "data-field" in attrs and self._field is None:
            self._field = attrs["data-field"]
            self._text = []

    def handle_endtag(self, tag):
        if self._field is not None:
            self._current[self._field] = "".join(self._text)
            self._field = None
        if self._item_depth is not None and self._depth == self._item_depth:
            self.items.append(self._current)
            self._current = None
            self._item_depth = None
        self._depth -= 1

    def handle_data(self, data):
        if self._field is not None:
            self._text.append(data)


def _extract_items(adapter: AdapterConfig, response: httpx.Response) -> list[dict]:
    if adapter.payload_kind == "json":
        items = resolve_pointer(response.json(), adapter.items_pointer)
        if not isinstance(items, list):
            raise IngestError(
                f"items pointer {adapter.items_pointer!r} did not yield a list",
                platform_id=adapter.platform_id,
                retryable=False,
            )
        return items
    parser = _ItemHTMLParser()
    parser.feed(response.text)
    return parser.items


def _select(adapter: AdapterConfig, selectors: dict[str, str], item: dict, name: str):
    selector = selectors.get(name)
    if selector is None:
        return None
    if adapter.payload_kind == "json":
        return resolve_pointer(item, selector)
    value = item.get(selector)
    return value if value != "" else None


class _SkipItem(Exception):
    pass


def _parse_posting(adapter: AdapterConfig, item: dict, fetched_at: datetime) -> VacancyPosting:
    try:
        posting_id = _select(adapter, adapter.field_selectors, item, "posting_id")
        raw_posted = _select(adapter, adapter.field_selectors, item, "posted_at")
        if not posting_id or not raw_posted:
            raise _SkipItem()
        posted_at = parse_ts(str(raw_posted))
    except (_SkipItem, KeyError, IndexError, ValueError, TypeError):
        raise _SkipItem() from None
    if posted_at > fetched_at + _FUTURE_TOLERANCE:
        raise _SkipItem()
    category = _select(adapter, adapter.field_selectors, item, "native_category")
    country = _select(adapter, adapter.field_selectors, item, "buyer_country")
    title = _select(adapter, adapter.field_selectors, item, "title")
    return VacancyPosting(
        platform_id=adapter.platform_id,
        posting_id=str(posting_id),
        posted_at=posted_at,
        native_category=str(category) if category is not None else "",
        buyer_country=normalize_country(str(country)) if country is not None else "ZZ",
        title=str(title) if title is not None else "",
        fetched_at=max(fetched_at, posted_at),
    )


def _parse_profile(adapter: AdapterConfig, item: dict) -> WorkerObservation:
    try:
        worker_id = _select(adapter, adapter.profile_selectors, item, "worker_id")
        raw_observed = _select(adapter, adapter.profile_selectors, item, "observed_at")
        if not worker_id or not raw_observed:
            raise _SkipItem()
        observed_at = parse_ts(str(raw_observed))
    except (_SkipItem, KeyError, IndexError, ValueError, TypeError):
        raise _SkipItem() from None
    country = _select(adapter, adapter.profile_selectors, item, "country")
    name = _select(adapter, adapter.profile_selectors, item, "given_name")
    category = _select(adapter, adapter.profile_selectors, item, "native_category")
    return WorkerObservation(
        platform_id=adapter.platform_id,
        worker_id=str(worker_id),
        country=normalize_country(str(country)) if country is not None else "ZZ",
        observed_at=observed_at,
        given_name=str(name) if name else None,
        native_category=str(category) if category else None,
    )


def _get_page(client: httpx.Client, url: str, platform_id: str) -> httpx.Response:
    last_error: Exception | None = None
    for attempt in range(_RETRIES + 1):
        try:
            response = client.get(url)
        except httpx.HTTPError as exc:
            last_error = exc
            time.sleep(0.05 * (attempt + 1))
            continue
        if response.status_code >= 500:
            last_error = IngestError(
                f"{url} returned {response.status_code}", platform_id, retryable=True
            )
            time.sleep(0.05 * (attempt + 1))
            continue
        if response.status_code >= 400:
            raise IngestError(f"{url} returned {response.status_code}", platform_id, retryable=False)
        return response
    raise IngestError(f"fetch failed for {url}: {last_error}", platform_id, retryable=True)


@dataclass
class FetchResult:
    postings: list[VacancyPosting] = field(default_factory=list)
    workers: list[WorkerObservation] = field(default_factory=list)
    skipped: int = 0
    pages: int = 0


def fetch_new_postings(
    adapter: AdapterConfig,
    since: datetime,
    client: httpx.Client | None = None,
) -> FetchResult:
    """All postings with posted_at >= since, newest-first pagination.

    Stops once a page parses entirely older than ``since``; single-item
    parse failures are skipped and counted. No dedup happens here.
    """
    own = client is None
    client = client or httpx.Client(timeout=30.0)
    result = FetchResult()
    try:
        page = 1
        while True:
            response = _get_page(client, adapter.list_url(page), adapter.platform_id)
            items = _extract_items(adapter, response)
            result.pages += 1
            if not items:
                break
            fetched_at = datetime.now(timezone.utc)
            newest_parsed: datetime | None = None
            for item in items:
                try:
                    posting = _parse_posting(adapter, item, fetched_at)
                except _SkipItem:
                    result.skipped += 1
                    continue
                if newest_parsed is None or posting.posted_at > newest_parsed:
                    newest_parsed = posting.posted_at
                if posting.posted_at >= since:
                    result.postings.append(posting)
            if newest_parsed is not None and newest_parsed < since:
                break  # page yields only older items
            page += 1
            if adapter.politeness_delay_ms:
                time.sleep(adapter.politeness_delay_ms / 1000.0)
    finally:
        if own:
            client.close()
    return result


def fetch_worker_profiles(
    adapter: AdapterConfig,
    sample_size: int,
    seed: int,
    client: httpx.Client | None = None,
) -> FetchResult:
    """Up to sample_size profiles by seeded uniform sampling of the listing."""
    if sample_size < 1:
        raise ValueError("sample_size must be positive")
    own = client is None
    client = client or httpx.Client(timeout=30.0)
    result = FetchResult()
    everyone: list[WorkerObservation] = []
    try:
        page = 1
        while True:
            response = _get_page(client, adapter.profile_url(page), adapter.platform_id)
            items = _extract_items(adapter, response)
            result.pages += 1
            if not items:
                break
            for item in items:
                try:
                    everyone.append(_parse_profile(adapter, item))
                except _SkipItem:
                    result.skipped += 1
            page += 1
            if adapter.politeness_delay_ms:
                time.sleep(adapter.politeness_delay_ms / 1000.0)
    finally:
        if own:
            client.close()
    if len(everyone) <= sample_size:
        result.workers = everyone
    else:
        result.workers = random.Random(seed).sample(everyone, sample_size)
    return result
