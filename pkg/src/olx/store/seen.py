"""Persistent set of already-ingested posting identities.

insert-if-absent is atomic with respect to concurrent callers; durability
happens at flush(), which the crawl driver calls right after the matching
postings are on disk. Entries older than the retention horizon (measured
in data time, not wall time) are pruned on load; watermarking guarantees
such IDs can never be re-offered as new.
"""

from __future__ import annotations

import threading
from collections import defaultdict
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable

from ..errors import StoreError
from .layout import DataLayout

RETENTION_DAYS = 400


class SeenStore:
    def __init__(
        self,
        layout: DataLayout,
        retention_days: int = RETENTION_DAYS,
        kind: str = "postings",
    ):
        layout.ensure()
        self._dir = {"postings": layout.seen_dir, "workers": layout.worker_seen_dir}[kind]
        self._retention = retention_days
        self._lock = threading.Lock()
        self._seen: dict[str, dict[str, date]] = defaultdict(dict)
        self._pending: dict[str, list[tuple[str, date]]] = defaultdict(list)
        self._load()

    def _path(self, platform_id: str) -> Path:
        return self._dir / f"{platform_id}.tsv"

    def _load(self) -> None:
        newest: date | None = None
        for f in sorted(self._dir.glob("*.tsv")):
            platform = f.stem
            with open(f, encoding="utf-8") as fh:
                for line in fh:
                    line = line.rstrip("\n")
                    if not line:
                        continue
                    posting_id, day_str = line.split("\t")
                    day = date.fromisoformat(day_str)
                    self._seen[platform][posting_id] = day
                    newest = day if newest is None else max(newest, day)
        if newest is not None:
            horizon = newest - timedelta(days=self._retention)
            for platform, ids in self._seen.items():
                self._seen[platform] = {p: d for p, d in ids.items() if d >= horizon}

    def __len__(self) -> int:
        return sum(len(ids) for ids in self._seen.values())

    def __contains__(self, key: tuple[str, str]) -> bool:
        platform_id, posting_id = key
        return posting_id in self._seen.get(platform_id, {})

    def insert_if_absent(
        self, keys: Iterable[tuple[str, str]], seen_day: date
    ) -> set[tuple[str, str]]:
        """Insert keys not yet present; returns exactly the newly inserted."""
        inserted: set[tuple[str, str]] = set()
        with self._lock:
            for platform_id, posting_id in keys:
                ids = self._seen[platform_id]
                if posting_id in ids:
                    continue
                ids[posting_id] = seen_day
                self._pending[platform_id].append((posting_id, seen_day))
                inserted.add((platform_id, posting_id))
        return inserted

    def flush(self) -> None:
        """Append pending inserts to the per-platform files."""
        with self._lock:
            pending, self._pending = self._pending, defaultdict(list)
        for platform_id, rows in pending.items():
            if not rows:
                continue
            path = self._path(platform_id)
            try:
                with open(path, "a", encoding="utf-8") as f:
                    f.write("".join(f"{pid}\t{day.isoformat()}\n" for pid, day in rows))
                    f.flush()
            except OSError as exc:
                raise StoreError(f"seen-store flush to {path} failed: {exc}") from exc

    def rebuild_from_postings(self, store) -> int:
        """Recovery: repopulate from the posting files themselves."""
        total = 0
        with self._lock:
            self._seen.clear()
            self._pending.clear()
        for p in store.read_postings():
            self.insert_if_absent([p.key], p.posted_at.date())
            total += 1
        for f in self._dir.glob("*.tsv"):
            f.unlink()
        self.flush()
        return total
