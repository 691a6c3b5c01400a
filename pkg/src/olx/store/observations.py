"""Append-only JSONL stores for postings and worker observations.

One file per platform per UTC day. Appends are buffered into a single
write per file and fsynced before returning, so a receipt means the rows
are durable. The read side presents a deduplicated view keyed by record
identity: a crash between append and watermark advance can leave a
replayed line in a file, but it can never double a count.
"""

from __future__ import annotations

import io
import os
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Iterator

import pandas as pd

from ..errors import StoreError
from ..records import VacancyPosting, WorkerObservation
from .layout import DataLayout


@dataclass(frozen=True)
class AppendReceipt:
    """What one append call durably wrote."""

    kind: str
    rows_per_platform: dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.rows_per_platform.values())


class ObservationStore:
    def __init__(self, layout: DataLayout):
        self.layout = layout.ensure()

    # -- write side ---------------------------------------------------

    def _append_lines(self, path: Path, lines: list[str]) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = "".join(line + "\n" for line in lines)
        try:
            with open(path, "a", encoding="utf-8") as f:
                f.write(payload)
                f.flush()
                os.fsync(f.fileno())
        except OSError as exc:
            raise StoreError(f"append to {path} failed: {exc}") from exc

    def append_postings(self, batch: Iterable[VacancyPosting]) -> AppendReceipt:
        by_file: dict[tuple[str, date], list[str]] = defaultdict(list)
        for p in batch:
            by_file[(p.platform_id, p.posted_at.date())].append(p.to_json_line())
        rows: dict[str, int] = defaultdict(int)
        for (platform_id, day), lines in sorted(by_file.items()):
            self._append_lines(self.layout.day_file("postings", platform_id, day), lines)
            rows[platform_id] += len(lines)
        return AppendReceipt(kind="postings", rows_per_platform=dict(rows))

    def append_workers(self, batch: Iterable[WorkerObservation]) -> AppendReceipt:
        by_file: dict[tuple[str, date], list[str]] = defaultdict(list)
        for w in batch:
            by_file[(w.platform_id, w.observed_at.date())].append(w.to_json_line())
        rows: dict[str, int] = defaultdict(int)
        for (platform_id, day), lines in sorted(by_file.items()):
            self._append_lines(self.layout.day_file("workers", platform_id, day), lines)
            rows[platform_id] += len(lines)
        return AppendReceipt(kind="workers", rows_per_platform=dict(rows))

    # -- read side ----------------------------------------------------

    def _day_files(
        self,
        kind: str,
        date_range: tuple[date, date] | None,
        platforms: Iterable[str] | None,
    ) -> list[tuple[date, Path]]:
        base = {"postings": self.layout.postings_dir, "workers": self.layout.workers_dir}[kind]
        if not base.exists():
            return []
        wanted = set(platforms) if platforms is not None else None
        found: list[tuple[date, Path]] = []
        for platform_dir in sorted(base.iterdir()):
            if not platform_dir.is_dir():
                continue
            if wanted is not None and platform_dir.name not in wanted:
                continue
            for f in sorted(platform_dir.glob("*.jsonl")):
                day = date.fromisoformat(f.stem)
                if date_range is not None and not (date_range[0] <= day <= date_range[1]):
                    continue
                found.append((day, f))
        found.sort(key=lambda pair: (pair[0], pair[1]))
        return found

    def read_postings(
        self,
        date_range: tuple[date, date] | None = None,
        platforms: Iterable[str] | None = None,
    ) -> Iterator[VacancyPosting]:
        """Postings in posted_at order, duplicate identities dropped."""
        seen: set[tuple[str, str]] = set()
        for _, path in self._day_files("postings", date_range, platforms):
            day_batch = []
            with open(path, encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        day_batch.append(VacancyPosting.from_json_line(line))
            day_batch.sort(key=lambda p: (p.posted_at, p.platform_id, p.posting_id))
            for p in day_batch:
                if p.key not in seen:
                    seen.add(p.key)
                    yield p

    def read_workers(
        self,
        date_range: tuple[date, date] | None = None,
        platforms: Iterable[str] | None = None,
    ) -> Iterator[WorkerObservation]:
        """Worker observations in observed_at order, one per worker per day."""
        seen: set[tuple[str, str, date]] = set()
        for day, path in self._day_files("workers", date_range, platforms):
            day_batch = []
            with open(path, encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        day_batch.append(WorkerObservation.from_json_line(line))
            day_batch.sort(key=lambda w: (w.observed_at, w.platform_id, w.worker_id))
            for w in day_batch:
                key = (w.platform_id, w.worker_id, day)
                if key not in seen:
                    seen.add(key)
                    yield w

    def _read_frame(
        self,
        kind: str,
        date_range: tuple[date, date] | None,
        platforms: Iterable[str] | None,
        id_field: str,
    ) -> pd.DataFrame:
        """Parse many small day files in one pass per platform.

        File contents are concatenated and handed to the JSON-lines parser
        once per platform; per-file parser overhead would otherwise
        dominate at thousands of day files.
        """
        by_platform: dict[str, list[Path]] = defaultdict(list)
        for _, path in self._day_files(kind, date_range, platforms):
            by_platform[path.parent.name].append(path)
        parts = []
        for platform_id in sorted(by_platform):
            chunks = [p.read_text(encoding="utf-8") for p in by_platform[platform_id]]
            text = "".join(chunks)
            if not text.strip():
                continue
            parts.append(pd.read_json(io.StringIO(text), lines=True, dtype={id_field: str}))
        if not parts:
            return pd.DataFrame()
        return pd.concat(parts, ignore_index=True)

    def read_postings_frame(
        self,
        date_range: tuple[date, date] | None = None,
        platforms: Iterable[str] | None = None,
    ) -> pd.DataFrame:
        """Bulk read into a frame (columns as the wire format), deduplicated."""
        frame = self._read_frame("postings", date_range, platforms, "posting_id")
        if frame.empty:
            return pd.DataFrame(
                columns=["platform_id", "posting_id", "posted_at", "native_category",
                         "buyer_country", "title", "fetched_at"]
            )
        frame["posted_at"] = pd.to_datetime(frame["posted_at"], utc=True)
        frame = frame.drop_duplicates(["platform_id", "posting_id"], keep="first")
        return frame.reset_index(drop=True)

    def read_workers_frame(
        self,
        date_range: tuple[date, date] | None = None,
        platforms: Iterable[str] | None = None,
    ) -> pd.DataFrame:
        frame = self._read_frame("workers", date_range, platforms, "worker_id")
        if frame.empty:
            return pd.DataFrame(
                columns=["platform_id", "worker_id", "country", "observed_at",
                         "given_name", "native_category"]
            )
        frame["observed_at"] = pd.to_datetime(frame["observed_at"], utc=True)
        frame["observed_day"] = frame["observed_at"].dt.date
        frame = frame.drop_duplicates(["platform_id", "worker_id", "observed_day"], keep="first")
        return frame.reset_index(drop=True)

    def posting_counts(self) -> dict[tuple[str, date], int]:
        """Per (platform, day) distinct posting counts (conservation checks)."""
        frame = self.read_postings_frame()
        if frame.empty:
            return {}
        day = frame["posted_at"].dt.date
        grouped = frame.groupby([frame["platform_id"], day]).size()
        return {(pid, d): int(n) for (pid, d), n in grouped.items()}
