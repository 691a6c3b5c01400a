"""Per-platform high-water timestamps for ingested postings.

A watermark only ever moves forward; advancing writes via temp-file
rename so a crash can never leave a torn value.
"""

from __future__ import annotations

import os
from datetime import datetime
from pathlib import Path

from ..errors import StoreError
from ..records import format_ts, parse_ts
from .layout import DataLayout


class WatermarkStore:
    def __init__(self, layout: DataLayout):
        self._dir = layout.ensure().watermarks_dir

    def _path(self, platform_id: str) -> Path:
        return self._dir / f"{platform_id}.txt"

    def get(self, platform_id: str) -> datetime | None:
        path = self._path(platform_id)
        if not path.exists():
            return None
        return parse_ts(path.read_text(encoding="utf-8").strip())

    def advance(self, platform_id: str, candidate: datetime) -> datetime:
        """Move the watermark forward to `candidate` if that is later.

        Returns the effective watermark after the call.
        """
        current = self.get(platform_id)
        if current is not None and candidate <= current:
            return current
        path = self._path(platform_id)
        tmp = path.with_suffix(".tmp")
        try:
            tmp.write_text(format_ts(candidate) + "\n", encoding="utf-8")
            os.replace(tmp, path)
        except OSError as exc:
            raise StoreError(f"watermark write for {platform_id} failed: {exc}") from exc
        return candidate

    def all(self) -> dict[str, datetime]:
        return {
            f.stem: parse_ts(f.read_text(encoding="utf-8").strip())
            for f in sorted(self._dir.glob("*.txt"))
        }
