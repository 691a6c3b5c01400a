"""Directory layout of one observatory data root.

    postings/<platform_id>/<YYYY-MM-DD>.jsonl
    workers/<platform_id>/<YYYY-MM-DD>.jsonl
    state/seen/<platform_id>.tsv
    state/watermarks/<platform_id>.txt
    snapshots/<id>/...          (immutable once published)
"""

from __future__ import annotations

import os
from datetime import date
from pathlib import Path


class DataLayout:
    def __init__(self, root: Path | str):
        self.root = Path(root)

    def ensure(self) -> "DataLayout":
        for d in (
            self.postings_dir,
            self.workers_dir,
            self.seen_dir,
            self.worker_seen_dir,
            self.watermarks_dir,
            self.snapshots_dir,
        ):
            d.mkdir(parents=True, exist_ok=True)
        return self

    @classmethod
    def from_env(cls, explicit: Path | str | None = None) -> "DataLayout":
        """Resolve the data root: explicit path, else $OLX_DATA_DIR, else ./olx-data."""
        root = explicit or os.environ.get("OLX_DATA_DIR") or "olx-data"
        return cls(root)

    @property
    def postings_dir(self) -> Path:
        return self.root / "postings"

    @property
    def workers_dir(self) -> Path:
        return self.root / "workers"

    @property
    def seen_dir(self) -> Path:
        return self.root / "state" / "seen"

    @property
    def worker_seen_dir(self) -> Path:
        return self.root / "state" / "seen_workers"

    @property
    def watermarks_dir(self) -> Path:
        return self.root / "state" / "watermarks"

    @property
    def snapshots_dir(self) -> Path:
        return self.root / "snapshots"

    @property
    def rebuild_lock_path(self) -> Path:
        return self.root / "state" / "rebuild.lock"

    def day_file(self, kind: str, platform_id: str, day: date) -> Path:
        base = {"postings": self.postings_dir, "workers": self.workers_dir}[kind]
        return base / platform_id / f"{day.isoformat()}.jsonl"
