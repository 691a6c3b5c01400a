"""Immutable published snapshots with an atomically switched pointer.

A snapshot is a directory of artifact files plus a manifest. Publishing
stages everything in a hidden directory, renames it into place, then
flips the CURRENT pointer; readers either see the previous snapshot or
the complete new one, never a torn mix.
"""

from __future__ import annotations

import json
import os
import shutil
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from ..errors import SnapshotError
from .layout import DataLayout

CURRENT_POINTER = "CURRENT"
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class SnapshotHandle:
    snapshot_id: int
    path: Path

    @property
    def manifest(self) -> dict:
        return json.loads((self.path / MANIFEST_NAME).read_text(encoding="utf-8"))

    def file(self, name: str) -> Path:
        p = self.path / name
        if not p.exists():
            raise SnapshotError(f"snapshot {self.snapshot_id} has no artifact {name!r}")
        return p


class SnapshotCatalog:
    def __init__(self, layout: DataLayout):
        self._dir = layout.ensure().snapshots_dir

    def _ids(self) -> list[int]:
        return sorted(
            int(p.name) for p in self._dir.iterdir() if p.is_dir() and p.name.isdigit()
        )

    def next_id(self) -> int:
        ids = self._ids()
        return (ids[-1] + 1) if ids else 1

    def publish(self, writer: Callable[[Path], dict], provenance: dict | None = None) -> int:
        """Publish a new snapshot; all-or-nothing.

        ``writer`` receives the staging directory, writes every artifact
        file, and returns extra manifest entries. Any exception aborts the
        publish with the staging directory removed.
        """
        snapshot_id = self.next_id()
        staging = self._dir / f".staging-{snapshot_id}"
        if staging.exists():
            shutil.rmtree(staging)
        staging.mkdir(parents=True)
        try:
            extra = writer(staging) or {}
            manifest = {
                "snapshot_id": snapshot_id,
                "created_at": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
                "provenance": provenance or {},
                **extra,
            }
            (staging / MANIFEST_NAME).write_text(
                json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
            final = self._dir / str(snapshot_id)
            os.replace(staging, final)
        except Exception:
            shutil.rmtree(staging, ignore_errors=True)
            raise
        self._set_current(snapshot_id)
        return snapshot_id

    def _set_current(self, snapshot_id: int) -> None:
        pointer = self._dir / CURRENT_POINTER
        tmp = self._dir / f".{CURRENT_POINTER}.tmp"
        tmp.write_text(f"{snapshot_id}\n", encoding="utf-8")
        os.replace(tmp, pointer)

    def current_id(self) -> int | None:
        pointer = self._dir / CURRENT_POINTER
        if not pointer.exists():
            return None
        raw = pointer.read_text(encoding="utf-8").strip()
        return int(raw) if raw else None

    def get(self, snapshot_id: int | None = None) -> SnapshotHandle:
        """Fetch one snapshot; None means the latest published."""
        if snapshot_id is None:
            snapshot_id = self.current_id()
            if snapshot_id is None:
                raise SnapshotError("no snapshot has been published yet")
        path = self._dir / str(snapshot_id)
        if not path.is_dir():
            raise SnapshotError(f"snapshot {snapshot_id} does not exist")
        return SnapshotHandle(snapshot_id=snapshot_id, path=path)

    def list_ids(self) -> list[int]:
        return self._ids()
