"""Read-only HTTP API over published snapshots."""

from .app import create_app
from .state import SnapshotCache, SnapshotData

__all__ = ["SnapshotCache", "SnapshotData", "create_app"]
