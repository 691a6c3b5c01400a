"""Durable flat-file persistence: observations, seen IDs, watermarks, snapshots."""

from .layout import DataLayout
from .observations import AppendReceipt, ObservationStore
from .seen import SeenStore
from .snapshots import SnapshotCatalog, SnapshotHandle
from .watermarks import WatermarkStore

__all__ = [
    "AppendReceipt",
    "DataLayout",
    "ObservationStore",
    "SeenStore",
    "SnapshotCatalog",
    "SnapshotHandle",
    "WatermarkStore",
]
