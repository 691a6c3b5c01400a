"""Canonical CSV codecs for published artifacts.

All exports are UTF-8 with LF line endings, ISO-8601 dates and dot
decimal separators; every writer here is the single source of CSV bytes
for both the files inside a snapshot and the HTTP export endpoint.
"""

from __future__ import annotations

import csv
import io
from datetime import date
from typing import Iterable, Mapping

from .demographics import GenderShareRow
from .index.series import ChainLinkEvent
from .index.shares import ShareTable


def _writer(buffer: io.StringIO) -> "csv.writer":
    return csv.writer(buffer, lineterminator="\n")


def series_csv(points: Mapping[date, float]) -> str:
    """`date,value` rows, values with 6 decimal places."""
    buffer = io.StringIO()
    w = _writer(buffer)
    w.writerow(["date", "value"])
    for d, v in points.items():
        w.writerow([d.isoformat(), f"{v:.6f}"])
    return buffer.getvalue()


def parse_series_csv(text: str) -> dict[date, float]:
    reader = csv.DictReader(io.StringIO(text))
    return {date.fromisoformat(r["date"]): float(r["value"]) for r in reader}


def share_csv(table: ShareTable) -> str:
    """`as_of,axis,key,share,denominator` rows, keys sorted."""
    buffer = io.StringIO()
    w = _writer(buffer)
    w.writerow(["as_of", "axis", "key", "share", "denominator"])
    for key in sorted(table.shares):
        w.writerow(
            [table.as_of.isoformat(), table.axis, key, f"{table.shares[key]:.6f}", table.denominator]
        )
    return buffer.getvalue()


def link_events_csv(events: Iterable[ChainLinkEvent]) -> str:
    """`link_date,platforms_added,link_factor` rows; platform sets pipe-joined."""
    buffer = io.StringIO()
    w = _writer(buffer)
    w.writerow(["link_date", "platforms_added", "link_factor"])
    for event in events:
        w.writerow(
            [
                event.link_date.isoformat(),
                "|".join(sorted(event.platforms_added)),
                f"{event.link_factor:.10g}",
            ]
        )
    return buffer.getvalue()


def gender_csv(rows: Mapping[tuple[str, ...], GenderShareRow], group_by: str) -> str:
    """Grouped female shares with coverage; empty cells where not grouped."""
    buffer = io.StringIO()
    w = _writer(buffer)
    w.writerow(["country", "occupation", "share_female", "classified", "coverage"])
    for key in sorted(rows):
        row = rows[key]
        country = occupation = ""
        if group_by == "country":
            (country,) = key
        elif group_by == "occupation":
            (occupation,) = key
        elif group_by == "country_occupation":
            country, occupation = key
        w.writerow(
            [
                country,
                occupation,
                "" if row.share_female is None else f"{row.share_female:.6f}",
                row.classified,
                f"{row.coverage:.6f}",
            ]
        )
    return buffer.getvalue()
