"""Statistical gender inference from given names and participation shares.

A name-frequency table (per country, with a global fallback) turns a
given name into a female-probability estimate; clear cases are labelled,
borderline ones stay unknown. Shares are always reported together with
coverage, because the unlabelled remainder is part of the answer.
"""

from __future__ import annotations

import csv
import unicodedata
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable

import pandas as pd

from .index.shares import build_worker_frame
from .records import WorkerObservation
from .taxonomy import PlatformRegistry, _data_path

GLOBAL_COUNTRY = "ALL"
FEMALE_THRESHOLD = 0.6
MALE_THRESHOLD = 0.4


def normalize_name(raw: str | None) -> str:
    """Lowercase, trim, strip diacritics, keep the first token only."""
    if not raw:
        return ""
    text = unicodedata.normalize("NFKD", raw)
    text = "".join(ch for ch in text if not unicodedata.combining(ch))
    tokens = text.casefold().split()
    return tokens[0] if tokens else ""


@dataclass(frozen=True)
class GenderEstimate:
    label: str  # "female" | "male" | "unknown"
    p_female: float | None
    source: str  # "country" | "global" | "none"


_NO_ESTIMATE = GenderEstimate(label="unknown", p_female=None, source="none")


class NameGenderTable:
    """(name, country) -> observed female/male counts, with an ALL fallback."""

    def __init__(self, records: Iterable[tuple[str, str, int, int]]):
        self._records: dict[tuple[str, str], tuple[int, int]] = {}
        for name, country, female, male in records:
            key = (normalize_name(name), country.strip().upper())
            if not key[0]:
                raise ValueError("name table rows need a non-empty name")
            if key in self._records:
                raise ValueError(f"duplicate name table row {key}")
            if female < 0 or male < 0 or female + male < 1:
                raise ValueError(f"row {key} needs female_count + male_count >= 1")
            self._records[key] = (female, male)

    def __len__(self) -> int:
        return len(self._records)

    def rows(self) -> list[tuple[str, str, int, int]]:
        return [(n, c, f, m) for (n, c), (f, m) in sorted(self._records.items())]

    @classmethod
    def from_csv(cls, path: Path | str) -> "NameGenderTable":
        with open(path, encoding="utf-8", newline="") as f:
            return cls(
                (row["name"], row["country"], int(row["female_count"]), int(row["male_count"]))
                for row in csv.DictReader(f)
            )

    @classmethod
    def default(cls) -> "NameGenderTable":
        """The synthetic fixture table shipped with the package."""
        return cls.from_csv(_data_path("name_table.csv"))

    def lookup(self, name: str, country: str) -> tuple[tuple[int, int], str] | None:
        key = normalize_name(name)
        if not key:
            return None
        hit = self._records.get((key, country))
        if hit is not None:
            return hit, "country"
        hit = self._records.get((key, GLOBAL_COUNTRY))
        if hit is not None:
            return hit, "global"
        return None


def infer_gender(
    given_name: str | None,
    country: str,
    table: NameGenderTable,
    female_threshold: float = FEMALE_THRESHOLD,
    male_threshold: float = MALE_THRESHOLD,
) -> GenderEstimate:
    """Estimate gender for one given name and country of origin.

    Country-specific rows win over global ones. Probabilities inside the
    (male_threshold, female_threshold) band stay unknown rather than
    forcing a coin-flip label. Total function: no table hit, no name, no
    error — just unknown.
    """
    found = table.lookup(given_name or "", country)
    if found is None:
        return _NO_ESTIMATE
    (female, male), source = found
    p_female = female / (female + male)
    if p_female >= female_threshold:
        label = "female"
    elif p_female <= male_threshold:
        label = "male"
    else:
        label = "unknown"
    return GenderEstimate(label=label, p_female=p_female, source=source)


@dataclass(frozen=True)
class GenderShareRow:
    """Female share among classified workers of one group, with coverage."""

    group: tuple[str, ...]
    share_female: float | None
    classified: int
    coverage: float
    female: int
    male: int
    unknown: int
    total: int


GROUP_MODES = ("none", "country", "occupation", "country_occupation")


def label_workers(
    workers: Iterable[WorkerObservation] | pd.DataFrame,
    table: NameGenderTable,
    registry: PlatformRegistry | None = None,
) -> pd.DataFrame:
    """Worker frame with a ``gender_label`` column from name inference."""
    frame = build_worker_frame(workers, registry)
    if frame.empty:
        frame = frame.copy()
        frame["gender_label"] = pd.Series(dtype=str)
        return frame
    names = frame["given_name"].fillna("")
    unique = {
        (n, c): infer_gender(n, c, table).label
        for n, c in set(zip(names, frame["country"]))
    }
    frame = frame.copy()
    frame["gender_label"] = [unique[k] for k in zip(names, frame["country"])]
    return frame


def female_share(
    workers: Iterable[WorkerObservation] | pd.DataFrame,
    table: NameGenderTable | None,
    group_by: str = "none",
    window: tuple[date, date] | None = None,
    registry: PlatformRegistry | None = None,
) -> dict[tuple[str, ...], GenderShareRow]:
    """Female share per group over distinct workers in a date window.

    Unknowns are excluded from the share but stay in the denominator of
    ``coverage``; a group with zero classified workers reports coverage
    with an absent share. The table may be omitted only for frames that
    already carry a ``gender_label`` column.
    """
    if group_by not in GROUP_MODES:
        raise ValueError(f"group_by must be one of {GROUP_MODES}")
    if isinstance(workers, pd.DataFrame) and "gender_label" in workers.columns:
        frame = workers
    else:
        if table is None:
            raise ValueError("a name table is required to label this worker stream")
        frame = label_workers(workers, table, registry)
    if window is not None and not frame.empty:
        start, end = window
        frame = frame[(frame["observed_day"] >= start) & (frame["observed_day"] <= end)]
    if frame.empty:
        return {}
    distinct = (
        frame.sort_values("observed_day").drop_duplicates(["platform_id", "worker_id"], keep="last")
    )

    group_cols = {
        "none": [],
        "country": ["country"],
        "occupation": ["category"],
        "country_occupation": ["country", "category"],
    }[group_by]

    out: dict[tuple[str, ...], GenderShareRow] = {}
    grouped = [((), distinct)] if not group_cols else [
        ((key,) if isinstance(key, str) else tuple(key), g)
        for key, g in distinct.groupby(group_cols)
    ]
    for key, g in grouped:
        counts = g["gender_label"].value_counts()
        female = int(counts.get("female", 0))
        male = int(counts.get("male", 0))
        unknown = int(counts.get("unknown", 0))
        total = female + male + unknown
        classified = female + male
        out[key] = GenderShareRow(
            group=key,
            share_female=(female / classified) if classified else None,
            classified=classified,
            coverage=classified / total if total else 0.0,
            female=female,
            male=male,
            unknown=unknown,
            total=total,
        )
    return out
