"""Canonical vocabularies and the platform crosswalk.

Occupation categories, language domains and ISO country codes are the
fixed coordinate system every other module counts against. Platform-native
category labels are mapped onto the six substantive occupation categories
(plus ``unclassified``) through per-platform crosswalk data files, so new
platforms are a data change, not a code change.
"""

from __future__ import annotations

import csv
import enum
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import RegistryError


class OccupationCategory(str, enum.Enum):
    """The six occupation domains plus the unclassified bucket."""

    SOFTWARE_DEV_TECH = "software_dev_tech"
    CREATIVE_MULTIMEDIA = "creative_multimedia"
    WRITING_TRANSLATION = "writing_translation"
    CLERICAL_DATA_ENTRY = "clerical_data_entry"
    SALES_MARKETING_SUPPORT = "sales_marketing_support"
    PROFESSIONAL_SERVICES = "professional_services"
    UNCLASSIFIED = "unclassified"


SUBSTANTIVE_CATEGORIES: tuple[OccupationCategory, ...] = tuple(
    c for c in OccupationCategory if c is not OccupationCategory.UNCLASSIFIED
)


class LanguageDomain(str, enum.Enum):
    EN = "EN"
    ES = "ES"
    RU = "RU"


#: Sentinel for a country that could not be resolved.
UNKNOWN_COUNTRY = "ZZ"


def _data_path(name: str) -> Path:
    return Path(str(resources.files("olx").joinpath("data", name)))


def _fold(text: str) -> str:
    """Normalization key: casefold, strip diacritics, squash punctuation."""
    text = unicodedata.normalize("NFKD", text)
    text = "".join(ch for ch in text if not unicodedata.combining(ch))
    text = "".join(ch if ch.isalnum() else " " for ch in text.casefold())
    return " ".join(text.split())


def _load_country_tables() -> tuple[frozenset[str], dict[str, str], dict[str, str], dict[str, str]]:
    alpha2: set[str] = set()
    alpha3: dict[str, str] = {}
    names: dict[str, str] = {}
    display: dict[str, str] = {}
    with open(_data_path("countries.csv"), encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            code = row["alpha2"]
            alpha2.add(code)
            alpha3[row["alpha3"]] = code
            names[_fold(row["name"])] = code
            display[code] = row["name"]
            for alias in row["aliases"].split("|"):
                if alias:
                    names[_fold(alias)] = code
    return frozenset(alpha2), alpha3, names, display


_ALPHA2, _ALPHA3, _COUNTRY_NAMES, _CODE_TO_NAME = _load_country_tables()


def country_name(code: str) -> str:
    """English short name for an alpha-2 code; the code itself if unknown."""
    return _CODE_TO_NAME.get(code, code)


def is_known_country(code: str) -> bool:
    """True for assigned ISO alpha-2 codes and the ZZ sentinel."""
    return code == UNKNOWN_COUNTRY or code in _ALPHA2


def normalize_country(raw: str | None) -> str:
    """Map a free-form country string to an ISO alpha-2 code.

    Accepts alpha-2/alpha-3 codes, English short names and common
    aliases. Anything unresolvable maps to the ``ZZ`` sentinel; the
    function never raises.
    """
    if raw is None:
        return UNKNOWN_COUNTRY
    token = raw.strip()
    if not token:
        return UNKNOWN_COUNTRY
    upper = token.upper()
    if len(upper) == 2 and upper in _ALPHA2:
        return upper
    if upper == UNKNOWN_COUNTRY:
        return UNKNOWN_COUNTRY
    if len(upper) == 3 and upper in _ALPHA3:
        return _ALPHA3[upper]
    return _COUNTRY_NAMES.get(_fold(token), UNKNOWN_COUNTRY)


@dataclass(frozen=True)
class Platform:
    """One registered platform: identity plus its language domain."""

    platform_id: str
    display_name: str
    language_domain: LanguageDomain


class PlatformRegistry:
    """Registered platforms and their native-label crosswalks.

    Read-only after construction; safe for unrestricted concurrent reads.
    Crosswalk labels are matched case-insensitively after whitespace
    trimming, and a label miss degrades to ``unclassified`` so one odd
    platform label can never halt a crawl.
    """

    def __init__(
        self,
        platforms: Iterable[Platform],
        crosswalk: Iterable[tuple[str, str, OccupationCategory]] = (),
    ):
        self._platforms: dict[str, Platform] = {}
        for p in platforms:
            if p.platform_id in self._platforms:
                raise RegistryError(f"duplicate platform_id {p.platform_id!r}")
            self._platforms[p.platform_id] = p
        self._crosswalk: dict[tuple[str, str], OccupationCategory] = {}
        self._native_by_category: dict[tuple[str, OccupationCategory], str] = {}
        for platform_id, native_label, category in crosswalk:
            if platform_id not in self._platforms:
                raise RegistryError(
                    f"crosswalk references unregistered platform {platform_id!r}"
                )
            self._crosswalk[(platform_id, self._label_key(native_label))] = category
            self._native_by_category.setdefault((platform_id, category), native_label.strip())

    @staticmethod
    def _label_key(label: str) -> str:
        return label.strip().casefold()

    @classmethod
    def from_files(cls, platforms_csv: Path | str, crosswalk_csv: Path | str) -> "PlatformRegistry":
        """Build a registry from the two shipped CSV data files.

        ``platforms_csv`` columns: platform_id, display_name, language_domain.
        ``crosswalk_csv`` columns: platform_id, native_label, category.
        """
        platforms = []
        with open(platforms_csv, encoding="utf-8", newline="") as f:
            for row in csv.DictReader(f):
                platforms.append(
                    Platform(
                        platform_id=row["platform_id"],
                        display_name=row["display_name"],
                        language_domain=LanguageDomain(row["language_domain"]),
                    )
                )
        crosswalk = []
        with open(crosswalk_csv, encoding="utf-8", newline="") as f:
            for row in csv.DictReader(f):
                crosswalk.append(
                    (row["platform_id"], row["native_label"], OccupationCategory(row["category"]))
                )
        return cls(platforms, crosswalk)

    @classmethod
    def default(cls) -> "PlatformRegistry":
        """Registry for the simulated platforms shipped with the package."""
        return cls.from_files(_data_path("platforms.csv"), _data_path("crosswalk.csv"))

    def __contains__(self, platform_id: str) -> bool:
        return platform_id in self._platforms

    @property
    def platform_ids(self) -> list[str]:
        return list(self._platforms)

    def platform(self, platform_id: str) -> Platform:
        try:
            return self._platforms[platform_id]
        except KeyError:
            raise RegistryError(f"unknown platform {platform_id!r}") from None

    def language_domain(self, platform_id: str) -> LanguageDomain:
        return self.platform(platform_id).language_domain

    def platforms_in_domain(self, domain: LanguageDomain | None) -> frozenset[str]:
        """Platform ids in one language domain, or all when domain is None."""
        if domain is None:
            return frozenset(self._platforms)
        return frozenset(
            pid for pid, p in self._platforms.items() if p.language_domain is domain
        )

    def classify_occupation(self, platform_id: str, native_label: str) -> OccupationCategory:
        """Crosswalk a platform-native category label; misses are unclassified."""
        if platform_id not in self._platforms:
            raise RegistryError(f"unknown platform {platform_id!r}")
        return self._crosswalk.get(
            (platform_id, self._label_key(native_label)), OccupationCategory.UNCLASSIFIED
        )

    def native_labels(self, platform_id: str) -> dict[OccupationCategory, str]:
        """Inverse crosswalk: one representative native label per category.

        Used by the platform simulator to emit realistic payloads; when a
        category has several native labels the first registered one wins.
        """
        self.platform(platform_id)
        return {
            category: label
            for (pid, category), label in self._native_by_category.items()
            if pid == platform_id
        }
