"""Pydantic request/response models for the public API."""

from __future__ import annotations

import enum
from datetime import date

from pydantic import BaseModel


class DomainParam(str, enum.Enum):
    ALL = "ALL"
    EN = "EN"
    ES = "ES"
    RU = "RU"


class OccupationParam(str, enum.Enum):
    software_dev_tech = "software_dev_tech"
    creative_multimedia = "creative_multimedia"
    writing_translation = "writing_translation"
    clerical_data_entry = "clerical_data_entry"
    sales_marketing_support = "sales_marketing_support"
    professional_services = "professional_services"
    unclassified = "unclassified"


class GroupByParam(str, enum.Enum):
    none = "none"
    country = "country"
    occupation = "occupation"
    country_occupation = "country_occupation"


class FormatParam(str, enum.Enum):
    json = "json"
    csv = "csv"


class DatasetParam(str, enum.Enum):
    index = "index"
    supply_countries = "supply_countries"
    demand_occupations = "demand_occupations"
    gender = "gender"


class IndexPoint(BaseModel):
    date: date
    value: float


class LinkEventModel(BaseModel):
    link_date: date
    platforms_added: list[str]
    link_factor: float


class IndexResponse(BaseModel):
    snapshot_id: int
    dataset: str = "index"
    platform_domain: str
    occupation: str | None = None
    country: str | None = None
    base_date: date
    window_days: int
    points: list[IndexPoint]
    link_events: list[LinkEventModel]


class SupplyResponse(BaseModel):
    snapshot_id: int
    dataset: str = "supply_countries"
    as_of: date
    window_days: int
    occupation: str | None = None
    denominator: int
    shares: dict[str, float]


class DemandResponse(BaseModel):
    snapshot_id: int
    dataset: str = "demand_occupations"
    as_of: date
    window_days: int
    platform_domain: str
    country: str | None = None
    denominator: int
    shares: dict[str, float]
    top_category: str | None = None
    by_country_top: dict[str, str]


class GenderGroup(BaseModel):
    country: str | None = None
    occupation: str | None = None
    share_female: float | None = None
    classified: int
    coverage: float
    female: int
    male: int
    unknown: int
    total: int


class GenderResponse(BaseModel):
    snapshot_id: int
    dataset: str = "gender"
    group_by: str
    from_date: date | None = None
    to_date: date | None = None
    country: str | None = None
    occupation: str | None = None
    groups: list[GenderGroup]


class SnapshotInfo(BaseModel):
    snapshot_id: int
    created_at: str
    provenance: dict
    window_days: int
    domains: dict
