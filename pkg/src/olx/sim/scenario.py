"""Scenario configuration for the synthetic platform generator.

A scenario is the generative ground truth: per-platform posting volumes
(exponential growth x monthly seasonality, Poisson-sampled), attribute
mixes, worker populations with optionally ramping country mixes, gender
probabilities by country and occupation, and the chain-link schedule the
pipeline is expected to apply. Everything is validated up front so a bad
mix fails loudly before any data exists.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path

from ..errors import ScenarioError
from ..taxonomy import LanguageDomain, OccupationCategory, _data_path, normalize_country

MIX_TOLERANCE = 1e-9

_OTHER_LABELS = {"EN": "Other", "ES": "Otros", "RU": "Другое"}


def _check_mix(mix: dict, what: str) -> None:
    if not mix:
        raise ScenarioError(f"{what}: empty mix")
    if any(v < 0 for v in mix.values()):
        raise ScenarioError(f"{what}: negative weight")
    total = sum(mix.values())
    if abs(total - 1.0) > MIX_TOLERANCE:
        raise ScenarioError(f"{what}: weights sum to {total!r}, expected 1")


def _occupation_mix(raw: dict[str, float], what: str) -> dict[OccupationCategory, float]:
    try:
        mix = {OccupationCategory(k): float(v) for k, v in raw.items()}
    except ValueError as exc:
        raise ScenarioError(f"{what}: {exc}") from exc
    _check_mix({k.value: v for k, v in mix.items()}, what)
    return mix


@dataclass(frozen=True)
class WorkerPopulation:
    """Roster size and attribute mixes for one platform's supply side."""

    size: int
    country_mix: dict[str, tuple[float, float]]  # code -> (start share, end share)
    occupation_mix: dict[OccupationCategory, float]

    def mix_at(self, frac: float) -> dict[str, float]:
        """Country mix linearly interpolated at a scenario time fraction."""
        return {c: a + (b - a) * frac for c, (a, b) in self.country_mix.items()}


@dataclass(frozen=True)
class PlatformScenario:
    platform_id: str
    language_domain: LanguageDomain
    base_daily_volume: float
    annual_growth_rate: float
    monthly_seasonal_factors: tuple[float, ...]
    occupation_mix: dict[OccupationCategory, float]
    buyer_country_mix: dict[str, float]
    launch_date: date | None = None  # None: active from scenario start
    workers: WorkerPopulation | None = None
    payload_kind: str = "json"
    page_size: int = 500
    politeness_delay_ms: int = 0
    country_style: str = "alpha2"  # or "name": serve English names instead of codes
    other_label: str | None = None  # native label for unclassified postings


@dataclass(frozen=True)
class CountryGender:
    default: float
    by_occupation: dict[OccupationCategory, float] = field(default_factory=dict)

    def prob(self, occupation: OccupationCategory) -> float:
        return self.by_occupation.get(occupation, self.default)


@dataclass(frozen=True)
class GenderConfig:
    default_female_prob: float = 0.5
    by_country: dict[str, CountryGender] = field(default_factory=dict)

    def prob(self, country: str, occupation: OccupationCategory) -> float:
        cg = self.by_country.get(country)
        if cg is None:
            return self.default_female_prob
        return cg.prob(occupation)


@dataclass(frozen=True)
class NamePools:
    """Given-name pools by gender: resolvable, ambiguous, and off-table names."""

    female_known: tuple[str, ...]
    male_known: tuple[str, ...]
    female_ambiguous: tuple[str, ...] = ()
    male_ambiguous: tuple[str, ...] = ()
    female_unlisted: tuple[str, ...] = ()
    male_unlisted: tuple[str, ...] = ()
    weights: tuple[float, float, float] = (1.0, 0.0, 0.0)  # known/ambiguous/unlisted

    def buckets(self, gender: str) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
        if gender == "female":
            return (self.female_known, self.female_ambiguous, self.female_unlisted)
        return (self.male_known, self.male_ambiguous, self.male_unlisted)


@dataclass(frozen=True)
class LinkPlan:
    link_date: date
    platforms_added: frozenset[str]


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    seed: int
    start_date: date
    end_date: date
    platforms: tuple[PlatformScenario, ...]
    gender: GenderConfig = GenderConfig()
    name_pools: NamePools = NamePools(female_known=("maria",), male_known=("james",))
    link_schedule: tuple[LinkPlan, ...] = ()
    window_days: int = 28
    base_date: date | None = None
    faults: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    # -- validation ----------------------------------------------------

    def validate(self) -> None:
        if self.start_date > self.end_date:
            raise ScenarioError("start_date must not be after end_date")
        if not self.platforms:
            raise ScenarioError("a scenario needs at least one platform")
        ids = [p.platform_id for p in self.platforms]
        if len(ids) != len(set(ids)):
            raise ScenarioError("duplicate platform_id in scenario")
        for p in self.platforms:
            what = f"platform {p.platform_id}"
            if p.base_daily_volume <= 0:
                raise ScenarioError(f"{what}: base_daily_volume must be positive")
            if len(p.monthly_seasonal_factors) != 12:
                raise ScenarioError(f"{what}: needs 12 monthly seasonal factors")
            if any(f <= 0 for f in p.monthly_seasonal_factors):
                raise ScenarioError(f"{what}: seasonal factors must be positive")
            _check_mix({k.value: v for k, v in p.occupation_mix.items()}, f"{what} occupation_mix")
            if set(p.occupation_mix) - set(OccupationCategory):
                raise ScenarioError(f"{what}: unknown occupation in mix")
            _check_mix(p.buyer_country_mix, f"{what} buyer_country_mix")
            if p.payload_kind not in ("json", "html"):
                raise ScenarioError(f"{what}: payload_kind must be json or html")
            if p.launch_date is not None and p.launch_date > self.end_date:
                raise ScenarioError(f"{what}: launches after the scenario ends")
            if p.workers is not None:
                if p.workers.size < 0:
                    raise ScenarioError(f"{what}: worker size must be >= 0")
                _check_mix(
                    {c: a for c, (a, _) in p.workers.country_mix.items()},
                    f"{what} worker country_mix (start)",
                )
                _check_mix(
                    {c: b for c, (_, b) in p.workers.country_mix.items()},
                    f"{what} worker country_mix (end)",
                )
                _check_mix(
                    {k.value: v for k, v in p.workers.occupation_mix.items()},
                    f"{what} worker occupation_mix",
                )
        for mode in self.faults.values():
            if mode not in ("down", "slow", "corrupt_item"):
                raise ScenarioError(f"unknown fault mode {mode!r}")
        for plan in self.link_schedule:
            unknown = plan.platforms_added - set(ids)
            if unknown:
                raise ScenarioError(f"link adds unknown platforms {sorted(unknown)}")

    # -- helpers ---------------------------------------------------------

    @property
    def n_days(self) -> int:
        return (self.end_date - self.start_date).days + 1

    def time_fraction(self, day: date) -> float:
        if self.n_days == 1:
            return 0.0
        return (day - self.start_date).days / (self.n_days - 1)

    def platform(self, platform_id: str) -> PlatformScenario:
        for p in self.platforms:
            if p.platform_id == platform_id:
                return p
        raise ScenarioError(f"scenario has no platform {platform_id!r}")

    def other_label_for(self, p: PlatformScenario) -> str:
        return p.other_label or _OTHER_LABELS[p.language_domain.value]

    def scaled(self, volume_factor: float, worker_factor: float | None = None) -> "ScenarioConfig":
        """Same shape at a different size; mixes and dates untouched."""
        wf = volume_factor if worker_factor is None else worker_factor
        platforms = tuple(
            replace(
                p,
                base_daily_volume=p.base_daily_volume * volume_factor,
                workers=None
                if p.workers is None
                else replace(p.workers, size=max(1, round(p.workers.size * wf))),
            )
            for p in self.platforms
        )
        return replace(self, platforms=platforms)

    # -- parsing ---------------------------------------------------------

    @classmethod
    def from_file(cls, path: Path | str) -> "ScenarioConfig":
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    @classmethod
    def named(cls, name: str) -> "ScenarioConfig":
        """Load a scenario shipped with the package (e.g. ``paper2020``)."""
        return cls.from_file(_data_path(f"scenarios/{name}.scenario"))

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        try:
            platforms = tuple(cls._platform_from_dict(p) for p in raw["platforms"])
            gender = cls._gender_from_dict(raw.get("gender", {}))
            pools = cls._pools_from_dict(raw.get("name_pools", {}))
            links = tuple(
                LinkPlan(
                    link_date=date.fromisoformat(l["link_date"]),
                    platforms_added=frozenset(l["platforms_added"]),
                )
                for l in raw.get("link_schedule", [])
            )
            return cls(
                name=raw["name"],
                seed=int(raw["seed"]),
                start_date=date.fromisoformat(raw["start_date"]),
                end_date=date.fromisoformat(raw["end_date"]),
                platforms=platforms,
                gender=gender,
                name_pools=pools,
                link_schedule=links,
                window_days=int(raw.get("window_days", 28)),
                base_date=date.fromisoformat(raw["base_date"]) if raw.get("base_date") else None,
                faults=dict(raw.get("faults", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(f"malformed scenario document: {exc!r}") from exc

    @staticmethod
    def _platform_from_dict(p: dict) -> PlatformScenario:
        workers = None
        if "workers" in p and p["workers"]:
            w = p["workers"]
            country_mix = {}
            for code, v in w["country_mix"].items():
                pair = (float(v[0]), float(v[1])) if isinstance(v, (list, tuple)) else (float(v), float(v))
                country_mix[normalize_country(code)] = pair
            workers = WorkerPopulation(
                size=int(w["size"]),
                country_mix=country_mix,
                occupation_mix=_occupation_mix(w["occupation_mix"], "worker occupation_mix"),
            )
        return PlatformScenario(
            platform_id=p["platform_id"],
            language_domain=LanguageDomain(p["language_domain"]),
            base_daily_volume=float(p["base_daily_volume"]),
            annual_growth_rate=float(p.get("annual_growth_rate", 0.0)),
            monthly_seasonal_factors=tuple(
                float(x) for x in p.get("monthly_seasonal_factors", [1.0] * 12)
            ),
            occupation_mix=_occupation_mix(p["occupation_mix"], "occupation_mix"),
            buyer_country_mix={
                normalize_country(c): float(v) for c, v in p["buyer_country_mix"].items()
            },
            launch_date=date.fromisoformat(p["launch_date"]) if p.get("launch_date") else None,
            workers=workers,
            payload_kind=p.get("payload_kind", "json"),
            page_size=int(p.get("page_size", 500)),
            politeness_delay_ms=int(p.get("politeness_delay_ms", 0)),
            country_style=p.get("country_style", "alpha2"),
            other_label=p.get("other_label"),
        )

    @staticmethod
    def _gender_from_dict(raw: dict) -> GenderConfig:
        by_country = {}
        for code, spec in raw.get("by_country", {}).items():
            by_occ = {
                OccupationCategory(k): float(v)
                for k, v in spec.get("by_occupation", {}).items()
            }
            by_country[normalize_country(code)] = CountryGender(
                default=float(spec["default"]), by_occupation=by_occ
            )
        return GenderConfig(
            default_female_prob=float(raw.get("default_female_prob", 0.5)),
            by_country=by_country,
        )

    @staticmethod
    def _pools_from_dict(raw: dict) -> NamePools:
        if not raw:
            return NamePools(female_known=("maria",), male_known=("james",))
        female = raw.get("female", {})
        male = raw.get("male", {})
        weights = raw.get("weights", {"known": 1.0, "ambiguous": 0.0, "unlisted": 0.0})
        return NamePools(
            female_known=tuple(female.get("known", ("maria",))),
            male_known=tuple(male.get("known", ("james",))),
            female_ambiguous=tuple(female.get("ambiguous", ())),
            male_ambiguous=tuple(male.get("ambiguous", ())),
            female_unlisted=tuple(female.get("unlisted", ())),
            male_unlisted=tuple(male.get("unlisted", ())),
            weights=(
                float(weights.get("known", 1.0)),
                float(weights.get("ambiguous", 0.0)),
                float(weights.get("unlisted", 0.0)),
            ),
        )
