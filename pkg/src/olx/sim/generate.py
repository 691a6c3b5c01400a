"""Synthetic platform data generation with a ground-truth ledger.

Daily posting volume is Poisson around an exponential-growth x seasonal
mean; posting and worker attributes are drawn from the scenario mixes.
The ledger records exactly what was generated, so pipeline outputs can be
checked against generation truth instead of against themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, tzinfo
from typing import Iterable

import numpy as np
import pandas as pd

from ..errors import ScenarioError
from ..taxonomy import OccupationCategory, PlatformRegistry, country_name
from .scenario import PlatformScenario, ScenarioConfig

# Positions (newest-first) that the server corrupts under the
# corrupt_item fault: i % CORRUPT_MODULUS == CORRUPT_OFFSET.
CORRUPT_MODULUS = 43
CORRUPT_OFFSET = 5


@dataclass(frozen=True)
class GroundTruthLedger:
    """Generation truth: every posting and worker as actually drawn."""

    postings: pd.DataFrame
    workers: pd.DataFrame

    def demand_counts(self) -> dict[tuple[str, date], int]:
        """Generated posting count per (platform, day)."""
        if self.postings.empty:
            return {}
        g = self.postings.groupby(["platform_id", "day"]).size()
        return {(pid, day): int(n) for (pid, day), n in g.items()}

    def cube_frame(self) -> pd.DataFrame:
        """Ledger counts shaped like the pipeline's count cube."""
        return (
            self.postings.groupby(["day", "platform_id", "category", "buyer_country"])
            .size()
            .rename("count")
            .reset_index()
        )

    def total_postings(self) -> int:
        return len(self.postings)

    def worker_country_shares(self, start: date, end: date) -> dict[str, float]:
        """True country shares of distinct workers observed in [start, end]."""
        w = self.workers
        w = w[(w["observed_day"] >= start) & (w["observed_day"] <= end)]
        if w.empty:
            return {}
        counts = w.groupby("country").size()
        return {c: float(n) / len(w) for c, n in counts.items()}


@dataclass
class PlatformFixture:
    """Everything the mock server needs to impersonate one platform."""

    config: PlatformScenario
    postings: pd.DataFrame  # newest-first, with preformatted timestamps
    profiles: pd.DataFrame  # roster order

    @property
    def platform_id(self) -> str:
        return self.config.platform_id


_JSON_POSTING_SELECTORS = {
    "posting_id": "/id",
    "posted_at": "/created_at",
    "native_category": "/category/name",
    "buyer_country": "/buyer_country",
    "title": "/title",
}
_JSON_PROFILE_SELECTORS = {
    "worker_id": "/uid",
    "observed_at": "/last_active",
    "country": "/country",
    "given_name": "/first_name",
    "native_category": "/specialty",
}
_HTML_SELECTORS = {name: name for name in
                   ("posting_id", "posted_at", "native_category", "buyer_country", "title")}
_HTML_PROFILE_SELECTORS = {name: name for name in
                           ("worker_id", "observed_at", "country", "given_name", "native_category")}


@dataclass
class FixtureSet:
    scenario: ScenarioConfig
    ledger: GroundTruthLedger
    platforms: dict[str, PlatformFixture]
    faults: dict[str, str] = field(default_factory=dict)

    def adapter_config(self, platform_id: str, base_url: str):
        """An adapter config matching this platform's served payloads."""
        from ..ingest.adapters import AdapterConfig

        p = self.platforms[platform_id].config
        is_json = p.payload_kind == "json"
        return AdapterConfig(
            platform_id=platform_id,
            base_url=base_url,
            list_path_template=f"/{platform_id}/postings?page={{page}}&page_size={{page_size}}",
            payload_kind=p.payload_kind,
            field_selectors=dict(_JSON_POSTING_SELECTORS if is_json else _HTML_SELECTORS),
            profile_path_template=f"/{platform_id}/profiles?page={{page}}&page_size={{page_size}}",
            profile_selectors=dict(
                _JSON_PROFILE_SELECTORS if is_json else _HTML_PROFILE_SELECTORS
            ),
            page_size=p.page_size,
            politeness_delay_ms=p.politeness_delay_ms,
        )

    def adapter_configs(self, base_url: str):
        return [self.adapter_config(pid, base_url) for pid in sorted(self.platforms)]

    def corrupt_positions(self, platform_id: str) -> np.ndarray:
        """Newest-first positions the server will corrupt for this platform."""
        n = len(self.platforms[platform_id].postings)
        return np.arange(CORRUPT_OFFSET, n, CORRUPT_MODULUS)

    def injected_corruption_count(self, platform_id: str) -> int:
        if self.faults.get(platform_id) != "corrupt_item":
            return 0
        return len(self.corrupt_positions(platform_id))


def _format_utc(ns: np.ndarray) -> pd.Series:
    return pd.Series(pd.to_datetime(ns, utc=True)).dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def _choice_from_mix(rng: np.random.Generator, mix: dict, n: int) -> tuple[np.ndarray, list]:
    keys = list(mix)
    probs = np.array([mix[k] for k in keys], dtype=float)
    probs = probs / probs.sum()
    return rng.choice(len(keys), size=n, p=probs), keys


def _generate_demand(
    scenario: ScenarioConfig,
    p: PlatformScenario,
    registry: PlatformRegistry,
    rng: np.random.Generator,
) -> pd.DataFrame:
    start = max(p.launch_date or scenario.start_date, scenario.start_date)
    days = pd.date_range(start, scenario.end_date, freq="D")
    if len(days) == 0:
        return pd.DataFrame()
    years = (days - days[0]).days.values / 365.25
    seasonal = np.asarray(p.monthly_seasonal_factors)[days.month.values - 1]
    means = p.base_daily_volume * (1.0 + p.annual_growth_rate) ** years * seasonal
    counts = rng.poisson(means)
    n = int(counts.sum())
    if n == 0:
        return pd.DataFrame()

    day_idx = np.repeat(np.arange(len(days)), counts)
    cat_idx, cats = _choice_from_mix(rng, p.occupation_mix, n)
    country_idx, countries = _choice_from_mix(rng, p.buyer_country_mix, n)
    seconds = rng.integers(0, 86400, size=n)
    posted_ns = days.values[day_idx].astype("datetime64[s]").astype("int64") + seconds

    labels = registry.native_labels(p.platform_id)
    other = scenario.other_label_for(p)
    native_by_cat = [labels.get(c, other) for c in cats]

    cat_values = np.array([c.value for c in cats], dtype=object)
    native = np.array(native_by_cat, dtype=object)
    code = np.array([str(c) for c in countries], dtype=object)
    if p.country_style == "name":
        served = np.array([country_name(str(c)) for c in countries], dtype=object)
    else:
        served = code

    seq = np.arange(n)
    frame = pd.DataFrame(
        {
            "platform_id": p.platform_id,
            "posting_id": [f"{p.platform_id}-{i:08d}" for i in seq],
            "posted_at": pd.to_datetime(posted_ns, unit="s", utc=True),
            "day": np.array(days.date, dtype=object)[day_idx],
            "category": cat_values[cat_idx],
            "native_category": native[cat_idx],
            "buyer_country": code[country_idx],
            "served_country": served[country_idx],
            "title": [f"{native_by_cat[c]} project #{i}" for i, c in zip(seq, cat_idx)],
        }
    )
    return frame


def _generate_workers(
    scenario: ScenarioConfig,
    p: PlatformScenario,
    registry: PlatformRegistry,
    rng: np.random.Generator,
) -> pd.DataFrame:
    w = p.workers
    if w is None or w.size == 0:
        return pd.DataFrame()
    start = max(p.launch_date or scenario.start_date, scenario.start_date)
    days = pd.date_range(start, scenario.end_date, freq="D")
    per_day = w.size / len(days)
    counts = rng.poisson(np.full(len(days), per_day))
    n = int(counts.sum())
    if n == 0:
        return pd.DataFrame()

    day_idx = np.repeat(np.arange(len(days)), counts)
    fracs = np.array([scenario.time_fraction(d) for d in days.date])

    codes = list(w.country_mix)
    starts = np.array([w.country_mix[c][0] for c in codes])
    ends = np.array([w.country_mix[c][1] for c in codes])
    mix_by_day = starts[None, :] + (ends - starts)[None, :] * fracs[:, None]
    cum = np.cumsum(mix_by_day, axis=1)
    cum[:, -1] = 1.0  # guard against rounding at the top end
    u = rng.random(n)
    country_idx = (cum[day_idx] < u[:, None]).sum(axis=1)

    occ_idx, occs = _choice_from_mix(rng, w.occupation_mix, n)

    prob_matrix = np.array(
        [[scenario.gender.prob(c, o) for o in occs] for c in codes]
    )
    p_female = prob_matrix[country_idx, occ_idx]
    female = rng.random(n) < p_female

    pools = scenario.name_pools
    bucket_cum = np.cumsum(np.asarray(pools.weights) / sum(pools.weights))
    bucket = np.searchsorted(bucket_cum, rng.random(n), side="right")
    bucket = np.minimum(bucket, 2)
    names = np.empty(n, dtype=object)
    for is_female in (True, False):
        gender_key = "female" if is_female else "male"
        buckets = pools.buckets(gender_key)
        for b in range(3):
            mask = (female == is_female) & (bucket == b)
            count = int(mask.sum())
            if count == 0:
                continue
            pool = buckets[b]
            if not pool:
                raise ScenarioError(
                    f"name pool bucket {b} for {gender_key} is empty but has weight"
                )
            picks = rng.integers(0, len(pool), size=count)
            names[mask] = np.array(pool, dtype=object)[picks]

    labels = registry.native_labels(p.platform_id)
    other = scenario.other_label_for(p)
    native_by_occ = [labels.get(o, other) for o in occs]
    occ_values = np.array([o.value for o in occs], dtype=object)
    native = np.array(native_by_occ, dtype=object)

    seconds = rng.integers(0, 86400, size=n)
    observed_ns = days.values[day_idx].astype("datetime64[s]").astype("int64") + seconds
    code_arr = np.array(codes, dtype=object)

    frame = pd.DataFrame(
        {
            "platform_id": p.platform_id,
            "worker_id": [f"{p.platform_id}-w{i:07d}" for i in range(n)],
            "observed_at": pd.to_datetime(observed_ns, unit="s", utc=True),
            "observed_day": np.array(days.date, dtype=object)[day_idx],
            "country": code_arr[country_idx],
            "gender": np.where(female, "female", "male"),
            "given_name": names,
            "category": occ_values[occ_idx],
            "native_category": native[occ_idx],
        }
    )
    return frame


def generate(scenario: ScenarioConfig, registry: PlatformRegistry | None = None) -> FixtureSet:
    """Draw the full fixture set and ledger for a scenario (deterministic per seed)."""
    registry = registry or PlatformRegistry.default()
    for p in scenario.platforms:
        if p.platform_id not in registry:
            raise ScenarioError(f"platform {p.platform_id!r} is not registered")

    posting_frames = []
    worker_frames = []
    fixtures: dict[str, PlatformFixture] = {}
    for i, p in enumerate(scenario.platforms):
        demand_rng = np.random.default_rng([scenario.seed, i, 1])
        worker_rng = np.random.default_rng([scenario.seed, i, 2])
        demand = _generate_demand(scenario, p, registry, demand_rng)
        workers = _generate_workers(scenario, p, registry, worker_rng)

        if not demand.empty:
            posting_frames.append(demand)
            served = demand.sort_values("posted_at", ascending=False, kind="stable")
            served = served.reset_index(drop=True)
            served["posted_at_str"] = _format_utc(served["posted_at"].values)
        else:
            served = demand
        if not workers.empty:
            worker_frames.append(workers)
            profiles = workers.reset_index(drop=True)
            profiles["observed_at_str"] = _format_utc(profiles["observed_at"].values)
        else:
            profiles = workers
        fixtures[p.platform_id] = PlatformFixture(config=p, postings=served, profiles=profiles)

    ledger = GroundTruthLedger(
        postings=pd.concat(posting_frames, ignore_index=True) if posting_frames else pd.DataFrame(),
        workers=pd.concat(worker_frames, ignore_index=True) if worker_frames else pd.DataFrame(),
    )
    return FixtureSet(
        scenario=scenario, ledger=ledger, platforms=fixtures, faults=dict(scenario.faults)
    )
