from datetime import date, datetime, timedelta, timezone

import pytest
from fastapi.testclient import TestClient

from olx.errors import IngestError
from olx.ingest import (
    AdapterConfig,
    crawl_cycle,
    dedup,
    fetch_new_postings,
    fetch_worker_profiles,
    resolve_pointer,
)
from olx.sim import PlatformScenario, ScenarioConfig, WorkerPopulation, build_app, generate
from olx.store import DataLayout, ObservationStore, SeenStore, WatermarkStore
from olx.taxonomy import LanguageDomain, OccupationCategory, PlatformRegistry

from conftest import mk_posting

SDT = OccupationCategory.SOFTWARE_DEV_TECH
WRT = OccupationCategory.WRITING_TRANSLATION
EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
START = date(2021, 1, 1)


def small_scenario(days=20, seed=11, faults=None, html_platform=True, workers=True):
    platforms = [
        PlatformScenario(
            platform_id="simup",
            language_domain=LanguageDomain.EN,
            base_daily_volume=12.0,
            annual_growth_rate=0.0,
            monthly_seasonal_factors=tuple([1.0] * 12),
            occupation_mix={SDT: 0.7, WRT: 0.3},
            buyer_country_mix={"US": 0.6, "IN": 0.4},
            page_size=25,
            workers=WorkerPopulation(
                size=100,
                country_mix={"IN": (0.5, 0.5), "US": (0.5, 0.5)},
                occupation_mix={SDT: 1.0},
            )
            if workers
            else None,
        ),
        PlatformScenario(
            platform_id="simfree",
            language_domain=LanguageDomain.EN,
            base_daily_volume=8.0,
            annual_growth_rate=0.0,
            monthly_seasonal_factors=tuple([1.0] * 12),
            occupation_mix={SDT: 1.0},
            buyer_country_mix={"DE": 1.0},
            page_size=40,
        ),
    ]
    if html_platform:
        platforms.append(
            PlatformScenario(
                platform_id="simtask",
                language_domain=LanguageDomain.EN,
                base_daily_volume=6.0,
                annual_growth_rate=0.0,
                monthly_seasonal_factors=tuple([1.0] * 12),
                occupation_mix={WRT: 1.0},
                buyer_country_mix={"GB": 1.0},
                payload_kind="html",
                country_style="name",
                page_size=15,
            )
        )
    return ScenarioConfig(
        name="ingest-test",
        seed=seed,
        start_date=START,
        end_date=START + timedelta(days=days - 1),
        platforms=tuple(platforms),
        faults=faults or {},
    )


@pytest.fixture(scope="module")
def fixtures():
    return generate(small_scenario())


@pytest.fixture(scope="module")
def client(fixtures):
    return TestClient(build_app(fixtures))


@pytest.fixture
def adapters(fixtures):
    return fixtures.adapter_configs("http://testserver")


@pytest.fixture
def stores(tmp_path):
    layout = DataLayout(tmp_path / "data")
    return {
        "layout": layout,
        "store": ObservationStore(layout),
        "seen": SeenStore(layout),
        "worker_seen": SeenStore(layout, kind="workers"),
        "watermarks": WatermarkStore(layout),
    }


class TestJsonPointer:
    def test_nested_lookup(self):
        doc = {"a": {"b": [{"c": 5}]}}
        assert resolve_pointer(doc, "/a/b/0/c") == 5
        assert resolve_pointer(doc, "") == doc

    def test_escapes(self):
        assert resolve_pointer({"a/b": {"~x": 1}}, "/a~1b/~0x") == 1


class TestAdapterConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            AdapterConfig("p", "http://x", "/list", "json", {})  # no {page}
        with pytest.raises(ValueError):
            AdapterConfig("p", "http://x", "/l?page={page}", "xml", {})
        with pytest.raises(ValueError):
            AdapterConfig("p", "http://x", "/l?page={page}", "json", {}, page_size=0)

    def test_yaml_roundtrip(self, tmp_path, fixtures):
        cfg = fixtures.adapter_config("simup", "http://testserver")
        path = tmp_path / "simup.yaml"
        cfg.to_yaml(path)
        assert AdapterConfig.from_yaml(path) == cfg


class TestFetchPostings:
    def test_fetches_all_fields(self, client, fixtures, adapters):
        adapter = next(a for a in adapters if a.platform_id == "simup")
        result = fetch_new_postings(adapter, EPOCH, client=client)
        assert result.skipped == 0
        assert len(result.postings) == len(fixtures.platforms["simup"].postings)
        sample = result.postings[0]
        assert sample.platform_id == "simup"
        assert sample.posting_id
        assert sample.posted_at.tzinfo is not None
        assert sample.native_category
        assert sample.buyer_country in {"US", "IN"}
        assert sample.title
        assert sample.posted_at <= sample.fetched_at

    def test_since_filters_and_stops_early(self, client, fixtures, adapters):
        adapter = next(a for a in adapters if a.platform_id == "simup")
        cutoff = datetime(2021, 1, 18, tzinfo=timezone.utc)
        result = fetch_new_postings(adapter, cutoff, client=client)
        ledger = fixtures.ledger.postings
        expected = ledger[
            (ledger["platform_id"] == "simup") & (ledger["posted_at"] >= cutoff)
        ]
        assert len(result.postings) == len(expected)
        assert all(p.posted_at >= cutoff for p in result.postings)
        full_pages = -(-len(fixtures.platforms["simup"].postings) // adapter.page_size)
        assert result.pages < full_pages  # stopped before exhausting the listing

    def test_nothing_new_returns_empty(self, client, adapters):
        adapter = next(a for a in adapters if a.platform_id == "simup")
        result = fetch_new_postings(adapter, datetime(2030, 1, 1, tzinfo=timezone.utc), client=client)
        assert result.postings == []

    def test_html_platform_parses_and_normalizes_countries(self, client, fixtures, adapters):
        adapter = next(a for a in adapters if a.platform_id == "simtask")
        result = fetch_new_postings(adapter, EPOCH, client=client)
        assert len(result.postings) == len(fixtures.platforms["simtask"].postings)
        # served as "United Kingdom", normalized back to the code
        assert {p.buyer_country for p in result.postings} == {"GB"}

    def test_corrupt_items_skipped_and_counted(self, fixtures, adapters):
        fixtures.faults["simup"] = "corrupt_item"
        try:
            client = TestClient(build_app(fixtures))
            adapter = next(a for a in adapters if a.platform_id == "simup")
            result = fetch_new_postings(adapter, EPOCH, client=client)
            injected = fixtures.injected_corruption_count("simup")
            assert injected > 0
            assert result.skipped == injected
            total = len(fixtures.platforms["simup"].postings)
            assert len(result.postings) == total - injected
        finally:
            fixtures.faults.pop("simup", None)

    def test_down_platform_raises_retryable(self, fixtures, adapters):
        fixtures.faults["simfree"] = "down"
        try:
            client = TestClient(build_app(fixtures))
            adapter = next(a for a in adapters if a.platform_id == "simfree")
            with pytest.raises(IngestError) as err:
                fetch_new_postings(adapter, EPOCH, client=client)
            assert err.value.platform_id == "simfree"
            assert err.value.retryable
        finally:
            fixtures.faults.pop("simfree", None)


class TestFetchWorkerProfiles:
    def test_deterministic_sampling(self, client, adapters):
        adapter = next(a for a in adapters if a.platform_id == "simup")
        a = fetch_worker_profiles(adapter, 5, seed=7, client=client)
        b = fetch_worker_profiles(adapter, 5, seed=7, client=client)
        assert [w.worker_id for w in a.workers] == [w.worker_id for w in b.workers]
        assert len(a.workers) == 5

    def test_seed_changes_sample(self, client, adapters):
        adapter = next(a for a in adapters if a.platform_id == "simup")
        a = fetch_worker_profiles(adapter, 5, seed=7, client=client)
        b = fetch_worker_profiles(adapter, 5, seed=8, client=client)
        assert [w.worker_id for w in a.workers] != [w.worker_id for w in b.workers]

    def test_exhaustion_returns_everyone_once(self, client, fixtures, adapters):
        adapter = next(a for a in adapters if a.platform_id == "simup")
        roster = len(fixtures.platforms["simup"].profiles)
        result = fetch_worker_profiles(adapter, roster + 100, seed=1, client=client)
        ids = [w.worker_id for w in result.workers]
        assert len(ids) == roster
        assert len(set(ids)) == roster

    def test_profiles_fully_populated(self, client, adapters):
        adapter = next(a for a in adapters if a.platform_id == "simup")
        result = fetch_worker_profiles(adapter, 10, seed=3, client=client)
        for w in result.workers:
            assert w.country in {"IN", "US"}
            assert w.given_name
            assert w.native_category


class TestDedup:
    def test_fresh_then_replay(self, stores):
        batch = [mk_posting("simup", f"p{i}", START) for i in range(10)]
        fresh = dedup(batch, stores["seen"])
        assert len(fresh) == 10
        assert len(stores["seen"]) == 10
        assert dedup(batch, stores["seen"]) == []

    def test_batch_internal_duplicate(self, stores):
        batch = [mk_posting("simup", "same", START), mk_posting("simup", "same", START)]
        assert len(dedup(batch, stores["seen"])) == 1


class TestCrawlCycle:
    def run_cycle(self, fixtures, adapters, stores, **kwargs):
        client = TestClient(build_app(fixtures))
        return crawl_cycle(
            registry=PlatformRegistry.default(),
            adapters=adapters,
            store=stores["store"],
            seen=stores["seen"],
            watermarks=stores["watermarks"],
            worker_seen=stores["worker_seen"],
            client=client,
            **kwargs,
        )

    def test_counts_match_ledger_and_store(self, fixtures, adapters, stores):
        report = self.run_cycle(fixtures, adapters, stores)
        ledger_counts = fixtures.ledger.demand_counts()
        for pid, entry in report.platforms.items():
            assert entry.ok
            expected = sum(n for (p, _), n in ledger_counts.items() if p == pid)
            assert entry.new_postings == expected
        # count conservation: report totals equal rows in the store
        stored = stores["store"].posting_counts()
        assert sum(stored.values()) == report.total_new_postings
        assert stored == ledger_counts

    def test_second_cycle_is_all_zero(self, fixtures, adapters, stores):
        self.run_cycle(fixtures, adapters, stores)
        second = self.run_cycle(fixtures, adapters, stores)
        assert second.total_new_postings == 0
        assert all(e.ok for e in second.platforms.values())

    def test_watermark_advances_only_on_success(self, fixtures, adapters, stores):
        fixtures.faults["simfree"] = "down"
        try:
            report = self.run_cycle(fixtures, adapters, stores)
        finally:
            fixtures.faults.pop("simfree", None)
        assert report.failed_platforms == ["simfree"]
        assert stores["watermarks"].get("simfree") is None
        assert stores["watermarks"].get("simup") is not None
        # healthy platforms unaffected
        healthy = {p: e.new_postings for p, e in report.platforms.items() if e.ok}
        ledger_counts = fixtures.ledger.demand_counts()
        for pid, n in healthy.items():
            assert n == sum(v for (p, _), v in ledger_counts.items() if p == pid)

    def test_failed_platform_recovers_on_next_cycle(self, fixtures, adapters, stores):
        fixtures.faults["simfree"] = "down"
        try:
            self.run_cycle(fixtures, adapters, stores)
        finally:
            fixtures.faults.pop("simfree", None)
        second = self.run_cycle(fixtures, adapters, stores)
        entry = second.platforms["simfree"]
        assert entry.ok
        ledger_counts = fixtures.ledger.demand_counts()
        assert entry.new_postings == sum(
            v for (p, _), v in ledger_counts.items() if p == "simfree"
        )

    def test_worker_sampling_persists_once(self, fixtures, adapters, stores):
        report = self.run_cycle(fixtures, adapters, stores, worker_sample_size=10**6)
        roster = len(fixtures.platforms["simup"].profiles)
        assert report.platforms["simup"].new_workers == roster
        again = self.run_cycle(fixtures, adapters, stores, worker_sample_size=10**6)
        assert again.platforms["simup"].new_workers == 0
        frame = stores["store"].read_workers_frame()
        assert len(frame) == roster

    def test_monotone_watermark_across_cycles(self, fixtures, adapters, stores):
        self.run_cycle(fixtures, adapters, stores)
        first = stores["watermarks"].all()
        self.run_cycle(fixtures, adapters, stores)
        second = stores["watermarks"].all()
        for pid, wm in first.items():
            assert second[pid] >= wm

    def test_parallel_crawl_matches_ledger(self, fixtures, adapters, stores):
        report = self.run_cycle(fixtures, adapters, stores, max_workers=3)
        assert report.failed_platforms == []
        assert stores["store"].posting_counts() == fixtures.ledger.demand_counts()

    def test_politeness_delay_between_pages(self, fixtures, adapters, stores):
        import dataclasses
        import time

        client = TestClient(build_app(fixtures))
        adapter = next(a for a in adapters if a.platform_id == "simup")
        polite = dataclasses.replace(adapter, politeness_delay_ms=30, page_size=25)
        started = time.monotonic()
        result = fetch_new_postings(polite, EPOCH, client=client)
        elapsed = time.monotonic() - started
        assert result.pages >= 3
        assert elapsed >= 0.03 * (result.pages - 1)

    def test_unregistered_adapter_rejected(self, stores):
        bogus = AdapterConfig(
            "ghost", "http://x", "/l?page={page}", "json", {}, page_size=10
        )
        with pytest.raises(IngestError):
            crawl_cycle(
                registry=PlatformRegistry.default(),
                adapters=[bogus],
                store=stores["store"],
                seen=stores["seen"],
                watermarks=stores["watermarks"],
            )
