from datetime import date, timedelta

import pandas as pd
import pytest
from fastapi.testclient import TestClient

from olx.errors import ScenarioError
from olx.sim import (
    GenderConfig,
    LinkPlan,
    NamePools,
    PlatformScenario,
    ScenarioConfig,
    WorkerPopulation,
    build_app,
    expected_index,
    generate,
)
from olx.taxonomy import LanguageDomain, OccupationCategory

SDT = OccupationCategory.SOFTWARE_DEV_TECH
WRT = OccupationCategory.WRITING_TRANSLATION

FLAT_SEASON = tuple([1.0] * 12)
POOLS = NamePools(
    female_known=("maria", "sofia"),
    male_known=("james", "david"),
    female_ambiguous=("alex",),
    male_ambiguous=("sam",),
    female_unlisted=("zorina",),
    male_unlisted=("zorinel",),
    weights=(0.9, 0.05, 0.05),
)


def platform(pid="simup", domain=LanguageDomain.EN, volume=30.0, growth=0.0,
             seasonal=FLAT_SEASON, launch=None, workers=None, **kwargs):
    return PlatformScenario(
        platform_id=pid,
        language_domain=domain,
        base_daily_volume=volume,
        annual_growth_rate=growth,
        monthly_seasonal_factors=seasonal,
        occupation_mix={SDT: 0.6, WRT: 0.4},
        buyer_country_mix={"US": 0.7, "DE": 0.3},
        launch_date=launch,
        workers=workers,
        **kwargs,
    )


def scenario(platforms, days=120, seed=7, **kwargs):
    return ScenarioConfig(
        name="test",
        seed=seed,
        start_date=date(2020, 1, 1),
        end_date=date(2020, 1, 1) + timedelta(days=days - 1),
        platforms=tuple(platforms),
        name_pools=POOLS,
        **kwargs,
    )


class TestValidation:
    def test_bad_mix_rejected(self):
        with pytest.raises(ScenarioError, match="occupation_mix"):
            ScenarioConfig(
                name="bad",
                seed=1,
                start_date=date(2020, 1, 1),
                end_date=date(2020, 2, 1),
                platforms=(
                    PlatformScenario(
                        platform_id="simup",
                        language_domain=LanguageDomain.EN,
                        base_daily_volume=10,
                        annual_growth_rate=0.0,
                        monthly_seasonal_factors=FLAT_SEASON,
                        occupation_mix={SDT: 0.6, WRT: 0.6},
                        buyer_country_mix={"US": 1.0},
                    ),
                ),
            )

    def test_unknown_fault_mode_rejected(self):
        with pytest.raises(ScenarioError, match="fault"):
            scenario([platform()], faults={"simup": "explode"})

    def test_unregistered_platform_rejected_at_generation(self):
        cfg = scenario([platform(pid="ghost_platform")])
        with pytest.raises(ScenarioError, match="not registered"):
            generate(cfg)


class TestGeneration:
    def test_law_of_large_numbers_on_flat_volume(self):
        cfg = scenario([platform(volume=100.0)], days=365)
        fixtures = generate(cfg)
        counts = fixtures.ledger.demand_counts()
        total = sum(counts.values())
        assert total / 365 == pytest.approx(100.0, abs=3.0)

    def test_seed_determinism(self):
        cfg = scenario([platform(workers=WorkerPopulation(
            size=500, country_mix={"IN": (0.5, 0.5), "US": (0.5, 0.5)},
            occupation_mix={SDT: 1.0}))])
        a = generate(cfg)
        b = generate(cfg)
        pd.testing.assert_frame_equal(a.ledger.postings, b.ledger.postings)
        pd.testing.assert_frame_equal(a.ledger.workers, b.ledger.workers)

    def test_different_seeds_differ(self):
        a = generate(scenario([platform()], seed=1))
        b = generate(scenario([platform()], seed=2))
        assert not a.ledger.postings["posting_id"].equals(b.ledger.postings["posting_id"]) or len(
            a.ledger.postings
        ) != len(b.ledger.postings)

    def test_december_dip_in_generated_volume(self):
        seasonal = tuple(0.8 if m == 12 else 1.0 for m in range(1, 13))
        cfg = ScenarioConfig(
            name="dip", seed=3,
            start_date=date(2019, 1, 1), end_date=date(2020, 12, 31),
            platforms=(platform(volume=400.0, seasonal=seasonal),),
            name_pools=POOLS,
        )
        ledger = generate(cfg).ledger
        by_month = ledger.postings.groupby(
            ledger.postings["posted_at"].dt.month
        ).size()
        december_daily = by_month[12] / 62  # two Decembers
        november_daily = by_month[11] / 60
        assert december_daily / november_daily == pytest.approx(0.8, abs=0.03)

    def test_launch_date_respected(self):
        launch = date(2020, 2, 1)
        cfg = scenario([platform(), platform(pid="simfree", launch=launch)])
        ledger = generate(cfg).ledger
        late = ledger.postings[ledger.postings["platform_id"] == "simfree"]
        assert late["day"].min() >= launch

    def test_worker_ramp_moves_country_share(self):
        workers = WorkerPopulation(
            size=12000,
            country_mix={"IN": (0.25, 0.33), "BD": (0.10, 0.15), "US": (0.65, 0.52)},
            occupation_mix={SDT: 0.5, WRT: 0.5},
        )
        cfg = scenario([platform(workers=workers)], days=365)
        ledger = generate(cfg).ledger
        early = ledger.worker_country_shares(cfg.start_date, cfg.start_date + timedelta(days=59))
        late = ledger.worker_country_shares(cfg.end_date - timedelta(days=59), cfg.end_date)
        assert early["IN"] == pytest.approx(0.2566, abs=0.02)  # ramp mean over window
        assert late["IN"] == pytest.approx(0.3234, abs=0.02)
        assert late["BD"] > early["BD"]

    def test_gender_mix_honored(self):
        workers = WorkerPopulation(
            size=8000,
            country_mix={"US": (1.0, 1.0)},
            occupation_mix={SDT: 0.5, WRT: 0.5},
        )
        from olx.sim import CountryGender

        gender = GenderConfig(
            default_female_prob=0.5,
            by_country={"US": CountryGender(default=0.41, by_occupation={SDT: 0.20, WRT: 0.62})},
        )
        cfg = scenario([platform(workers=workers)], days=200, gender=gender)
        w = generate(cfg).ledger.workers
        tech = w[w["category"] == SDT.value]
        writing = w[w["category"] == WRT.value]
        assert (tech["gender"] == "female").mean() == pytest.approx(0.20, abs=0.02)
        assert (writing["gender"] == "female").mean() == pytest.approx(0.62, abs=0.02)

    def test_ledger_totals_match_served_fixtures(self):
        cfg = scenario([platform(), platform(pid="simfree")])
        fixtures = generate(cfg)
        served = sum(len(f.postings) for f in fixtures.platforms.values())
        assert served == fixtures.ledger.total_postings()


class TestPipelineAgainstOracle:
    def test_cube_from_ledger_postings_equals_ledger_cube(self, registry):
        from olx.index import build_count_cube

        cfg = scenario([platform(volume=50.0), platform(pid="simfree", volume=30.0)], days=60)
        fixtures = generate(cfg)
        ledger = fixtures.ledger
        cube = build_count_cube(
            ledger.postings[["platform_id", "posted_at", "native_category", "buyer_country"]],
            registry,
        )
        expected = ledger.cube_frame().sort_values(
            ["day", "platform_id", "category", "buyer_country"]
        ).reset_index(drop=True)
        got = cube.frame.sort_values(
            ["day", "platform_id", "category", "buyer_country"]
        ).reset_index(drop=True)
        pd.testing.assert_frame_equal(got, expected, check_dtype=False)

    def test_measured_index_tracks_expected_within_poisson_band(self, registry):
        # The +/-3% band is calibrated for daily volume >= 100 with a
        # 28-day window; it is a per-checkpoint bound, not a sup over
        # every day of the series.
        from olx.index import build_count_cube, build_index

        cfg = scenario([platform(volume=800.0, growth=0.15)], days=150, seed=12)
        fixtures = generate(cfg)
        cube = build_count_cube(
            fixtures.ledger.postings[
                ["platform_id", "posted_at", "native_category", "buyer_country"]
            ],
            registry,
        )
        measured = build_index(cube, {"simup"}, window_days=28)
        expected = expected_index(cfg, window_days=28)
        days = [d for d in measured.points if d in expected]
        checkpoints = [days[i * (len(days) - 1) // 4] for i in range(5)]
        for d in checkpoints:
            assert measured.points[d] == pytest.approx(expected[d], rel=0.03), d


class TestExpectedIndex:
    def test_flat_scenario_constant_100(self):
        cfg = scenario([platform(volume=100.0)], days=90)
        curve = expected_index(cfg)
        assert all(v == pytest.approx(100.0, abs=1e-9) for v in curve.values())

    def test_ten_percent_growth_reaches_110_after_a_year(self):
        cfg = scenario([platform(volume=100.0, growth=0.10)], days=400)
        curve = expected_index(cfg)
        base = date(2020, 1, 1) + timedelta(days=27)
        one_year = base + timedelta(days=365)
        expected = 1.10 ** (365 / 365.25) * 100
        assert curve[one_year] == pytest.approx(expected, rel=1e-6)

    def test_basket_change_is_continuous(self):
        link = date(2020, 7, 1)
        cfg = scenario(
            [
                platform(volume=100.0, growth=0.10),
                platform(pid="freelancer_es", domain=LanguageDomain.ES,
                         volume=50.0, growth=0.10, launch=date(2020, 4, 1)),
            ],
            days=300,
            link_schedule=(LinkPlan(link_date=link, platforms_added=frozenset({"freelancer_es"})),),
        )
        curve = expected_index(cfg)
        before = curve[link - timedelta(days=1)]
        at = curve[link]
        daily_growth = 1.10 ** (1 / 365.25)
        assert at / before == pytest.approx(daily_growth, rel=1e-3)

    def test_window_longer_than_scenario_rejected(self):
        cfg = scenario([platform()], days=10)
        with pytest.raises(ScenarioError):
            expected_index(cfg, window_days=28)


@pytest.fixture(scope="module")
def fixtures():
    workers = WorkerPopulation(
        size=300, country_mix={"IN": (1.0, 1.0)}, occupation_mix={SDT: 1.0}
    )
    cfg = scenario(
        [
            platform(volume=20.0, workers=workers, page_size=50),
            platform(pid="simtask", payload_kind="html", country_style="name"),
        ],
        days=30,
    )
    return generate(cfg)


@pytest.fixture(scope="module")
def client(fixtures):
    return TestClient(build_app(fixtures))


class TestMockServer:
    def test_json_pagination_newest_first(self, client, fixtures):
        r = client.get("/simup/postings", params={"page": 1, "page_size": 50})
        assert r.status_code == 200
        body = r.json()
        assert body["total"] == len(fixtures.platforms["simup"].postings)
        stamps = [item["created_at"] for item in body["items"]]
        assert stamps == sorted(stamps, reverse=True)

    def test_page_past_end_is_empty(self, client):
        r = client.get("/simup/postings", params={"page": 99999})
        assert r.json()["items"] == []

    def test_html_payload(self, client):
        r = client.get("/simtask/postings", params={"page": 1, "page_size": 5})
        assert r.status_code == 200
        assert r.headers["content-type"].startswith("text/html")
        assert 'data-field="posting_id"' in r.text
        # name-styled countries serve display names, not codes
        assert 'data-field="buyer_country">US<' not in r.text

    def test_unknown_platform_404(self, client):
        assert client.get("/nope/postings").status_code == 404

    def test_profiles_listing(self, client, fixtures):
        r = client.get("/simup/profiles", params={"page": 1, "page_size": 1000})
        body = r.json()
        assert body["total"] == len(fixtures.platforms["simup"].profiles)
        assert {"uid", "country", "first_name", "specialty", "last_active"} <= set(
            body["items"][0]
        )

    def test_fault_injection_roundtrip(self, client):
        assert client.put("/_control/faults/simup", json={"mode": "down"}).status_code == 200
        assert client.get("/simup/postings").status_code == 503
        assert client.put("/_control/faults/simup", json={"mode": None}).status_code == 200
        assert client.get("/simup/postings").status_code == 200

    def test_port_conflict_raises_startup_error(self, fixtures):
        from olx.sim import MockPlatformServer

        with MockPlatformServer(fixtures) as first:
            with pytest.raises(ScenarioError, match="port conflict|did not start|failed to start"):
                MockPlatformServer(fixtures, port=first.port).start(timeout=5)

    def test_corrupt_item_injection(self, client, fixtures):
        client.put("/_control/faults/simup", json={"mode": "corrupt_item"})
        try:
            n = fixtures.injected_corruption_count("simup")
            assert n > 0
            bad = 0
            page = 1
            while True:
                items = client.get(
                    "/simup/postings", params={"page": page, "page_size": 50}
                ).json()["items"]
                if not items:
                    break
                bad += sum(1 for item in items if item["created_at"] == "###corrupt###")
                page += 1
            assert bad == n
        finally:
            client.put("/_control/faults/simup", json={"mode": None})
