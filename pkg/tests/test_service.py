import csv
import io
from datetime import date, timedelta

import pytest
from fastapi.testclient import TestClient

from olx.bootstrap import ingest_fixtures
from olx.config import LinkScheduleEntry, ObservatoryConfig
from olx.pipeline import rebuild
from olx.service import create_app
from olx.sim import (
    LinkPlan,
    NamePools,
    PlatformScenario,
    ScenarioConfig,
    WorkerPopulation,
    generate,
)
from olx.store import DataLayout
from olx.taxonomy import LanguageDomain, OccupationCategory, PlatformRegistry

SDT = OccupationCategory.SOFTWARE_DEV_TECH
WRT = OccupationCategory.WRITING_TRANSLATION
FLAT = tuple([1.0] * 12)
START = date(2020, 1, 1)
END = date(2020, 12, 31)
LINK = date(2020, 9, 1)

POOLS = NamePools(
    female_known=("maria", "sofia", "elena"),
    male_known=("james", "david", "ivan"),
    female_unlisted=("zorina",),
    male_unlisted=("zorinel",),
    weights=(0.9, 0.0, 0.1),
)


def service_scenario() -> ScenarioConfig:
    en = [
        PlatformScenario(
            platform_id=pid,
            language_domain=LanguageDomain.EN,
            base_daily_volume=vol,
            annual_growth_rate=0.2,
            monthly_seasonal_factors=FLAT,
            occupation_mix={SDT: 0.5, WRT: 0.5},
            buyer_country_mix={"US": 0.6, "DE": 0.4},
            workers=WorkerPopulation(
                size=3000,
                country_mix={"IN": (0.3, 0.4), "US": (0.7, 0.6)},
                occupation_mix={SDT: 0.5, WRT: 0.5},
            ),
        )
        for pid, vol in [("simup", 40.0), ("simfree", 30.0)]
    ]
    es = PlatformScenario(
        platform_id="freelancer_es",
        language_domain=LanguageDomain.ES,
        base_daily_volume=20.0,
        annual_growth_rate=0.2,
        monthly_seasonal_factors=FLAT,
        occupation_mix={SDT: 0.8, WRT: 0.2},
        buyer_country_mix={"ES": 1.0},
        launch_date=date(2020, 6, 1),
    )
    return ScenarioConfig(
        name="service-test",
        seed=99,
        start_date=START,
        end_date=END,
        platforms=(*en, es),
        name_pools=POOLS,
        link_schedule=(LinkPlan(link_date=LINK, platforms_added=frozenset({"freelancer_es"})),),
    )


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("service")
    layout = DataLayout(tmp / "data")
    scenario = service_scenario()
    fixtures = generate(scenario)
    ingest_fixtures(fixtures, layout)
    config = ObservatoryConfig(
        window_days=28,
        link_schedule=(LinkScheduleEntry(LINK, frozenset({"freelancer_es"})),),
    )
    snapshot_id = rebuild(layout, PlatformRegistry.default(), config)
    return {"layout": layout, "fixtures": fixtures, "snapshot_id": snapshot_id}


@pytest.fixture(scope="module")
def client(pipeline):
    app = create_app(pipeline["layout"])
    return TestClient(app)


class TestIndexEndpoint:
    def test_headline_series(self, client, pipeline):
        r = client.get("/v1/index")
        assert r.status_code == 200
        assert r.headers["X-Snapshot-Id"] == str(pipeline["snapshot_id"])
        body = r.json()
        assert body["snapshot_id"] == pipeline["snapshot_id"]
        assert body["platform_domain"] == "ALL"
        points = body["points"]
        assert points[0]["value"] == 100.0
        assert len(body["link_events"]) == 1
        assert body["link_events"][0]["platforms_added"] == ["freelancer_es"]

    def test_domain_series_uses_domain_platforms_only(self, client):
        r = client.get("/v1/index", params={"platform_domain": "ES"})
        assert r.status_code == 200
        body = r.json()
        # ES platform launches June 1st; base needs a full June window
        assert body["base_date"] >= "2020-06-28"
        assert body["link_events"] == []

    def test_date_range_clipping_inclusive(self, client):
        r = client.get("/v1/index", params={"from": "2020-03-01", "to": "2020-03-31"})
        points = r.json()["points"]
        assert points[0]["date"] == "2020-03-01"
        assert points[-1]["date"] == "2020-03-31"
        assert len(points) == 31

    def test_from_after_to_is_400_naming_field(self, client):
        r = client.get("/v1/index", params={"from": "2020-05-01", "to": "2020-04-01"})
        assert r.status_code == 400
        detail = r.json()["detail"]
        assert detail[0]["loc"] == ["query", "from"]

    def test_unknown_enum_rejected(self, client):
        assert client.get("/v1/index", params={"platform_domain": "XX"}).status_code == 422
        assert client.get("/v1/index", params={"occupation": "plumbing"}).status_code == 422

    def test_unknown_country_rejected(self, client):
        r = client.get("/v1/index", params={"country": "Narnia"})
        assert r.status_code == 400
        assert "country" in str(r.json()["detail"])

    def test_country_alias_accepted(self, client):
        r = client.get("/v1/index", params={"country": "Germany"})
        assert r.status_code == 200
        assert r.json()["country"] == "DE"

    def test_occupation_filtered_series(self, client):
        r = client.get("/v1/index", params={"occupation": "software_dev_tech"})
        assert r.status_code == 200
        assert r.json()["occupation"] == "software_dev_tech"

    def test_csv_format_inline(self, client):
        r = client.get("/v1/index", params={"format": "csv"})
        assert r.status_code == 200
        assert r.headers["content-type"].startswith("text/csv")
        lines = r.text.splitlines()
        assert lines[0] == "date,value"


class TestSupplyEndpoint:
    def test_default_window(self, client):
        r = client.get("/v1/supply/countries")
        assert r.status_code == 200
        body = r.json()
        assert body["denominator"] > 0
        assert sum(body["shares"].values()) == pytest.approx(1.0, abs=1e-9)
        assert set(body["shares"]) == {"IN", "US"}

    def test_as_of_slider_moves_shares(self, client):
        early = client.get(
            "/v1/supply/countries", params={"as_of": "2020-04-30", "window_days": 120}
        ).json()
        late = client.get(
            "/v1/supply/countries", params={"as_of": "2020-12-31", "window_days": 120}
        ).json()
        assert late["shares"]["IN"] > early["shares"]["IN"]

    def test_occupation_filter_renormalizes(self, client):
        r = client.get("/v1/supply/countries", params={"occupation": "software_dev_tech"})
        body = r.json()
        assert sum(body["shares"].values()) == pytest.approx(1.0, abs=1e-9)


class TestDemandEndpoint:
    def test_global_shares_and_top(self, client):
        r = client.get("/v1/demand/occupations")
        body = r.json()
        assert body["denominator"] > 0
        assert sum(body["shares"].values()) == pytest.approx(1.0, abs=1e-9)
        assert body["top_category"] in body["shares"]
        assert set(body["by_country_top"]) == {"US", "DE", "ES"}

    def test_domain_filter(self, client):
        r = client.get("/v1/demand/occupations", params={"platform_domain": "ES"})
        body = r.json()
        assert body["shares"]["software_dev_tech"] == pytest.approx(0.8, abs=0.05)
        assert body["by_country_top"] == {"ES": "software_dev_tech"}

    def test_single_country_filter(self, client):
        r = client.get("/v1/demand/occupations", params={"country": "DE"})
        assert r.status_code == 200
        assert r.json()["country"] == "DE"


class TestGenderEndpoint:
    def test_global_share(self, client):
        r = client.get("/v1/gender")
        body = r.json()
        assert len(body["groups"]) == 1
        row = body["groups"][0]
        assert row["share_female"] is not None
        assert 0 < row["share_female"] < 1
        assert row["female"] + row["male"] + row["unknown"] == row["total"]
        assert 0.8 < row["coverage"] <= 0.95

    def test_group_by_country(self, client):
        r = client.get("/v1/gender", params={"group_by": "country"})
        countries = {g["country"] for g in r.json()["groups"]}
        assert countries == {"IN", "US"}

    def test_filtered_single_group(self, client):
        r = client.get(
            "/v1/gender",
            params={"country": "US", "occupation": "writing_translation"},
        )
        body = r.json()
        assert body["country"] == "US"
        assert len(body["groups"]) == 1

    def test_window_filter(self, client):
        r = client.get("/v1/gender", params={"from": "2020-01-01", "to": "2020-03-31"})
        full = client.get("/v1/gender").json()["groups"][0]["total"]
        windowed = r.json()["groups"][0]["total"]
        assert 0 < windowed < full


class TestExportEndpoint:
    @pytest.mark.parametrize("dataset", ["index", "supply_countries", "demand_occupations", "gender"])
    def test_attachment_headers(self, client, dataset):
        r = client.get("/v1/export.csv", params={"dataset": dataset})
        assert r.status_code == 200
        assert "attachment" in r.headers["content-disposition"]
        assert r.headers["content-type"].startswith("text/csv")

    def test_index_csv_matches_json(self, client):
        csv_text = client.get("/v1/export.csv", params={"dataset": "index"}).text
        body = client.get("/v1/index").json()
        rows = list(csv.DictReader(io.StringIO(csv_text)))
        assert len(rows) == len(body["points"])
        for row, point in zip(rows, body["points"]):
            assert row["date"] == point["date"]
            assert float(row["value"]) == pytest.approx(round(point["value"], 6), abs=5e-7)

    def test_supply_csv_matches_json(self, client):
        params = {"dataset": "supply_countries", "as_of": "2020-12-01"}
        csv_text = client.get("/v1/export.csv", params=params).text
        body = client.get("/v1/supply/countries", params={"as_of": "2020-12-01"}).json()
        rows = {r["key"]: r for r in csv.DictReader(io.StringIO(csv_text))}
        assert set(rows) == set(body["shares"])
        for key, row in rows.items():
            assert float(row["share"]) == pytest.approx(round(body["shares"][key], 6), abs=5e-7)
            assert int(row["denominator"]) == body["denominator"]

    def test_header_schema(self, client):
        text = client.get("/v1/export.csv", params={"dataset": "supply_countries"}).text
        assert text.splitlines()[0] == "as_of,axis,key,share,denominator"
        text = client.get("/v1/export.csv", params={"dataset": "index"}).text
        assert text.splitlines()[0] == "date,value"

    def test_large_export_not_truncated(self, client):
        text = client.get("/v1/export.csv", params={"dataset": "index"}).text
        body = client.get("/v1/index").json()
        assert len(text.splitlines()) == len(body["points"]) + 1


class TestServiceLifecycle:
    def test_no_snapshot_is_503(self, tmp_path):
        app = create_app(DataLayout(tmp_path / "empty"))
        r = TestClient(app).get("/v1/index")
        assert r.status_code == 503

    def test_health(self, client):
        assert client.get("/health").json() == {"status": "ok"}

    def test_snapshot_info(self, client, pipeline):
        body = client.get("/v1/snapshot").json()
        assert body["snapshot_id"] == pipeline["snapshot_id"]
        assert "ALL" in body["domains"]

    def test_responses_pure_function_of_snapshot_and_query(self, client):
        a = client.get("/v1/index").json()
        b = client.get("/v1/index").json()
        assert a == b

    def test_static_dashboard_mount(self, pipeline, tmp_path):
        static = tmp_path / "dist"
        static.mkdir()
        (static / "index.html").write_text("<html><body>dashboard</body></html>")
        app = create_app(pipeline["layout"], static_dir=static)
        local = TestClient(app)
        assert "dashboard" in local.get("/").text
        assert local.get("/v1/index").status_code == 200  # API still wins

    def test_new_snapshot_picked_up_after_publish(self, pipeline):
        app = create_app(pipeline["layout"])
        local = TestClient(app)
        first = local.get("/v1/snapshot").json()["snapshot_id"]
        config = ObservatoryConfig(
            window_days=28,
            link_schedule=(LinkScheduleEntry(LINK, frozenset({"freelancer_es"})),),
        )
        new_id = rebuild(pipeline["layout"], PlatformRegistry.default(), config)
        assert new_id == first + 1
        assert local.get("/v1/snapshot").json()["snapshot_id"] == new_id
        assert local.get("/v1/index").headers["X-Snapshot-Id"] == str(new_id)
