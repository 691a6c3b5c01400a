"""The public read-only HTTP API over published snapshots.

Every response is a pure function of (snapshot_id, query): handlers
resolve the current snapshot once, compute from its immutable artifacts,
and echo the snapshot id in the X-Snapshot-Id header. All mutation
happens elsewhere (CLI crawl/rebuild); this app only reads.
"""

from __future__ import annotations

from datetime import date
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..demographics import female_share
from ..errors import IndexComputationError, SnapshotError
from ..exports import gender_csv, link_events_csv, series_csv, share_csv
from ..index import demand_share_by_occupation, supply_share_by_country, top_category_by_country
from ..store import DataLayout
from ..taxonomy import (
    LanguageDomain,
    OccupationCategory,
    PlatformRegistry,
    UNKNOWN_COUNTRY,
    normalize_country,
)
from .schemas import (
    DatasetParam,
    DemandResponse,
    DomainParam,
    FormatParam,
    GenderGroup,
    GenderResponse,
    GroupByParam,
    IndexPoint,
    IndexResponse,
    LinkEventModel,
    OccupationParam,
    SnapshotInfo,
    SupplyResponse,
)
from .state import SnapshotCache, SnapshotData


def _bad_query(field: str, message: str) -> HTTPException:
    return HTTPException(
        status_code=400,
        detail=[{"loc": ["query", field], "msg": message, "type": "value_error"}],
    )


def _check_range(date_from: date | None, date_to: date | None) -> None:
    if date_from is not None and date_to is not None and date_from > date_to:
        raise _bad_query("from", "'from' must not be after 'to'")


def _country_or_400(raw: str | None, field: str) -> str | None:
    if raw is None:
        return None
    code = normalize_country(raw)
    if code == UNKNOWN_COUNTRY and raw.strip().upper() != UNKNOWN_COUNTRY:
        raise _bad_query(field, f"unknown country {raw!r}")
    return code


def _occupation(param: OccupationParam | None) -> OccupationCategory | None:
    return OccupationCategory(param.value) if param is not None else None


def create_app(
    layout: DataLayout,
    registry: PlatformRegistry | None = None,
    static_dir: Path | str | None = None,
) -> FastAPI:
    registry = registry or PlatformRegistry.default()
    cache = SnapshotCache(layout, registry)
    app = FastAPI(title="online-labour-observatory", version="1.0")

    def current_snapshot(response: Response) -> SnapshotData:
        try:
            data = cache.current()
        except SnapshotError as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        response.headers["X-Snapshot-Id"] = str(data.snapshot_id)
        return data

    def compute_series(data: SnapshotData, domain: DomainParam, occupation, country):
        try:
            return cache.series(data, domain.value, occupation, country)
        except IndexComputationError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    # -- endpoints ------------------------------------------------------

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/v1/snapshot", response_model=SnapshotInfo)
    def snapshot_info(response: Response):
        data = current_snapshot(response)
        return SnapshotInfo(
            snapshot_id=data.snapshot_id,
            created_at=data.manifest.get("created_at", ""),
            provenance=data.manifest.get("provenance", {}),
            window_days=data.window_days,
            domains=data.manifest.get("domains", {}),
        )

    def index_payload(
        data: SnapshotData,
        platform_domain: DomainParam,
        occupation: OccupationParam | None,
        country: str | None,
        date_from: date | None,
        date_to: date | None,
    ) -> IndexResponse:
        series = compute_series(data, platform_domain, _occupation(occupation), country)
        points = series.clipped(date_from, date_to)
        return IndexResponse(
            snapshot_id=data.snapshot_id,
            platform_domain=platform_domain.value,
            occupation=occupation.value if occupation else None,
            country=country,
            base_date=series.base_date,
            window_days=series.window_days,
            points=[IndexPoint(date=d, value=v) for d, v in points.items()],
            link_events=[
                LinkEventModel(
                    link_date=e.link_date,
                    platforms_added=sorted(e.platforms_added),
                    link_factor=e.link_factor,
                )
                for e in series.link_events
            ],
        )

    @app.get("/v1/index", response_model=IndexResponse)
    def get_index(
        response: Response,
        platform_domain: DomainParam = DomainParam.ALL,
        occupation: OccupationParam | None = None,
        country: str | None = None,
        date_from: date | None = Query(None, alias="from"),
        date_to: date | None = Query(None, alias="to"),
        format: FormatParam = FormatParam.json,
    ):
        _check_range(date_from, date_to)
        country_code = _country_or_400(country, "country")
        data = current_snapshot(response)
        payload = index_payload(data, platform_domain, occupation, country_code, date_from, date_to)
        if format is FormatParam.csv:
            body = series_csv({p.date: p.value for p in payload.points})
            return PlainTextResponse(
                body, media_type="text/csv; charset=utf-8",
                headers={"X-Snapshot-Id": str(data.snapshot_id)},
            )
        return payload

    def supply_payload(
        data: SnapshotData,
        as_of: date | None,
        window_days: int | None,
        occupation: OccupationParam | None,
    ) -> SupplyResponse:
        as_of = as_of or data.last_date()
        window = window_days or data.supply_window_days
        table = supply_share_by_country(
            data.workers, as_of, window, occupation=_occupation(occupation)
        )
        return SupplyResponse(
            snapshot_id=data.snapshot_id,
            as_of=as_of,
            window_days=window,
            occupation=occupation.value if occupation else None,
            denominator=table.denominator,
            shares=dict(sorted(table.shares.items(), key=lambda kv: (-kv[1], kv[0]))),
        )

    @app.get("/v1/supply/countries", response_model=SupplyResponse)
    def get_supply(
        response: Response,
        as_of: date | None = None,
        window_days: int | None = Query(None, ge=1),
        occupation: OccupationParam | None = None,
        format: FormatParam = FormatParam.json,
    ):
        data = current_snapshot(response)
        payload = supply_payload(data, as_of, window_days, occupation)
        if format is FormatParam.csv:
            table = _supply_table(payload)
            return PlainTextResponse(
                share_csv(table), media_type="text/csv; charset=utf-8",
                headers={"X-Snapshot-Id": str(data.snapshot_id)},
            )
        return payload

    def demand_payload(
        data: SnapshotData,
        as_of: date | None,
        window_days: int | None,
        platform_domain: DomainParam,
        country: str | None,
    ) -> DemandResponse:
        as_of = as_of or data.last_date()
        window = window_days or data.demand_window_days
        domain = None if platform_domain is DomainParam.ALL else LanguageDomain(platform_domain.value)
        table = demand_share_by_occupation(
            data.cube, as_of, window,
            buyer_country=country, domain=domain, registry=registry,
        )
        by_country = top_category_by_country(
            data.cube, as_of, window, domain=domain, registry=registry
        )
        return DemandResponse(
            snapshot_id=data.snapshot_id,
            as_of=as_of,
            window_days=window,
            platform_domain=platform_domain.value,
            country=country,
            denominator=table.denominator,
            shares=dict(sorted(table.shares.items(), key=lambda kv: (-kv[1], kv[0]))),
            top_category=table.top_key,
            by_country_top=dict(sorted(by_country.items())),
        )

    @app.get("/v1/demand/occupations", response_model=DemandResponse)
    def get_demand(
        response: Response,
        as_of: date | None = None,
        window_days: int | None = Query(None, ge=1),
        platform_domain: DomainParam = DomainParam.ALL,
        country: str | None = None,
        format: FormatParam = FormatParam.json,
    ):
        country_code = _country_or_400(country, "country")
        data = current_snapshot(response)
        payload = demand_payload(data, as_of, window_days, platform_domain, country_code)
        if format is FormatParam.csv:
            table = _demand_table(payload)
            return PlainTextResponse(
                share_csv(table), media_type="text/csv; charset=utf-8",
                headers={"X-Snapshot-Id": str(data.snapshot_id)},
            )
        return payload

    def gender_payload(
        data: SnapshotData,
        group_by: GroupByParam,
        country: str | None,
        occupation: OccupationParam | None,
        date_from: date | None,
        date_to: date | None,
    ) -> GenderResponse:
        workers = data.workers
        if country is not None and not workers.empty:
            workers = workers[workers["country"] == country]
        if occupation is not None and not workers.empty:
            workers = workers[workers["category"] == occupation.value]
        window = None
        if date_from is not None or date_to is not None:
            start = date_from or date.min
            end = date_to or data.last_date()
            window = (start, end)
        rows = female_share(workers, None, group_by=group_by.value, window=window)
        groups = []
        for key in sorted(rows):
            row = rows[key]
            g_country = g_occupation = None
            if group_by is GroupByParam.country:
                (g_country,) = key
            elif group_by is GroupByParam.occupation:
                (g_occupation,) = key
            elif group_by is GroupByParam.country_occupation:
                g_country, g_occupation = key
            groups.append(
                GenderGroup(
                    country=g_country,
                    occupation=g_occupation,
                    share_female=row.share_female,
                    classified=row.classified,
                    coverage=row.coverage,
                    female=row.female,
                    male=row.male,
                    unknown=row.unknown,
                    total=row.total,
                )
            )
        return GenderResponse(
            snapshot_id=data.snapshot_id,
            group_by=group_by.value,
            from_date=date_from,
            to_date=date_to,
            country=country,
            occupation=occupation.value if occupation else None,
            groups=groups,
        )

    @app.get("/v1/gender", response_model=GenderResponse)
    def get_gender(
        response: Response,
        group_by: GroupByParam = GroupByParam.none,
        country: str | None = None,
        occupation: OccupationParam | None = None,
        date_from: date | None = Query(None, alias="from"),
        date_to: date | None = Query(None, alias="to"),
        format: FormatParam = FormatParam.json,
    ):
        _check_range(date_from, date_to)
        country_code = _country_or_400(country, "country")
        data = current_snapshot(response)
        payload = gender_payload(data, group_by, country_code, occupation, date_from, date_to)
        if format is FormatParam.csv:
            rows = _gender_rows(payload)
            return PlainTextResponse(
                gender_csv(rows, group_by.value), media_type="text/csv; charset=utf-8",
                headers={"X-Snapshot-Id": str(data.snapshot_id)},
            )
        return payload

    @app.get("/v1/export.csv")
    def export_csv(
        response: Response,
        dataset: DatasetParam,
        platform_domain: DomainParam = DomainParam.ALL,
        occupation: OccupationParam | None = None,
        country: str | None = None,
        as_of: date | None = None,
        window_days: int | None = Query(None, ge=1),
        group_by: GroupByParam = GroupByParam.none,
        date_from: date | None = Query(None, alias="from"),
        date_to: date | None = Query(None, alias="to"),
        include_link_events: bool = False,
    ):
        _check_range(date_from, date_to)
        country_code = _country_or_400(country, "country")
        data = current_snapshot(response)
        if dataset is DatasetParam.index:
            payload = index_payload(
                data, platform_domain, occupation, country_code, date_from, date_to
            )
            body = series_csv({p.date: p.value for p in payload.points})
            if include_link_events:
                from ..index.series import ChainLinkEvent

                events = [
                    ChainLinkEvent(e.link_date, frozenset(e.platforms_added), e.link_factor)
                    for e in payload.link_events
                ]
                body += link_events_csv(events)
        elif dataset is DatasetParam.supply_countries:
            body = share_csv(_supply_table(supply_payload(data, as_of, window_days, occupation)))
        elif dataset is DatasetParam.demand_occupations:
            body = share_csv(
                _demand_table(
                    demand_payload(data, as_of, window_days, platform_domain, country_code)
                )
            )
        else:
            payload = gender_payload(
                data, group_by, country_code, occupation, date_from, date_to
            )
            body = gender_csv(_gender_rows(payload), group_by.value)
        filename = f"olx_{dataset.value}_{data.snapshot_id}.csv"
        return PlainTextResponse(
            body,
            media_type="text/csv; charset=utf-8",
            headers={
                "Content-Disposition": f'attachment; filename="{filename}"',
                "X-Snapshot-Id": str(data.snapshot_id),
            },
        )

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="dashboard")

    return app


def _supply_table(payload: SupplyResponse):
    from ..index.shares import ShareTable

    return ShareTable(
        as_of=payload.as_of,
        window_days=payload.window_days,
        axis="supply_country",
        shares=dict(payload.shares),
        denominator=payload.denominator,
        filters={"occupation": payload.occupation} if payload.occupation else {},
    )


def _demand_table(payload: DemandResponse):
    from ..index.shares import ShareTable

    filters = {}
    if payload.platform_domain != "ALL":
        filters["domain"] = payload.platform_domain
    if payload.country:
        filters["country"] = payload.country
    return ShareTable(
        as_of=payload.as_of,
        window_days=payload.window_days,
        axis="demand_occupation",
        shares=dict(payload.shares),
        denominator=payload.denominator,
        filters=filters,
    )


def _gender_rows(payload: GenderResponse):
    from ..demographics import GenderShareRow

    rows = {}
    for g in payload.groups:
        key_parts = []
        if g.country is not None:
            key_parts.append(g.country)
        if g.occupation is not None:
            key_parts.append(g.occupation)
        key = tuple(key_parts)
        rows[key] = GenderShareRow(
            group=key,
            share_female=g.share_female,
            classified=g.classified,
            coverage=g.coverage,
            female=g.female,
            male=g.male,
            unknown=g.unknown,
            total=g.total,
        )
    return rows
