"""Mock freelance-platform HTTP servers over a generated fixture set.

One app serves every platform in the scenario under /{platform_id}/...,
with paginated newest-first posting listings and roster-ordered profile
listings in the platform's payload kind (JSON or HTML). Per-platform
fault injection (down / slow / corrupt_item) is toggleable at runtime
through a control endpoint.
"""

from __future__ import annotations

import threading
import time
from html import escape

import uvicorn
from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import HTMLResponse, JSONResponse
from pydantic import BaseModel

from ..errors import ScenarioError
from .generate import FixtureSet

_POSTING_FIELDS = ("posting_id", "posted_at", "native_category", "buyer_country", "title")
_PROFILE_FIELDS = ("worker_id", "observed_at", "country", "given_name", "native_category")


class FaultRequest(BaseModel):
    mode: str | None = None  # down | slow | corrupt_item | None


def _posting_items(fixtures: FixtureSet, platform_id: str, start: int, stop: int) -> list[dict]:
    fixture = fixtures.platforms[platform_id]
    page = fixture.postings.iloc[start:stop]
    corrupt: set[int] = set()
    if fixtures.faults.get(platform_id) == "corrupt_item":
        positions = fixtures.corrupt_positions(platform_id)
        corrupt = {int(i) for i in positions if start <= i < stop}
    items = []
    for offset, row in enumerate(page.itertuples(index=False), start=start):
        posted = "###corrupt###" if offset in corrupt else row.posted_at_str
        items.append(
            {
                "id": row.posting_id,
                "created_at": posted,
                "category": {"name": row.native_category},
                "buyer_country": row.served_country,
                "title": row.title,
            }
        )
    return items


def _profile_items(fixtures: FixtureSet, platform_id: str, start: int, stop: int) -> list[dict]:
    page = fixtures.platforms[platform_id].profiles.iloc[start:stop]
    return [
        {
            "uid": row.worker_id,
            "country": row.country,
            "first_name": row.given_name,
            "specialty": row.native_category,
            "last_active": row.observed_at_str,
        }
        for row in page.itertuples(index=False)
    ]


_HTML_FIELD_MAP = {
    "postings": {
        "posting_id": "id",
        "posted_at": "created_at",
        "native_category": lambda item: item["category"]["name"],
        "buyer_country": "buyer_country",
        "title": "title",
    },
    "profiles": {
        "worker_id": "uid",
        "observed_at": "last_active",
        "country": "country",
        "given_name": "first_name",
        "native_category": "specialty",
    },
}


def _render_html(kind: str, items: list[dict]) -> str:
    parts = ['<!doctype html><html><body><ul class="items">']
    for item in items:
        parts.append('<li class="item">')
        for field, source in _HTML_FIELD_MAP[kind].items():
            value = source(item) if callable(source) else item[source]
            parts.append(f'<span data-field="{field}">{escape(str(value or ""))}</span>')
        parts.append("</li>")
    parts.append("</ul></body></html>")
    return "".join(parts)


def build_app(fixtures: FixtureSet) -> FastAPI:
    app = FastAPI(title="mock-platforms", docs_url=None, redoc_url=None)

    def check_platform(platform_id: str) -> None:
        if platform_id not in fixtures.platforms:
            raise HTTPException(status_code=404, detail=f"unknown platform {platform_id}")
        fault = fixtures.faults.get(platform_id)
        if fault == "down":
            raise HTTPException(status_code=503, detail="platform down (injected fault)")
        if fault == "slow":
            time.sleep(0.25)

    def listing(platform_id: str, kind: str, page: int, page_size: int):
        check_platform(platform_id)
        fixture = fixtures.platforms[platform_id]
        table = fixture.postings if kind == "postings" else fixture.profiles
        total = len(table)
        start = (page - 1) * page_size
        stop = min(start + page_size, total)
        if start >= total:
            items = []
        elif kind == "postings":
            items = _posting_items(fixtures, platform_id, start, stop)
        else:
            items = _profile_items(fixtures, platform_id, start, stop)
        if fixture.config.payload_kind == "html":
            return HTMLResponse(_render_html(kind, items))
        return JSONResponse({"items": items, "page": page, "total": total})

    @app.get("/{platform_id}/postings")
    def postings(platform_id: str, page: int = Query(1, ge=1), page_size: int = Query(500, ge=1)):
        return listing(platform_id, "postings", page, page_size)

    @app.get("/{platform_id}/profiles")
    def profiles(platform_id: str, page: int = Query(1, ge=1), page_size: int = Query(500, ge=1)):
        return listing(platform_id, "profiles", page, page_size)

    @app.put("/_control/faults/{platform_id}")
    def set_fault(platform_id: str, request: FaultRequest):
        if platform_id not in fixtures.platforms:
            raise HTTPException(status_code=404, detail=f"unknown platform {platform_id}")
        if request.mode is None:
            fixtures.faults.pop(platform_id, None)
        elif request.mode in ("down", "slow", "corrupt_item"):
            fixtures.faults[platform_id] = request.mode
        else:
            raise HTTPException(status_code=422, detail=f"unknown fault mode {request.mode!r}")
        return {"platform_id": platform_id, "mode": fixtures.faults.get(platform_id)}

    @app.get("/_control/platforms")
    def platforms():
        return {
            pid: {
                "postings": len(f.postings),
                "profiles": len(f.profiles),
                "payload_kind": f.config.payload_kind,
                "fault": fixtures.faults.get(pid),
            }
            for pid, f in fixtures.platforms.items()
        }

    return app


class MockPlatformServer:
    """Uvicorn in a daemon thread; stoppable, with the bound port exposed."""

    def __init__(self, fixtures: FixtureSet, host: str = "127.0.0.1", port: int = 0):
        self.fixtures = fixtures
        self._config = uvicorn.Config(
            build_app(fixtures), host=host, port=port, log_level="warning"
        )
        self._server = uvicorn.Server(self._config)
        self._thread: threading.Thread | None = None
        self._startup_error: BaseException | None = None

    def _run(self) -> None:
        try:
            self._server.run()
        except BaseException as exc:  # bind failures surface via start()
            self._startup_error = exc

    def start(self, timeout: float = 10.0) -> "MockPlatformServer":
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()
        deadline = time.monotonic() + timeout
        while not self._server.started:
            if not self._thread.is_alive():
                raise ScenarioError(
                    f"mock server failed to start on {self._config.host}:{self._config.port}"
                    f" (port conflict?): {self._startup_error}"
                )
            if time.monotonic() > deadline:
                raise ScenarioError("mock server did not start in time")
            time.sleep(0.01)
        return self

    @property
    def port(self) -> int:
        return self._server.servers[0].sockets[0].getsockname()[1]

    @property
    def base_url(self) -> str:
        return f"http://{self._config.host}:{self.port}"

    def stop(self) -> None:
        self._server.should_exit = True
        if self._thread is not None:
            self._thread.join(timeout=10)

    def __enter__(self) -> "MockPlatformServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
