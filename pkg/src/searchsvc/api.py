"""HTTP service consumed by the definition studio and other clients.

All search/render responses are produced by the same canonical JSON dump the
CLI uses, so the two surfaces are byte-identical for equal inputs.
"""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, replace

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import extraction, klm
from .dom import DocumentHandle, NodePath, parse_html, sanitize_html
from .errors import (
    FetchFailedError,
    NotFoundError,
    SearchServiceError,
    SpecParseError,
    VersionMismatchError,
)
from .execution import ProviderRegistry, default_registry, detect_strategy, execute
from .extraction import enrich_in_target, result_set_to_text
from .httpclient import Fetcher, HttpRequestPlan, HttpxFetcher
from .model import (
    SearchQuery,
    canonical_json,
    export_bundle,
    import_bundle,
    new_service_id,
    spec_from_json_dict,
    spec_to_json_dict,
    utc_now_iso,
    validate_spec,
)
from .selectors import suggest_selectors
from .store import SpecStore
from .visualizers import VisualizerRegistry
from .visualizers import default_registry as default_visualizers

DEFAULT_SNAPSHOT_TTL_SECONDS = 30 * 60


@dataclass(frozen=True)
class DocumentSnapshot:
    """A sanitized, parsed page the studio picks elements from."""

    snapshot_id: str
    url: str
    fetched_at: str
    sanitized_html: str
    handle: DocumentHandle


class _SnapshotStore:
    def __init__(self, ttl_seconds: float):
        self.ttl = ttl_seconds
        self._lock = threading.Lock()
        self._entries: dict[str, tuple[float, DocumentSnapshot]] = {}

    def put(self, snapshot: DocumentSnapshot) -> None:
        now = time.monotonic()
        with self._lock:
            self._entries = {
                sid: (exp, snap) for sid, (exp, snap) in self._entries.items()
                if exp > now
            }
            self._entries[snapshot.snapshot_id] = (now + self.ttl, snapshot)

    def get(self, snapshot_id: str) -> DocumentSnapshot:
        with self._lock:
            entry = self._entries.get(snapshot_id)
            if entry is None or entry[0] <= time.monotonic():
                raise NotFoundError(f"no snapshot {snapshot_id!r} (expired?)")
            return entry[1]


class FetchRequest(BaseModel):
    url: str


class SuggestRequest(BaseModel):
    snapshot_id: str
    node_path: list[int]


class DetectRequest(BaseModel):
    probe_a: str
    probe_b: str


class SearchRequest(BaseModel):
    keywords: str = ""
    filters: list[str] = Field(default_factory=list)
    ordering: str | None = None
    page: int = 1
    enrich: bool = False


class RenderRequest(SearchRequest):
    visualizer_id: str | None = None
    options: dict = Field(default_factory=dict)


class KlmRequest(BaseModel):
    scenario: dict


def _canonical_response(payload, status_code: int = 200) -> Response:
    return Response(content=canonical_json(payload), status_code=status_code,
                    media_type="application/json")


def create_app(store_dir: str, fetcher: Fetcher | None = None,
               provider_registry: ProviderRegistry | None = None,
               visualizer_registry: VisualizerRegistry | None = None,
               snapshot_ttl_seconds: float = DEFAULT_SNAPSHOT_TTL_SECONDS) -> FastAPI:
    app = FastAPI(title="searchsvc", version="0.1.0")
    store = SpecStore(store_dir)
    snapshots = _SnapshotStore(snapshot_ttl_seconds)
    fetcher = fetcher or HttpxFetcher()
    providers = provider_registry or default_registry
    visualizers = visualizer_registry or default_visualizers

    @app.exception_handler(SearchServiceError)
    async def domain_error_handler(request: Request, exc: SearchServiceError):
        status = 422
        if isinstance(exc, NotFoundError):
            status = 404
        elif isinstance(exc, FetchFailedError):
            status = 502
        elif isinstance(exc, (SpecParseError, VersionMismatchError)):
            status = 400
        return JSONResponse(status_code=status,
                            content={"error": exc.code, "message": str(exc)})

    # -- snapshots & picking ------------------------------------------------

    @app.post("/fetch")
    def fetch_page(body: FetchRequest):
        response = fetcher.fetch(HttpRequestPlan(method="GET", url=body.url))
        if not response.ok:
            raise FetchFailedError(
                f"GET {body.url} returned status {response.status}")
        clean = sanitize_html(response.body)
        snapshot = DocumentSnapshot(
            snapshot_id=secrets.token_hex(8),
            url=response.final_url,
            fetched_at=utc_now_iso(),
            sanitized_html=clean,
            handle=parse_html(clean, base_url=response.final_url),
        )
        snapshots.put(snapshot)
        return {"snapshot_id": snapshot.snapshot_id, "url": snapshot.url,
                "sanitized_html": snapshot.sanitized_html}

    @app.post("/selectors/suggest")
    def suggest(body: SuggestRequest):
        snapshot = snapshots.get(body.snapshot_id)
        suggestions = suggest_selectors(snapshot.handle,
                                        NodePath(tuple(body.node_path)))
        return {"suggestions": [s.to_json() for s in suggestions]}

    # -- service CRUD -------------------------------------------------------

    @app.get("/services")
    def list_services():
        return {"services": [spec_to_json_dict(s) for s in store.list()]}

    @app.post("/services", status_code=201)
    def create_service(raw: dict):
        raw = dict(raw)
        raw.setdefault("id", new_service_id())
        raw.setdefault("metadata", {})
        if isinstance(raw["metadata"], dict):
            raw["metadata"].setdefault("format_version", "1")
            raw["metadata"].setdefault("created", utc_now_iso())
        spec = spec_from_json_dict(raw)
        report = validate_spec(spec)
        if not report.ok:
            return JSONResponse(status_code=400, content={
                "error": "validation", "problems": report.to_json()})
        store.save(spec)
        return {"id": spec.id, "warnings": [p.message for p in report.warnings]}

    @app.get("/services/{service_id}")
    def get_service(service_id: str):
        return spec_to_json_dict(store.load(service_id))

    @app.put("/services/{service_id}")
    def update_service(service_id: str, raw: dict):
        store.load(service_id)  # 404 when absent
        raw = dict(raw)
        raw["id"] = service_id
        spec = spec_from_json_dict(raw)
        report = validate_spec(spec)
        if not report.ok:
            return JSONResponse(status_code=400, content={
                "error": "validation", "problems": report.to_json()})
        store.save(spec)
        return {"id": service_id, "warnings": [p.message for p in report.warnings]}

    @app.delete("/services/{service_id}", status_code=204)
    def delete_service(service_id: str):
        store.delete(service_id)
        return Response(status_code=204)

    # -- engine operations --------------------------------------------------

    @app.post("/services/{service_id}/detect-strategy")
    def detect(service_id: str, body: DetectRequest):
        spec = store.load(service_id)
        config = detect_strategy(replace(spec, strategy=None),
                                 body.probe_a, body.probe_b, fetcher)
        store.save(replace(spec, strategy=config))
        return spec_to_json_dict(replace(spec, strategy=config))["strategy"]

    def _run_search(service_id: str, body: SearchRequest):
        spec = store.load(service_id)
        query = SearchQuery(
            keywords=body.keywords,
            active_filters=tuple(body.filters),
            active_ordering=body.ordering,
            page=body.page,
        )
        result_set, _cursor = execute(spec, query, fetcher, registry=providers)
        if body.enrich:
            items = enrich_in_target(list(result_set.items), spec.result_spec,
                                     fetcher)
            result_set = replace(result_set, items=tuple(items))
        return result_set

    @app.post("/services/{service_id}/search")
    def search(service_id: str, body: SearchRequest):
        result_set = _run_search(service_id, body)
        return Response(content=result_set_to_text(result_set),
                        media_type="application/json")

    # -- visualizers ----------------------------------------------------------

    @app.get("/visualizers")
    def list_visualizers():
        return {"visualizers": [d.to_json() for d in visualizers.list()]}

    @app.post("/services/{service_id}/render")
    def render_results(service_id: str, body: RenderRequest):
        result_set = _run_search(service_id, body)
        model = visualizers.render(result_set, body.visualizer_id, body.options)
        return _canonical_response(model.to_json())

    # -- bundles --------------------------------------------------------------

    @app.get("/services/{service_id}/export")
    def export_service(service_id: str):
        bundle = export_bundle([store.load(service_id)])
        return Response(content=bundle, media_type="application/json")

    @app.get("/services-export")
    def export_all():
        bundle = export_bundle(store.list())
        return Response(content=bundle, media_type="application/json")

    @app.post("/services/import")
    def import_services(raw: dict):
        result = import_bundle(canonical_json(raw), existing_ids=store.ids())
        for spec in result.imported:
            store.save(spec)
        return result.to_json()

    # -- estimation -----------------------------------------------------------

    @app.post("/klm/estimate")
    def klm_estimate(body: KlmRequest):
        scenario = klm.scenario_from_json_dict(body.scenario)
        table = klm.OperatorTable()
        total = klm.estimate(scenario, table)
        return _canonical_response({
            "total": float(total),
            "per_step": [
                {"label": step.label, "seconds": float(step.duration(table))}
                for step in scenario.steps
            ],
        })

    return app
