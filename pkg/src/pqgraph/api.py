"""HTTP service: snapshots, scoring reports, review queue, settings.

Graph versions are immutable, content-addressed blobs. Requests without an
explicit ``version`` operate on the head version; when human review
decisions have marked the head dirty, the first such read materializes a
successor version with those decisions applied and the head pointer moves.
Requests that pin a version always see exactly those bytes.

Every non-success response body is a single error object with ``code`` in
{not_found, conflict, invalid_input, unavailable} and a ``message``.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .config import ScoringConfig, make_context
from .errors import (
    ConfigurationError,
    ConflictError,
    EndpointUnavailableError,
    NotFoundError,
    ParseError,
    PathExplosionError,
    StructuralError,
    ValidationError,
)
from .exposure import score_report
from .graph import AssetGraph, GraphIndex, Relation
from .kernels import active_backend
from .paths import enumerate_paths
from .snapshot import (
    from_graph,
    parse_snapshot,
    serialize_snapshot,
    to_graph,
)
from .validation.models import ValidationSettings
from .validation.pipeline import (
    apply_pipeline_outcomes,
    apply_review_decisions,
    enqueue_unvalidated,
    pipeline_stats,
)
from .validation.store import Store

log = logging.getLogger(__name__)

_ERROR_STATUS = {
    "not_found": 404,
    "conflict": 409,
    "invalid_input": 400,
    "unavailable": 503,
}

VIEWS = ("validation_status", "pq_heatmap", "service_mesh", "vpn_chokepoints")


class ApiError(Exception):
    def __init__(self, code: str, message: str):
        assert code in _ERROR_STATUS
        self.code = code
        self.message = message
        super().__init__(message)


def _error_response(code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=_ERROR_STATUS[code], content={"code": code, "message": message})


def _node_payload(graph: AssetGraph) -> list[dict[str, Any]]:
    out = []
    for nid in sorted(graph.nodes):
        n = graph.nodes[nid]
        out.append(
            {
                "id": n.id,
                "kind": n.kind.value,
                "label": n.label,
                "resistance": n.resistance,
                "business_weight": n.business_weight,
                "domains": sorted(n.domains),
                "crown_impact": n.crown_impact,
                "is_entry": n.is_entry,
                "attributes": dict(n.attributes),
            }
        )
    return out


def _edge_payload(graph: AssetGraph) -> list[dict[str, Any]]:
    return [
        {
            "source": e.source,
            "target": e.target,
            "relation": e.relation.value,
            "exploitability": e.exploitability,
            "validation_status": e.validation_status.value,
        }
        for e in graph.edges
    ]


async def _json_body(request: Request) -> Any:
    try:
        return await request.json()
    except Exception:
        raise ApiError("invalid_input", "request body is not valid JSON")


def create_app(
    store: Store,
    auth_token: str | None = None,
    static_dir: str | Path | None = None,
    chokepoint_min_paths: int = 2,
) -> FastAPI:
    app = FastAPI(title="pqgraph", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.store = store
    app.state.report_cache = {}

    # -- error envelope ------------------------------------------------------

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return _error_response(exc.code, exc.message)

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return _error_response("not_found", str(exc))

    @app.exception_handler(ConflictError)
    async def _conflict(request: Request, exc: ConflictError):
        return _error_response("conflict", str(exc))

    @app.exception_handler(PathExplosionError)
    async def _explosion(request: Request, exc: PathExplosionError):
        return _error_response(
            "unavailable",
            f"{exc}; retry with mode=katz or a smaller max_path_nodes",
        )

    @app.exception_handler(EndpointUnavailableError)
    async def _endpoint_down(request: Request, exc: EndpointUnavailableError):
        return _error_response("unavailable", str(exc))

    for bad_input in (ValidationError, ParseError, ConfigurationError, StructuralError):

        @app.exception_handler(bad_input)
        async def _invalid(request: Request, exc: Exception):
            return _error_response("invalid_input", str(exc))

    # -- auth ----------------------------------------------------------------

    @app.middleware("http")
    async def _bearer_auth(request: Request, call_next):
        if auth_token and request.url.path.startswith("/api"):
            supplied = request.headers.get("authorization", "")
            if supplied != f"Bearer {auth_token}":
                return JSONResponse(
                    status_code=401,
                    content={"code": "invalid_input", "message": "missing or invalid bearer token"},
                )
        return await call_next(request)

    # -- versions ------------------------------------------------------------

    def _load(version: str) -> AssetGraph:
        return to_graph(parse_snapshot(store.get_snapshot(version)))

    def _materialize_successor(version: str) -> str:
        """Fold decided reviews and pipeline outcomes into a child version."""
        doc = parse_snapshot(store.get_snapshot(version))
        graph = to_graph(doc)
        graph = apply_pipeline_outcomes(graph, store)
        graph = apply_review_decisions(graph, store.decided_reviews(version))
        child = from_graph(graph, generated_at=doc.generated_at, provenance=doc.provenance)
        child_version = store.put_snapshot(serialize_snapshot(child), parent=version)
        store.clear_dirty(version)
        store.audit("system", "materialize_version", {"parent": version, "child": child_version})
        return child_version

    def _head_version() -> str:
        version = store.latest_version()
        if version is None:
            raise NotFoundError("no snapshot has been ingested yet")
        if store.snapshot_dirty(version):
            version = _materialize_successor(version)
        return version

    def _resolve_version(requested: str | None) -> str:
        if requested:
            store.get_snapshot(requested)
            return requested
        return _head_version()

    # -- routes --------------------------------------------------------------

    @app.get("/api/health")
    async def health():
        return {
            "status": "ok",
            "backend": active_backend(),
            "head_version": store.latest_version(),
            "queue": store.queue_counts(),
        }

    @app.post("/api/ingest/snapshot")
    async def ingest_snapshot(request: Request):
        idem_key = request.headers.get("idempotency-key")
        if idem_key:
            known = store.idempotency_get(idem_key)
            if known is not None:
                return {"version": known, "replayed": True}
        raw = await request.body()
        doc = parse_snapshot(raw)
        graph = to_graph(doc)
        version = store.put_snapshot(serialize_snapshot(doc))
        if idem_key:
            store.idempotency_put(idem_key, version)
        queued = enqueue_unvalidated(store, graph, version)
        store.audit("api", "ingest_snapshot", {"version": version, "queued": queued})
        return JSONResponse(
            status_code=201,
            content={
                "version": version,
                "nodes": len(graph.nodes),
                "edges": len(graph.edges),
                "validation_queued": queued,
            },
        )

    @app.get("/api/graph/versions")
    async def graph_versions():
        return {"versions": store.list_snapshots(), "head": store.latest_version()}

    @app.get("/api/graph/snapshot")
    async def graph_snapshot(request: Request):
        params = request.query_params
        view = params.get("view", "validation_status")
        if view not in VIEWS:
            raise ApiError("invalid_input", f"unknown view {view!r}; expected one of {', '.join(VIEWS)}")
        version = _resolve_version(params.get("version"))
        graph = _load(version)
        body: dict[str, Any] = {"version": version, "view": view}

        if view == "validation_status":
            wanted = params.get("status")
            edges = _edge_payload(graph)
            if wanted:
                edges = [e for e in edges if e["validation_status"] == wanted]
            body["nodes"] = _node_payload(graph)
            body["edges"] = edges
        elif view == "pq_heatmap":
            nodes = _node_payload(graph)
            for rec in nodes:
                rec["heat"] = (1.0 - rec["resistance"]) * rec["business_weight"]
            body["nodes"] = nodes
            body["edges"] = _edge_payload(graph)
        elif view == "service_mesh":
            mesh = [e for e in _edge_payload(graph) if e["relation"] == Relation.CONNECTS_TO.value]
            keep = {e["source"] for e in mesh} | {e["target"] for e in mesh}
            body["nodes"] = [n for n in _node_payload(graph) if n["id"] in keep]
            body["edges"] = mesh
        else:
            body["chokepoints"] = _chokepoints(graph, params)
        return body

    def _chokepoints(graph: AssetGraph, params) -> list[dict[str, Any]]:
        """Nodes lying on at least min_paths entry-to-crown attack paths.

        Removing such a node severs every path it sits on; the threshold is
        the knob for how load-bearing a node must be to surface here.
        """
        try:
            min_paths = int(params.get("min_paths", chokepoint_min_paths))
        except ValueError:
            raise ApiError("invalid_input", "min_paths must be an integer")
        config = ScoringConfig()
        ctx = make_context(graph, config)
        index = GraphIndex(graph)
        found = enumerate_paths(
            index,
            ctx.entries,
            ctx.crowns,
            config.max_path_nodes,
            config.path_cap,
        )
        counts: dict[str, int] = {}
        for path in found:
            for pos in path:
                nid = index.ids[pos]
                counts[nid] = counts.get(nid, 0) + 1
        out = []
        for nid, count in counts.items():
            if count < min_paths:
                continue
            node = graph.nodes[nid]
            out.append(
                {
                    "id": nid,
                    "paths_through": count,
                    "is_vpn": node.attributes.get("service_type") == "vpn",
                    "resistance": node.resistance,
                    "business_weight": node.business_weight,
                }
            )
        out.sort(key=lambda r: (-r["paths_through"], r["id"]))
        return out

    @app.get("/api/score/report")
    async def score(request: Request):
        params = request.query_params
        version = _resolve_version(params.get("version"))
        mode = params.get("mode", "auto")
        method = params.get("method", "auto")
        try:
            seed = int(params.get("seed", 0))
        except ValueError:
            raise ApiError("invalid_input", "seed must be an integer")
        key = (version, mode, method, seed)
        cached = app.state.report_cache.get(key)
        if cached is not None:
            return cached
        graph = _load(version)
        config = ScoringConfig(mode=mode)
        report = score_report(graph, config, attribution_method=method, seed=seed)
        body = {"version": version, **report.to_dict()}
        app.state.report_cache[key] = body
        return body

    @app.get("/api/review/queue")
    async def review_queue():
        return {"reviews": store.pending_reviews()}

    @app.post("/api/review/{review_id}/decision")
    async def review_decision(review_id: str, request: Request):
        payload = await _json_body(request)
        if not isinstance(payload, dict):
            raise ApiError("invalid_input", "decision body must be an object")
        decision = payload.get("decision")
        reviewer = payload.get("reviewer")
        if decision not in ("approve", "reject"):
            raise ApiError("invalid_input", "decision must be 'approve' or 'reject'")
        if not reviewer or not isinstance(reviewer, str):
            raise ApiError("invalid_input", "reviewer must be a non-empty string")
        return store.record_decision(review_id, decision, reviewer)

    @app.get("/api/validation/settings")
    async def get_settings():
        return store.get_settings().to_dict()

    @app.put("/api/validation/settings")
    async def put_settings(request: Request):
        payload = await _json_body(request)
        if not isinstance(payload, dict):
            raise ApiError("invalid_input", "settings body must be an object")
        settings = ValidationSettings.from_dict(payload)
        store.put_settings(settings)
        store.audit("api", "put_settings", {"fingerprint": settings.fingerprint()})
        return settings.to_dict()

    @app.get("/api/validation/stats")
    async def validation_stats():
        return pipeline_stats(store)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        path = Path(static_dir)
        if path.is_dir():
            app.mount("/", StaticFiles(directory=path, html=True), name="ui")
        else:
            log.warning("static dir %s missing; UI not mounted", path)

    return app
