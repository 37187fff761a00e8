"""HTTP API over one corpus snapshot.

Every response is computed from a single snapshot version grabbed at the
start of the request and echoed in the X-Snapshot-Version header, so a
concurrent snapshot swap never produces a mixed view. Handlers contain no
ranking or statistics logic of their own; they call the same module
functions scripts would.
"""

from __future__ import annotations

import hashlib
import mimetypes
import os
import random
import tempfile
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse

from captionlens.corpus.manifest import record_to_json
from captionlens.errors import ArtifactMissingError, DataError
from captionlens.ingest.resize import ResizeRule, prepare_jpeg_bytes
from captionlens.service.state import ServiceState, SnapshotView
from captionlens.similarity.recommend import top_n
from captionlens.textlab.keyness import label_recommendation_set
from captionlens.textlab.stats import caption_stats

__all__ = ["ApiError", "create_app", "serve", "THUMBNAIL_RULE", "THUMBNAIL_QUALITY"]

VERSION_HEADER = "X-Snapshot-Version"

# thumbnails reuse the ingest scaling rule, capped at a 256px long side
THUMBNAIL_RULE = ResizeRule(max_long_side=256, max_short_side=256)
THUMBNAIL_QUALITY = 85

DEFAULT_PAGE_SIZE = 50
MAX_PAGE_SIZE = 500
SNIPPET_LENGTH = 160


class ApiError(Exception):
    """Error with a stable machine-readable shape: {code, message}."""

    def __init__(self, http_status: int, code: str, message: str):
        super().__init__(message)
        self.http_status = http_status
        self.code = code
        self.message = message


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"code": code, "message": message}, status_code=status)


def _check_params(request: Request, allowed: frozenset[str]) -> None:
    for key in request.query_params:
        if key not in allowed:
            raise ApiError(400, "bad_param", f"unknown query parameter {key!r}")


def _int_param(request: Request, name: str, default: int, minimum: int, maximum: int | None = None) -> int:
    raw = request.query_params.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ApiError(400, "bad_param", f"{name} must be an integer, got {raw!r}") from None
    if value < minimum:
        raise ApiError(400, "bad_param", f"{name} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ApiError(400, "bad_param", f"{name} must be <= {maximum}, got {value}")
    return value


def _require_record(view: SnapshotView, image_id: str):
    record = view.snapshot.get_record(image_id)
    if record is None:
        raise ApiError(404, "not_found", f"no image {image_id!r}")
    return record


def _cluster_of(view: SnapshotView, image_id: str) -> int | None:
    clusters = view.snapshot.clusters
    if clusters is None:
        return None
    return clusters.assignment.get(image_id)


def _page(items: list, page: int, page_size: int) -> list:
    start = (page - 1) * page_size
    return items[start : start + page_size]


def _snippet(text: str) -> str:
    if len(text) <= SNIPPET_LENGTH:
        return text
    return text[: SNIPPET_LENGTH].rstrip() + "…"


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="captionlens", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.service = state

    if state.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(state.cors_origins),
            allow_methods=["GET"],
            allow_headers=["*"],
            expose_headers=[VERSION_HEADER],
        )

    @app.middleware("http")
    async def pin_snapshot(request: Request, call_next):
        request.state.view = state.view()
        response = await call_next(request)
        response.headers[VERSION_HEADER] = str(request.state.view.version)
        return response

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, exc: ApiError):
        return _error_response(exc.http_status, exc.code, exc.message)

    @app.exception_handler(ArtifactMissingError)
    async def on_artifact_missing(request: Request, exc: ArtifactMissingError):
        return _error_response(409, "artifact_missing", str(exc))

    @app.exception_handler(DataError)
    async def on_data_error(request: Request, exc: DataError):
        return _error_response(400, "bad_param", str(exc))

    # Routes with a {image_id:path} parameter and a literal suffix must be
    # registered before the bare /api/images/{image_id} route: image ids are
    # relative paths and may contain slashes themselves.

    @app.get("/api/images")
    async def list_images(request: Request):
        _check_params(request, frozenset({"page", "page_size"}))
        view: SnapshotView = request.state.view
        page = _int_param(request, "page", default=1, minimum=1)
        page_size = _int_param(
            request, "page_size", default=DEFAULT_PAGE_SIZE, minimum=1, maximum=MAX_PAGE_SIZE
        )
        records = view.snapshot.records
        items = [
            record_to_json(r, view.snapshot.caption_for(r.id))
            for r in _page(records, page, page_size)
        ]
        return {"page": page, "page_size": page_size, "total": len(records), "items": items}

    @app.get("/api/images/{image_id:path}/file")
    async def image_file(request: Request, image_id: str):
        _check_params(request, frozenset())
        view: SnapshotView = request.state.view
        record = _require_record(view, image_id)
        path = state.image_root / record.source_path
        if not path.is_file():
            raise ApiError(404, "not_found", f"image file missing for {image_id!r}")
        media_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        return FileResponse(path, media_type=media_type)

    @app.get("/api/images/{image_id:path}/thumbnail")
    async def image_thumbnail(request: Request, image_id: str):
        _check_params(request, frozenset())
        view: SnapshotView = request.state.view
        record = _require_record(view, image_id)
        cached = _thumbnail_file(state, record, image_id)
        return FileResponse(cached, media_type="image/jpeg")

    @app.get("/api/images/{image_id:path}/recommendations")
    async def image_recommendations(request: Request, image_id: str):
        _check_params(request, frozenset({"n", "space"}))
        view: SnapshotView = request.state.view
        _require_record(view, image_id)
        n = _int_param(request, "n", default=5, minimum=1)
        space_name = request.query_params.get("space", "caption")
        space = view.snapshot.require_space(space_name)
        if image_id not in space:
            raise ApiError(
                409,
                "artifact_missing",
                f"image {image_id!r} has no vector in space {space_name!r}",
            )
        rec = top_n(view.snapshot, image_id, n, space_name=space_name)
        rec = label_recommendation_set(view.snapshot, rec)
        return rec.to_dict()

    @app.get("/api/images/{image_id:path}")
    async def image_detail(request: Request, image_id: str):
        _check_params(request, frozenset())
        view: SnapshotView = request.state.view
        record = _require_record(view, image_id)
        payload = record_to_json(record, view.snapshot.caption_for(image_id))
        payload["cluster_id"] = _cluster_of(view, image_id)
        return payload

    @app.get("/api/clusters")
    async def list_clusters(request: Request):
        _check_params(request, frozenset())
        view: SnapshotView = request.state.view
        clusters = view.snapshot.require_clusters()
        out = []
        for summary in clusters.ordered_summaries():
            item = summary.to_dict()
            item["representative_id"] = random.choice(clusters.members(summary.cluster_id))
            out.append(item)
        return {"k": clusters.k, "clusters": out}

    @app.get("/api/clusters/{cluster_id}/images")
    async def cluster_images(request: Request, cluster_id: str):
        _check_params(request, frozenset({"page", "page_size"}))
        view: SnapshotView = request.state.view
        clusters = view.snapshot.require_clusters()
        try:
            cid = int(cluster_id)
        except ValueError:
            raise ApiError(400, "bad_param", f"cluster id must be an integer, got {cluster_id!r}") from None
        if not 0 <= cid < clusters.k:
            raise ApiError(404, "not_found", f"no cluster {cid}, valid range is 0..{clusters.k - 1}")
        page = _int_param(request, "page", default=1, minimum=1)
        page_size = _int_param(
            request, "page_size", default=DEFAULT_PAGE_SIZE, minimum=1, maximum=MAX_PAGE_SIZE
        )
        members = sorted(clusters.members(cid))
        items = [
            record_to_json(view.snapshot.get_record(i), view.snapshot.caption_for(i))
            for i in _page(members, page, page_size)
        ]
        return {
            "cluster_id": cid,
            "representative_id": random.choice(members),
            "page": page,
            "page_size": page_size,
            "total": len(members),
            "items": items,
        }

    @app.get("/api/search")
    async def search(request: Request):
        _check_params(request, frozenset({"q", "limit"}))
        view: SnapshotView = request.state.view
        query = request.query_params.get("q", "")
        if not query.strip():
            raise ApiError(400, "bad_param", "q must be a non-empty query")
        limit = _int_param(request, "limit", default=10, minimum=1, maximum=100)
        hits = view.snapshot.fulltext.search(query, limit=limit)
        out = []
        for hit in hits:
            caption = view.snapshot.caption_for(hit.image_id)
            out.append(
                {
                    "image_id": hit.image_id,
                    "score": hit.score,
                    "matched_terms": list(hit.matched_terms),
                    "snippet": _snippet(caption.text) if caption else "",
                }
            )
        return {"query": query, "hits": out}

    @app.get("/api/projection")
    async def projection(request: Request):
        _check_params(request, frozenset())
        view: SnapshotView = request.state.view
        embedding = view.snapshot.require_projection()
        clusters = view.snapshot.clusters
        points = [
            {
                "image_id": image_id,
                "x": x,
                "y": y,
                "cluster_id": clusters.assignment.get(image_id) if clusters else None,
            }
            for image_id, (x, y) in embedding.coords.items()
        ]
        return {
            "explained_variance": list(embedding.explained_variance),
            "points": points,
        }

    @app.get("/api/stats")
    async def stats(request: Request):
        _check_params(request, frozenset())
        view: SnapshotView = request.state.view
        captions = view.snapshot.captions
        try:
            caption_block = caption_stats(captions.values()).to_dict()
        except DataError:
            caption_block = None
        return {
            "overview": view.snapshot.overview(),
            "captions": caption_block,
            "reports": dict(view.snapshot.reports or {}),
        }

    return app


def _thumbnail_file(state: ServiceState, record, image_id: str) -> Path:
    size = THUMBNAIL_RULE.max_long_side
    digest = hashlib.sha1(image_id.encode("utf-8")).hexdigest()[:20]
    cached = state.thumbnail_dir / f"{digest}_{size}.jpg"
    if cached.is_file():
        return cached
    source = state.image_root / record.source_path
    if not source.is_file():
        raise ApiError(404, "not_found", f"image file missing for {image_id!r}")
    try:
        data = prepare_jpeg_bytes(source, THUMBNAIL_RULE, quality=THUMBNAIL_QUALITY)
    except DataError as exc:
        raise ApiError(404, "not_found", str(exc)) from exc
    cached.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=cached.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, cached)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return cached


def serve(state: ServiceState, host: str = "127.0.0.1", port: int = 8765) -> None:
    """Run the API with uvicorn; blocks until interrupted."""
    import uvicorn

    uvicorn.run(create_app(state), host=host, port=port, log_level="info")
