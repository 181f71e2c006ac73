"""Stateless HTTP API over a loaded catalog.

Every request carries all the state it needs (the full answer map and
weight vector), so any sequence of calls can be replayed in any order
with identical results and the server keeps no sessions.  All 4xx
responses use one envelope::

    {"error": {"status": 422, "code": "arity-violation", "message": "..."}}

with ``code`` drawn from the closed set: malformed-body, unknown-area,
unknown-attribute, negative-weight, unknown-gateway, unknown-branch,
arity-violation, unvalidated-model, too-large-to-enumerate.
"""

from __future__ import annotations

import logging
import time
from typing import Any, Awaitable, Callable

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..catalog import Catalog, load_builtin
from ..engine import (
    WeightVector,
    auto_select,
    compare_whatif,
    recommend,
    session_with,
)
from ..errors import QsaError, UnknownAreaError
from ..interchange import (
    gateway_to_doc,
    model_to_doc,
    recommendation_to_doc,
    selection_to_doc,
    whatif_to_doc,
)
from .schemas import (
    AutoSelectRequest,
    CompareRequest,
    NextQuestionsRequest,
    RecommendRequest,
)

__all__ = ["create_app"]

log = logging.getLogger("qsa.service")


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": {"status": status, "code": code, "message": message}},
    )


def _etag_or_304(request: Request, response: Response, etag: str) -> Response | None:
    response.headers["ETag"] = etag
    candidates = request.headers.get("if-none-match")
    if candidates is None:
        return None
    if candidates.strip() == "*":
        return Response(status_code=304, headers={"ETag": etag})
    for candidate in candidates.split(","):
        candidate = candidate.strip()
        if candidate.startswith("W/"):
            candidate = candidate[2:]
        if candidate == etag:
            return Response(status_code=304, headers={"ETag": etag})
    return None


def create_app(
    catalog: Catalog | None = None, post_origins: tuple[str, ...] = ()
) -> FastAPI:
    """Build the API over ``catalog`` (the bundled one when omitted).

    ``post_origins`` is the cross-origin allowlist for state-changing-shaped
    requests; reads are served to any origin since all responses are public
    catalog data.
    """
    cat = catalog if catalog is not None else load_builtin()
    etag = f'"{cat.checksum}"'

    app = FastAPI(
        title="Quantum software architecture decision API",
        version="1",
        docs_url=None,
        redoc_url=None,
        openapi_url=None,
    )

    @app.exception_handler(QsaError)
    async def _qsa_error(request: Request, exc: QsaError) -> JSONResponse:
        status = 404 if isinstance(exc, UnknownAreaError) else 422
        return _error_response(status, exc.code, exc.message)

    @app.exception_handler(RequestValidationError)
    async def _malformed(request: Request, exc: RequestValidationError) -> JSONResponse:
        return _error_response(400, "malformed-body", str(exc.errors()[:3]))

    @app.middleware("http")
    async def _log_and_cors(
        request: Request, call_next: Callable[[Request], Awaitable[Response]]
    ) -> Response:
        started = time.perf_counter()
        if request.method == "OPTIONS":
            response = _preflight(request)
        else:
            response = await call_next(request)
        _apply_cors(request, response)
        elapsed_ms = (time.perf_counter() - started) * 1000
        log.info(
            "%s %s %d %.1fms",
            request.method,
            request.url.path,
            response.status_code,
            elapsed_ms,
        )
        return response

    def _preflight(request: Request) -> Response:
        asked = request.headers.get("access-control-request-method", "")
        origin = request.headers.get("origin", "")
        headers = {"Vary": "Origin"}
        if asked in ("GET", "HEAD") or (asked == "POST" and origin in post_origins):
            headers.update(
                {
                    "Access-Control-Allow-Methods": "GET, POST, OPTIONS",
                    "Access-Control-Allow-Headers": "Content-Type, If-None-Match",
                    "Access-Control-Max-Age": "600",
                }
            )
        return Response(status_code=204, headers=headers)

    def _apply_cors(request: Request, response: Response) -> None:
        origin = request.headers.get("origin")
        if origin is None:
            return
        method = request.method
        if method == "OPTIONS":
            method = request.headers.get("access-control-request-method", "")
        if method in ("GET", "HEAD"):
            response.headers["Access-Control-Allow-Origin"] = "*"
        elif method == "POST" and origin in post_origins:
            response.headers["Access-Control-Allow-Origin"] = origin

    @app.get("/v1/areas")
    async def list_areas(request: Request, response: Response) -> Any:
        not_modified = _etag_or_304(request, response, etag)
        if not_modified is not None:
            return not_modified
        return [
            {
                "area": area,
                "title": cat.model(area).meta.title,
                "patterns": len(cat.model(area).patterns),
            }
            for area in cat.areas
        ]

    @app.get("/v1/areas/{area}/model")
    async def get_model(area: str, request: Request, response: Response) -> Any:
        model = cat.model(area)
        not_modified = _etag_or_304(request, response, etag)
        if not_modified is not None:
            return not_modified
        return model_to_doc(model)

    @app.post("/v1/areas/{area}/next-questions")
    async def next_questions(area: str, body: NextQuestionsRequest) -> Any:
        model = cat.model(area)
        session = session_with(model, body.answers)
        return {"questions": [gateway_to_doc(gw) for gw in session.questions()]}

    @app.post("/v1/areas/{area}/recommend")
    async def recommend_patterns(area: str, body: RecommendRequest) -> Any:
        model = cat.model(area)
        weights = WeightVector.of(body.weights, cat.vocabulary)
        recs = recommend(model, body.answers, weights, body.k)
        return {"recommendations": [recommendation_to_doc(r) for r in recs]}

    @app.post("/v1/areas/{area}/auto-select")
    async def auto_select_patterns(area: str, body: AutoSelectRequest) -> Any:
        model = cat.model(area)
        weights = WeightVector.of(body.weights, cat.vocabulary)
        return selection_to_doc(auto_select(model, weights))

    @app.post("/v1/areas/{area}/compare")
    async def compare(area: str, body: CompareRequest) -> Any:
        model = cat.model(area)
        weights_a = WeightVector.of(body.weights_a, cat.vocabulary)
        weights_b = WeightVector.of(body.weights_b, cat.vocabulary)
        report = compare_whatif(model, body.answers, weights_a, weights_b)
        return whatif_to_doc(report)

    @app.get("/v1/health")
    async def health(request: Request, response: Response) -> Any:
        not_modified = _etag_or_304(request, response, etag)
        if not_modified is not None:
            return not_modified
        return {
            "status": "ok",
            "checksum": cat.checksum,
            "models": len(cat.areas),
        }

    return app
