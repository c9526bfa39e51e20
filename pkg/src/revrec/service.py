"""HTTP recommendation service: POST /recommend and GET /health.

One project per process; history and repository are loaded at startup and
treated as immutable for the process lifetime.
"""

from __future__ import annotations

import logging
import uuid

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, model_validator
from typing import List, Optional

from .app import Engine, RequestError, UnknownPRError

log = logging.getLogger(__name__)


class RecommendBody(BaseModel):
    pr_id: Optional[str] = None
    changed_files: Optional[List[str]] = None
    author: Optional[str] = None
    k: Optional[int] = None
    refresh: bool = False

    @model_validator(mode="after")
    def _check_target(self):
        if self.pr_id is None and not self.changed_files:
            raise ValueError("either 'pr_id' or 'changed_files' with 'author' is required")
        if self.pr_id is None and not self.author:
            raise ValueError("'author' is required with 'changed_files'")
        if self.k is not None and self.k < 1:
            raise ValueError("'k' must be >= 1")
        return self


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="reviewer recommendation service")

    @app.get("/health")
    def health():
        return {"status": "ok", "config_digest": engine.cfg.digest()}

    @app.post("/recommend")
    def recommend(body: RecommendBody):
        try:
            recommendation = engine.recommend_request(
                pr_id=body.pr_id,
                files=body.changed_files,
                author=body.author,
                k=body.k,
                refresh=body.refresh,
            )
        except UnknownPRError as exc:
            return JSONResponse(status_code=404, content={"error": str(exc)})
        except RequestError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        return JSONResponse(status_code=200, content=recommendation.to_dict())

    @app.exception_handler(RequestValidationError)
    def malformed_body(request: Request, exc: RequestValidationError):
        diagnostics = [
            {"field": ".".join(str(p) for p in err.get("loc", ())), "message": err.get("msg", "")}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"error": "malformed body", "fields": diagnostics})

    @app.exception_handler(Exception)
    def internal_error(request: Request, exc: Exception):
        incident = uuid.uuid4().hex[:12]
        log.exception("internal error %s on %s", incident, request.url.path)
        return JSONResponse(status_code=500, content={"error": "internal error", "id": incident})

    return app


def serve(engine: Engine, addr: str) -> None:
    import uvicorn

    host, _, port = addr.rpartition(":")
    uvicorn.run(create_app(engine), host=host or "127.0.0.1", port=int(port))
