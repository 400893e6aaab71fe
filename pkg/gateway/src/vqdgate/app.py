"""HTTP service exposing model operations on the /v1/* wire routes.

Bodies mirror the client protocol one-to-one: every route is a POST
taking a JSON object and returning a JSON object, and token arrays carry
{"t", "logprob", "bytes"} entries whose byte counts are UTF-8 lengths of
the token text. Malformed requests are rejected with 4xx before touching
an engine; an engine failure returns a structured 500 body.

When the configured auth variable is set in the service environment,
every /v1 route requires the matching bearer token. The variable is read
per request, so rotating the token does not need a restart.

The bundled engines decode greedily: beam width and length penalty are
accepted for wire compatibility, logged when they ask for anything else,
and ignored.
"""

from __future__ import annotations

import logging
import os
from typing import Any

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import GatewayConfig, default_config

log = logging.getLogger("vqdgate")

BoxParam = tuple[float, float, float, float]


class CompleteRequest(BaseModel):
    prompt: str = Field(min_length=1)
    max_tokens: int = Field(default=64, ge=0)
    stop: list[str] | None = None
    beam_width: int = Field(default=1, ge=1)
    length_penalty: float = 1.0
    image_ref: str | None = None


class ScoreRequest(BaseModel):
    prompt: str = Field(min_length=1)
    continuations: list[str] = Field(min_length=1)
    image_ref: str | None = None


class VqaRequest(BaseModel):
    image_ref: str = Field(min_length=1)
    question: str
    box: BoxParam | None = None


class DetectRequest(BaseModel):
    image_ref: str = Field(min_length=1)
    category: str = Field(min_length=1)


class DepthRequest(BaseModel):
    image_ref: str = Field(min_length=1)
    box: BoxParam | None = None


class SimilarityRequest(BaseModel):
    image_ref: str = Field(min_length=1)
    texts: list[str] = Field(min_length=1)
    box: BoxParam | None = None


def _engine_failure(op: str, exc: Exception) -> JSONResponse:
    log.exception("%s engine failed", op)
    return JSONResponse(
        status_code=500,
        content={"error": {"type": type(exc).__name__, "message": str(exc)}},
    )


def create_app(config: GatewayConfig | None = None) -> FastAPI:
    config = config or default_config()
    app = FastAPI(title="vqdgate", docs_url=None, redoc_url=None)

    def require_token(request: Request) -> None:
        expected = os.environ.get(config.auth_env, "")
        if not expected:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {expected}":
            raise HTTPException(status_code=401, detail="missing or invalid bearer token")

    guarded = [Depends(require_token)]
    engines = config.engines

    @app.get("/healthz")
    def healthz() -> dict:
        return {
            "status": "ok",
            "engines": {route: engine.name for route, engine in engines.items()},
        }

    @app.post("/v1/complete", dependencies=guarded)
    def complete_route(body: CompleteRequest) -> Any:
        if body.beam_width != 1 or body.length_penalty != 1.0:
            log.warning(
                "complete: beam_width=%s length_penalty=%s requested; decoding greedily",
                body.beam_width,
                body.length_penalty,
            )
        try:
            result = engines["complete"].complete(
                body.prompt, max_tokens=body.max_tokens, stop=tuple(body.stop or ())
            )
        except Exception as exc:
            return _engine_failure("complete", exc)
        return {
            "text": result.text,
            "tokens": [t.to_wire() for t in result.tokens],
            "finish_reason": result.finish_reason,
        }

    @app.post("/v1/score", dependencies=guarded)
    def score_route(body: ScoreRequest) -> Any:
        try:
            scored = engines["score"].score(body.prompt, body.continuations)
        except Exception as exc:
            return _engine_failure("score", exc)
        return {"scores": [[t.to_wire() for t in tokens] for tokens in scored]}

    @app.post("/v1/vqa", dependencies=guarded)
    def vqa_route(body: VqaRequest) -> Any:
        try:
            answer = engines["vqa"].vqa(body.image_ref, body.question, body.box)
        except Exception as exc:
            return _engine_failure("vqa", exc)
        return {"answer": answer}

    @app.post("/v1/detect", dependencies=guarded)
    def detect_route(body: DetectRequest) -> Any:
        try:
            boxes = engines["detect"].detect(body.image_ref, body.category)
        except Exception as exc:
            return _engine_failure("detect", exc)
        return {"boxes": [list(box) for box in boxes]}

    @app.post("/v1/depth", dependencies=guarded)
    def depth_route(body: DepthRequest) -> Any:
        try:
            value = engines["depth"].depth(body.image_ref, body.box)
        except Exception as exc:
            return _engine_failure("depth", exc)
        return {"depth": value}

    @app.post("/v1/similarity", dependencies=guarded)
    def similarity_route(body: SimilarityRequest) -> Any:
        try:
            scores = engines["similarity"].similarity(body.image_ref, body.box, body.texts)
        except Exception as exc:
            return _engine_failure("similarity", exc)
        return {"scores": scores}

    return app
