"""HTTP scoring service.

Exposes ``POST /score`` with the retrieval pipeline's wire protocol:
request ``{"pairs": [{"query": ..., "article": ...}, ...]}``, response
``{"scores": [...]}`` with one probability in [0, 1] per pair, in order.
Malformed requests (bad JSON shape, missing fields, empty pair list)
get HTTP 400.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from xencoder.train import ScoredModel


class PairIn(BaseModel):
    query: str
    article: str


class ScoreRequest(BaseModel):
    pairs: list[PairIn] = Field(min_length=1)


class ScoreResponse(BaseModel):
    scores: list[float]


def create_app(artifact_dir: str | Path, batch_size: int = 32) -> FastAPI:
    """Build the FastAPI app around one trained artifact directory."""
    scorer = ScoredModel.load(artifact_dir)
    app = FastAPI(title="xencoder", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.post("/score", response_model=ScoreResponse)
    def score(request: ScoreRequest) -> ScoreResponse:
        pairs = [(p.query, p.article) for p in request.pairs]
        return ScoreResponse(scores=scorer.score(pairs, batch_size=batch_size))

    return app


def run(artifact_dir: str | Path, host: str = "127.0.0.1", port: int = 8500) -> None:
    """Serve the scoring API with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(artifact_dir), host=host, port=port, log_level="warning")
