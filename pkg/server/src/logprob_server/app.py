"""FastAPI surface speaking the infodist wire protocol, version 1."""

from __future__ import annotations

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .backend import CausalLMBackend, TooLongError

PROTOCOL_HEADER = "X-InfoDist-Protocol"
PROTOCOL_VERSION = "1"


class TokenizeRequest(BaseModel):
    text: str


class DetokenizeRequest(BaseModel):
    ids: list[int]


class ScoreRequest(BaseModel):
    context_ids: list[int] = []
    target_ids: list[int] = []


class DistributionRequest(BaseModel):
    context_ids: list[int] = []
    total: int


def create_app(backend: CausalLMBackend) -> FastAPI:
    app = FastAPI(title="logprob-server")

    @app.middleware("http")
    async def protocol_headers(request: Request, call_next):
        response: Response = await call_next(request)
        response.headers[PROTOCOL_HEADER] = PROTOCOL_VERSION
        req_id = request.headers.get("X-Request-Id")
        if req_id:
            response.headers["X-Request-Id"] = req_id
        return response

    @app.exception_handler(TooLongError)
    async def too_long(_request: Request, exc: TooLongError):
        return JSONResponse(status_code=413, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def bad_value(_request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/info")
    def info() -> dict:
        return {
            "model_id": backend.model_id,
            "vocab_size": backend.vocab_size,
            "eos_id": backend.eos_id,
            "context_window": backend.context_window,
            "tokenizer_fingerprint": backend.tokenizer_fingerprint,
            "deterministic": False,  # float results are machine-dependent
            "protocol": int(PROTOCOL_VERSION),
        }

    @app.post("/tokenize")
    def tokenize(req: TokenizeRequest) -> dict:
        return {"ids": backend.tokenize(req.text)}

    @app.post("/detokenize")
    def detokenize(req: DetokenizeRequest) -> dict:
        return {"text": backend.detokenize(req.ids)}

    @app.post("/score")
    def score(req: ScoreRequest) -> dict:
        logprobs, ranks = backend.score(req.context_ids, req.target_ids)
        return {"logprobs_bits": logprobs, "ranks": ranks, "model_id": backend.model_id}

    @app.post("/distribution")
    def distribution(req: DistributionRequest) -> dict:
        freqs = backend.distribution(req.context_ids, req.total)
        return {"freqs": [int(f) for f in freqs], "total": req.total, "model_id": backend.model_id}

    return app
