"""In-process protocol server wrapping any built-in entropy model.

Serves the same HTTP/JSON surface a real probability server would, which
makes it both the conformance oracle for the client and a handy `serve-mock`
target for protocol experiments.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .coder import MAX_TOTAL_LOG2, quantize
from .errors import InfoDistError
from .models import EntropyModel
from .remote import PROTOCOL_HEADER, PROTOCOL_VERSION


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


def create_app(model: EntropyModel, deterministic_id: str | None = None) -> FastAPI:
    app = FastAPI(title="infodist mock probability server")
    model_id = deterministic_id or model.descriptor.model_id

    @app.middleware("http")
    async def protocol_headers(request: Request, call_next):
        response: Response = await call_next(request)
        response.headers[PROTOCOL_HEADER] = PROTOCOL_VERSION
        req_id = request.headers.get("X-Request-Id")
        if req_id:
            response.headers["X-Request-Id"] = req_id
        return response

    @app.exception_handler(InfoDistError)
    async def domain_error(_request: Request, exc: InfoDistError):
        return JSONResponse(status_code=400, content={"detail": f"{type(exc).__name__}: {exc}"})

    @app.get("/info")
    def info() -> dict:
        return {
            "model_id": model_id,
            "vocab_size": model.vocab.size,
            "eos_id": model.vocab.eos_id,
            "context_window": model.context_limit,
            "tokenizer_fingerprint": f"utf8-bytes-v{model.vocab.size}",
            "deterministic": model.descriptor.deterministic,
            "protocol": int(PROTOCOL_VERSION),
        }

    @app.post("/tokenize")
    def tokenize(req: TokenizeRequest) -> dict:
        return {"ids": model.tokenize(req.text)}

    @app.post("/detokenize")
    def detokenize(req: DetokenizeRequest) -> dict:
        return {"text": model.detokenize(req.ids)}

    @app.post("/score")
    def score(req: ScoreRequest) -> dict:
        model.vocab.check_ids(req.context_ids)
        model.vocab.check_ids(req.target_ids)
        sess = model.session()
        for t in req.context_ids:
            sess.push(t)
        logprobs: list[float] = []
        ranks: list[int] = []
        for t in req.target_ids:
            dist = sess.distribution()
            p = float(dist[t])
            logprobs.append(math.log2(p) if p > 0 else -math.inf)
            ranks.append(int((dist > p).sum()) + int((dist[:t] == p).sum()) + 1)
            sess.push(t)
        return {"logprobs_bits": logprobs, "ranks": ranks, "model_id": model_id}

    @app.post("/distribution")
    def distribution(req: DistributionRequest) -> dict:
        if req.total > (1 << MAX_TOTAL_LOG2):
            raise InfoDistError(f"total above 2^{MAX_TOTAL_LOG2} is not supported")
        model.vocab.check_ids(req.context_ids)
        sess = model.session()
        for t in req.context_ids:
            sess.push(t)
        q = quantize(sess.distribution(), req.total)
        return {"freqs": [int(f) for f in q.freqs], "total": q.total, "model_id": model_id}

    return app


def serve(model: EntropyModel, host: str = "127.0.0.1", port: int = 8731) -> None:
    import uvicorn

    uvicorn.run(create_app(model), host=host, port=port, log_level="warning")
