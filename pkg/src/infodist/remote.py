"""Client for probability servers speaking the infodist wire protocol.

JSON over HTTP, protocol version 1:

    GET  /info          -> model_id, vocab_size, eos_id, context_window,
                           tokenizer_fingerprint
    POST /tokenize      {text}                 -> {ids}
    POST /detokenize    {ids}                  -> {text}
    POST /score         {context_ids, target_ids} -> {logprobs_bits, ranks?, model_id}
    POST /distribution  {context_ids, total}   -> {freqs, total, model_id}

Floats cross the wire only for length estimation; the codec path consumes
server-quantized integer frequencies so encode and decode are bit-identical.
Inputs longer than the server window are scored in sliding windows of
stride W/2, each batch keeping the most left context the window allows.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass
from typing import Sequence

import httpx
import numpy as np

from .coder import QuantizedDistribution, default_total
from .errors import (
    InvalidToken,
    ModelMismatch,
    ServerFault,
    TooLong,
    Unreachable,
    Unsupported,
)
from .models import EntropyModel, ModelDescriptor, ModelSession, Vocabulary

PROTOCOL_HEADER = "X-InfoDist-Protocol"
PROTOCOL_VERSION = "1"


@dataclass(frozen=True)
class ServerEndpoint:
    base_url: str
    timeout: float = 60.0
    retries: int = 2
    bearer_token: str | None = None

    def __post_init__(self) -> None:
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


@dataclass(frozen=True)
class ScoreResponse:
    token_ids: tuple[int, ...]
    logprobs_bits: tuple[float, ...]  # log2 P, every entry <= 0
    model_id: str
    ranks: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.token_ids) != len(self.logprobs_bits):
            raise ValueError("token_ids and logprobs_bits lengths differ")
        if any(lp > 0 for lp in self.logprobs_bits):
            raise ValueError("log probabilities must be <= 0")


class RemoteModel(EntropyModel):
    """Entropy model backed by a protocol server.

    Shareable across threads: the underlying httpx client is thread-safe and
    per-call state lives in sessions.
    """

    def __init__(self, endpoint: ServerEndpoint, client: httpx.Client | None = None):
        self._ep = endpoint
        if client is None:
            client = httpx.Client(base_url=endpoint.base_url, timeout=endpoint.timeout)
        self._client = client
        info = self._request("GET", "/info")
        vocab = Vocabulary(size=int(info["vocab_size"]), eos_id=int(info["eos_id"]))
        self.tokenizer_fingerprint = str(info.get("tokenizer_fingerprint", ""))
        self.descriptor = ModelDescriptor(
            model_id=f"remote:{info['model_id']}:tok={self.tokenizer_fingerprint}",
            vocab=vocab,
            deterministic=bool(info.get("deterministic", False)),
            context_limit=int(info["context_window"]),
        )
        self.server_model_id = str(info["model_id"])

    # -- transport ---------------------------------------------------------

    def _request(self, method: str, path: str, payload: dict | None = None) -> dict:
        headers = {PROTOCOL_HEADER: PROTOCOL_VERSION, "X-Request-Id": uuid.uuid4().hex}
        if self._ep.bearer_token:
            headers["Authorization"] = f"Bearer {self._ep.bearer_token}"
        last_exc: Exception | None = None
        for _ in range(self._ep.retries + 1):
            try:
                resp = self._client.request(method, path, json=payload, headers=headers)
            except httpx.TransportError as exc:
                last_exc = exc
                continue
            if resp.status_code == 501:
                raise Unsupported(_fault_message(resp))
            if resp.status_code == 413:
                raise TooLong(_fault_message(resp))
            if resp.status_code >= 400:
                raise ServerFault(f"HTTP {resp.status_code}: {_fault_message(resp)}")
            return resp.json()
        raise Unreachable(f"{self._ep.base_url}{path} after {self._ep.retries + 1} attempts: {last_exc}")

    def _check_model(self, payload: dict) -> None:
        got = payload.get("model_id")
        if got is not None and got != self.server_model_id:
            raise ModelMismatch(f"server now reports model {got!r}, session expected {self.server_model_id!r}")

    # -- protocol operations -------------------------------------------------

    def tokenize(self, text: str) -> list[int]:
        ids = [int(t) for t in self._request("POST", "/tokenize", {"text": text})["ids"]]
        self.vocab.check_ids(ids)
        return ids

    def detokenize(self, ids: Sequence[int]) -> str:
        self.vocab.check_ids(ids)
        return str(self._request("POST", "/detokenize", {"ids": list(ids)})["text"])

    def score(self, seq: Sequence[int], context: Sequence[int] = ()) -> ScoreResponse:
        """Teacher-forced log2 probabilities of seq after context, windowed."""
        self.vocab.check_ids(seq)
        self.vocab.check_ids(context)
        logprobs: list[float] = []
        ranks: list[int] = []
        have_ranks = True
        for ctx_ids, target_ids in self._window_spans(context, seq):
            payload = self._request(
                "POST", "/score", {"context_ids": ctx_ids, "target_ids": target_ids}
            )
            self._check_model(payload)
            logprobs.extend(float(v) for v in payload["logprobs_bits"])
            batch_ranks = payload.get("ranks")
            if batch_ranks is None:
                have_ranks = False
            elif have_ranks:
                ranks.extend(int(r) for r in batch_ranks)
        return ScoreResponse(
            token_ids=tuple(seq),
            logprobs_bits=tuple(logprobs),
            model_id=self.server_model_id,
            ranks=tuple(ranks) if have_ranks else None,
        )

    def _window_spans(
        self, context: Sequence[int], seq: Sequence[int]
    ) -> list[tuple[list[int], list[int]]]:
        w = self.context_limit
        if w < 1:
            raise TooLong("server context window is degenerate")
        stream = list(context) + list(seq)
        n0 = len(context)
        if not seq:
            return []
        if len(stream) <= w:
            return [(stream[:n0], stream[n0:])]
        step = max(1, w // 2)
        spans: list[tuple[list[int], list[int]]] = []
        a = n0
        while a < len(stream):
            c = max(0, a - (w - step))
            room = w - (a - c)
            b = min(len(stream), a + room)
            spans.append((stream[c:a], stream[a:b]))
            a = b
        return spans

    def quantized_distribution(self, context: Sequence[int], total: int) -> QuantizedDistribution:
        """Server-side quantized CDF; bit-exact between encode and decode."""
        self.vocab.check_ids(context)
        payload = self._request(
            "POST", "/distribution", {"context_ids": list(context), "total": total}
        )
        self._check_model(payload)
        freqs = np.asarray(payload["freqs"], dtype=np.int64)
        return QuantizedDistribution(freqs=freqs, total=int(payload.get("total", total)))

    # -- EntropyModel integration -------------------------------------------

    def per_token_bits(
        self,
        ids: Sequence[int],
        prior_context: Sequence[int] = (),
        variants: Sequence[str] = ("logprob",),
    ) -> dict[str, np.ndarray]:
        wanted = set(variants)
        unknown = wanted - {"logprob", "logrank"}
        if unknown:
            raise ValueError(f"unknown variants: {sorted(unknown)}")
        resp = self.score(ids, prior_context)
        out: dict[str, np.ndarray] = {}
        if "logprob" in wanted:
            out["logprob"] = -np.asarray(resp.logprobs_bits, dtype=np.float64)
        if "logrank" in wanted:
            if resp.ranks is None:
                raise Unsupported("server does not report ranks; log-rank lengths unavailable")
            out["logrank"] = np.log2(np.asarray(resp.ranks, dtype=np.float64))
        return out

    def session(self) -> ModelSession:
        return _RemoteSession(self)


class _RemoteSession(ModelSession):
    """Accumulates context client-side; one /distribution call per token."""

    def __init__(self, model: RemoteModel):
        self._model = model
        self._context: list[int] = []

    def _window(self) -> list[int]:
        limit = self._model.context_limit - 1  # leave room for the next token
        return self._context[-limit:] if limit > 0 else []

    def distribution(self) -> np.ndarray:
        q = self.quantized(default_total(self._model.vocab.size))
        return q.freqs / q.total

    def quantized(self, total: int) -> QuantizedDistribution:
        return self._model.quantized_distribution(self._window(), total)

    def push(self, token: int) -> None:
        if not (0 <= token < self._model.vocab.size):
            raise InvalidToken(f"token id {token} outside vocabulary")
        self._context.append(token)


def _fault_message(resp: httpx.Response) -> str:
    try:
        body = resp.json()
    except Exception:  # noqa: BLE001 - non-JSON error body
        return resp.text[:200]
    if isinstance(body, dict):
        return str(body.get("detail") or body.get("error") or body)[:500]
    return str(body)[:500]


# Free-function forms of the protocol operations.


def remote_tokenize(endpoint: ServerEndpoint, text: str) -> list[int]:
    return RemoteModel(endpoint).tokenize(text)


def remote_detokenize(endpoint: ServerEndpoint, ids: Sequence[int]) -> str:
    return RemoteModel(endpoint).detokenize(ids)


def remote_score(
    endpoint: ServerEndpoint, seq: Sequence[int], context: Sequence[int] = ()
) -> ScoreResponse:
    return RemoteModel(endpoint).score(seq, context)


def remote_distribution(
    endpoint: ServerEndpoint, context: Sequence[int], total: int | None = None
) -> QuantizedDistribution:
    model = RemoteModel(endpoint)
    if total is None:
        total = default_total(model.vocab.size)
    return model.quantized_distribution(context, total)
