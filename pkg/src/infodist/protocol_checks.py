"""Reusable wire-protocol conformance checks.

Any server claiming protocol version 1 should pass `run_conformance` when
wrapped in a RemoteModel. The primary test suite runs these against the
bundled mock server; external server implementations run them against
themselves (in-process or over the network).
"""

from __future__ import annotations

import numpy as np

from .coder import quantize
from .models import EntropyModel
from .remote import PROTOCOL_HEADER, RemoteModel


def check_info(remote: RemoteModel) -> None:
    assert remote.vocab.size >= 2, "vocab too small"
    assert 0 <= remote.vocab.eos_id < remote.vocab.size, "eos outside vocab"
    assert remote.context_limit >= 1, "degenerate context window"
    assert remote.tokenizer_fingerprint, "missing tokenizer fingerprint"


def check_protocol_header(client) -> None:
    resp = client.get("/info")
    assert resp.headers.get(PROTOCOL_HEADER) == "1", "missing protocol version header"


def check_tokenize_round_trip(remote: RemoteModel, texts: list[str]) -> None:
    assert remote.tokenize("") == []
    for text in texts:
        ids = remote.tokenize(text)
        assert all(0 <= t < remote.vocab.size for t in ids), "ids outside vocabulary"
        assert remote.detokenize(ids) == text, f"round trip failed for {text!r}"


def check_score_shapes(remote: RemoteModel, text: str) -> None:
    assert remote.score([]).logprobs_bits == ()
    ids = remote.tokenize(text)
    resp = remote.score(ids)
    assert len(resp.logprobs_bits) == len(ids), "one logprob per target token"
    assert all(lp <= 0.0 for lp in resp.logprobs_bits), "log probabilities must be <= 0"
    if resp.ranks is not None:
        assert len(resp.ranks) == len(ids)
        assert all(r >= 1 for r in resp.ranks), "ranks are 1-indexed"


def check_score_conditioning(remote: RemoteModel, text: str, context_text: str) -> None:
    """Conditional scoring must depend only on the supplied context."""
    ids = remote.tokenize(text)
    ctx = remote.tokenize(context_text)
    free = remote.score(ids).logprobs_bits
    conditioned = remote.score(ids, ctx).logprobs_bits
    again = remote.score(ids, ctx).logprobs_bits
    assert conditioned == again, "conditional scoring must be reproducible"
    assert len(free) == len(conditioned)


def check_distribution_contract(remote: RemoteModel, totals: tuple[int, ...] = (1 << 14, 1 << 16)) -> None:
    ids = remote.tokenize("ab")
    for total in totals:
        if total < remote.vocab.size:
            continue
        q = remote.quantized_distribution(ids, total)
        assert int(q.freqs.sum()) == total, "frequencies must sum to the total exactly"
        assert (q.freqs >= 1).all(), "every token must stay encodable"
        again = remote.quantized_distribution(ids, total)
        assert np.array_equal(q.freqs, again.freqs), "distribution must be deterministic"


def check_quantization_agreement(remote: RemoteModel, reference: EntropyModel, total: int) -> None:
    """Server-side quantization must equal the client rule integer-exactly."""
    sess = reference.session()
    expected = quantize(sess.distribution(), total)
    got = remote.quantized_distribution([], total)
    assert np.array_equal(expected.freqs, got.freqs), "quantization rules diverge"


def run_conformance(
    remote: RemoteModel,
    client,
    texts: list[str] | None = None,
    reference: EntropyModel | None = None,
) -> None:
    texts = texts or ["ab", "hello protocol", "round trip éè"]
    check_info(remote)
    check_protocol_header(client)
    check_tokenize_round_trip(remote, texts)
    check_score_shapes(remote, texts[0])
    check_score_conditioning(remote, texts[0], texts[1])
    check_distribution_contract(remote)
    if reference is not None:
        check_quantization_agreement(remote, reference, 1 << 16)
