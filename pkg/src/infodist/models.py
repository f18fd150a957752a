"""Next-token probability models driving the coder and the distance metrics.

A model is an immutable configuration object; all mutable scoring state lives
in sessions (`ModelSession`). A session's history logically starts with the
EOS sentinel, so the first real token is conditioned on it. Statistics of the
adaptive model are windowed: predictions never depend on history older than
``context_limit`` tokens.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidToken, ZeroProbability

BYTE_VOCAB_SIZE = 257
BYTE_EOS = 256

DEFAULT_CONTEXT_LIMIT = 1024

# Bumped whenever coder-visible conventions (quantization rule, EOS handling,
# register width) change; folded into every model fingerprint so containers
# written under different rules refuse to decode instead of corrupting.
CODING_RULES_VERSION = 1


@dataclass(frozen=True)
class Vocabulary:
    """Token id space plus the id reserved as the start/terminator sentinel."""

    size: int
    eos_id: int

    def __post_init__(self) -> None:
        if not (2 <= self.size <= 2**21):
            raise ValueError(f"vocabulary size out of range: {self.size}")
        if not (0 <= self.eos_id < self.size):
            raise ValueError(f"eos_id {self.eos_id} outside vocabulary of size {self.size}")

    def check_ids(self, ids: Sequence[int]) -> None:
        for t in ids:
            if not (0 <= t < self.size):
                raise InvalidToken(f"token id {t} outside vocabulary of size {self.size}")


BYTE_VOCAB = Vocabulary(size=BYTE_VOCAB_SIZE, eos_id=BYTE_EOS)


@dataclass(frozen=True)
class TokenSequence:
    """Validated token ids over a declared vocabulary. May be empty."""

    ids: tuple[int, ...]
    vocab: Vocabulary

    def __post_init__(self) -> None:
        self.vocab.check_ids(self.ids)

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[int]:
        return iter(self.ids)


@dataclass(frozen=True)
class ModelDescriptor:
    """Stable identity of a model configuration.

    ``model_id`` must not change across runs for the same model + parameters;
    the container format stores a hash of it to refuse decoding with the
    wrong model.
    """

    model_id: str
    vocab: Vocabulary
    deterministic: bool
    context_limit: int

    def __post_init__(self) -> None:
        if self.context_limit < 1:
            raise ValueError("context_limit must be >= 1")

    def fingerprint_text(self) -> str:
        return (
            f"{self.model_id}|v={self.vocab.size}|eos={self.vocab.eos_id}"
            f"|w={self.context_limit}|rules={CODING_RULES_VERSION}"
        )


class ModelSession(ABC):
    """Mutable scoring state. Single-caller; create one per concurrent task."""

    @abstractmethod
    def distribution(self) -> np.ndarray:
        """Probabilities of the next token given the history pushed so far."""

    @abstractmethod
    def push(self, token: int) -> None:
        """Record ``token`` as observed and extend the history."""

    def quantized(self, total: int):
        """Integer frequencies for the coder, or None to quantize client-side.

        Overridden by sessions whose frequencies come from elsewhere (a
        server, a fixed table) and must be used verbatim for bit-exactness.
        """
        return None


class EntropyModel(ABC):
    """Immutable model configuration; shareable across threads."""

    descriptor: ModelDescriptor

    @property
    def vocab(self) -> Vocabulary:
        return self.descriptor.vocab

    @property
    def context_limit(self) -> int:
        return self.descriptor.context_limit

    @abstractmethod
    def session(self) -> ModelSession:
        """Fresh scoring session with empty statistics."""

    def tokenize(self, text: str) -> list[int]:
        """Map text to token ids. Built-ins use UTF-8 bytes (surrogateescape
        keeps arbitrary binary round-trippable)."""
        if self.vocab.size != BYTE_VOCAB_SIZE or self.vocab.eos_id != BYTE_EOS:
            raise InvalidToken("text tokenization is only defined for the byte vocabulary")
        return list(text.encode("utf-8", "surrogateescape"))

    def detokenize(self, ids: Sequence[int]) -> str:
        if self.vocab.size != BYTE_VOCAB_SIZE or self.vocab.eos_id != BYTE_EOS:
            raise InvalidToken("text detokenization is only defined for the byte vocabulary")
        if any(t == BYTE_EOS for t in ids):
            raise InvalidToken("EOS sentinel cannot be detokenized")
        return bytes(ids).decode("utf-8", "surrogateescape")

    def per_token_bits(
        self,
        ids: Sequence[int],
        prior_context: Sequence[int] = (),
        variants: Iterable[str] = ("logprob",),
    ) -> dict[str, np.ndarray]:
        """Code lengths of each token of ``ids`` after ``prior_context``.

        Returns, per requested variant, the array of per-token bit costs:
        -log2 P(t_i | ...) for "logprob", log2 rank_i for "logrank". One
        scoring pass serves both variants.
        """
        wanted = set(variants)
        unknown = wanted - {"logprob", "logrank"}
        if unknown:
            raise ValueError(f"unknown variants: {sorted(unknown)}")
        self.vocab.check_ids(prior_context)
        self.vocab.check_ids(ids)
        sess = self.session()
        for t in prior_context:
            sess.push(t)
        logprob = np.empty(len(ids)) if "logprob" in wanted else None
        logrank = np.empty(len(ids)) if "logrank" in wanted else None
        for i, t in enumerate(ids):
            dist = sess.distribution()
            p = dist[t]
            if logprob is not None:
                if p <= 0.0:
                    raise ZeroProbability(f"model assigned probability 0 to token {t} at position {i}")
                logprob[i] = -math.log2(p)
            if logrank is not None:
                rank = int((dist > p).sum()) + int((dist[:t] == p).sum()) + 1
                logrank[i] = math.log2(rank)
            sess.push(t)
        out: dict[str, np.ndarray] = {}
        if logprob is not None:
            out["logprob"] = logprob
        if logrank is not None:
            out["logrank"] = logrank
        return out


def predict(model: EntropyModel, context: Sequence[int]) -> np.ndarray:
    """Next-token distribution after observing ``context``.

    History older than the model's context limit is ignored (sliding window);
    sessions enforce this internally, so feeding the full context here is
    equivalent to feeding its truncated tail.
    """
    model.vocab.check_ids(context)
    sess = model.session()
    for t in context:
        sess.push(t)
    return sess.distribution()


def score_sequence(
    model: EntropyModel, seq: Sequence[int], prior_context: Sequence[int] = ()
) -> np.ndarray:
    """Per-token probabilities of ``seq`` scored left to right.

    Position i is conditioned on prior_context ++ seq[:i] (with the EOS
    sentinel at the very start); adaptive statistics update as tokens are
    observed.
    """
    model.vocab.check_ids(prior_context)
    model.vocab.check_ids(seq)
    sess = model.session()
    for t in prior_context:
        sess.push(t)
    probs = np.empty(len(seq))
    for i, t in enumerate(seq):
        probs[i] = sess.distribution()[t]
        sess.push(t)
    return probs


class _ContextFreeSession(ModelSession):
    """Shared base for sessions whose distribution never changes; the
    quantized form is computed once per total and reused every step."""

    __slots__ = ("_dist", "_size", "_qcache")

    def __init__(self, dist: np.ndarray, size: int):
        self._dist = dist
        self._size = size
        self._qcache: dict[int, object] = {}

    def distribution(self) -> np.ndarray:
        return self._dist

    def push(self, token: int) -> None:
        if not (0 <= token < self._size):
            raise InvalidToken(f"token id {token} outside vocabulary of size {self._size}")

    def quantized(self, total: int):
        q = self._qcache.get(total)
        if q is None:
            from .coder import quantize  # deferred: coder imports this module

            q = self._qcache[total] = quantize(self._dist, total)
        return q


class _UniformSession(_ContextFreeSession):
    __slots__ = ()

    def __init__(self, size: int):
        super().__init__(np.full(size, 1.0 / size), size)


class UniformModel(EntropyModel):
    """Context-free model assigning 1/V to every token."""

    def __init__(self, vocab: Vocabulary = BYTE_VOCAB, context_limit: int = DEFAULT_CONTEXT_LIMIT):
        self.descriptor = ModelDescriptor(
            model_id=f"builtin:uniform:v{vocab.size}",
            vocab=vocab,
            deterministic=True,
            context_limit=context_limit,
        )

    def session(self) -> ModelSession:
        return _UniformSession(self.vocab.size)


class StaticModel(EntropyModel):
    """Context-free model with a fixed probability table (test and fixture use)."""

    def __init__(self, probs: Sequence[float], eos_id: int | None = None):
        arr = np.asarray(probs, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("probs must be a 1-D table of at least two entries")
        if (arr < 0).any() or abs(arr.sum() - 1.0) > 1e-9:
            raise ValueError("probs must be nonnegative and sum to 1")
        vocab = Vocabulary(size=int(arr.size), eos_id=arr.size - 1 if eos_id is None else eos_id)
        key = ",".join(f"{p:.12g}" for p in arr)
        self.descriptor = ModelDescriptor(
            model_id=f"builtin:static:[{key}]",
            vocab=vocab,
            deterministic=True,
            context_limit=DEFAULT_CONTEXT_LIMIT,
        )
        self._probs = arr

    def session(self) -> ModelSession:
        return _ContextFreeSession(self._probs, self.vocab.size)


class _AdaptiveSession(ModelSession):
    """Windowed order-k statistics with recursive add-one blending.

    The order-0 estimate is the add-1 (Laplace) distribution over observed
    window tokens. Each higher order m blends its context's successor counts
    with the order-(m-1) estimate:

        P_m = (counts_m + P_{m-1}) / (total_m + 1)

    An unseen context therefore falls back to the next shorter one exactly.
    Evictions keep every count derivable from the last ``window`` tokens
    alone, so predictions are invariant to older history.
    """

    def __init__(self, order: int, window: int, vocab: Vocabulary):
        self._k = order
        self._w = window
        self._size = vocab.size
        self._eos = vocab.eos_id
        self._hist: deque[int] = deque()
        self._hist.append(vocab.eos_id)  # t_0 sentinel: context only, never counted
        self._sentinel_live = True
        self._c0 = np.zeros(vocab.size, dtype=np.int64)
        self._n0 = 0
        # per order m >= 1: context tuple -> (successor counts, total)
        self._ctx: list[dict[tuple[int, ...], tuple[dict[int, int], int]]] = [
            {} for _ in range(order + 1)
        ]

    def distribution(self) -> np.ndarray:
        p = (self._c0 + 1.0) / (self._n0 + self._size)
        hist = self._hist
        n = len(hist)
        for m in range(1, self._k + 1):
            if n < m:
                break
            key = tuple(hist[-i] for i in range(m, 0, -1))
            entry = self._ctx[m].get(key)
            if entry is None:
                continue
            counts, total = entry
            scale = 1.0 / (total + 1.0)
            p = p * scale
            for t, c in counts.items():
                p[t] += c * scale
        return p

    def push(self, token: int) -> None:
        if not (0 <= token < self._size):
            raise InvalidToken(f"token id {token} outside vocabulary of size {self._size}")
        hist = self._hist
        n = len(hist)
        self._c0[token] += 1
        self._n0 += 1
        for m in range(1, self._k + 1):
            if n < m:
                break
            key = tuple(hist[-i] for i in range(m, 0, -1))
            entry = self._ctx[m].get(key)
            if entry is None:
                self._ctx[m][key] = ({token: 1}, 1)
            else:
                counts, total = entry
                counts[token] = counts.get(token, 0) + 1
                self._ctx[m][key] = (counts, total + 1)
        hist.append(token)
        if len(hist) > self._w:
            self._evict()

    def _evict(self) -> None:
        hist = self._hist
        old = hist.popleft()
        if self._sentinel_live:
            # The sentinel was never counted as a target; only n-gram pairs
            # whose context starts at it must go.
            self._sentinel_live = False
        else:
            self._c0[old] -= 1
            self._n0 -= 1
        for m in range(1, self._k + 1):
            if len(hist) < m:
                break
            key = (old,) + tuple(hist[i] for i in range(m - 1))
            target = hist[m - 1]
            entry = self._ctx[m].get(key)
            if entry is None:
                continue
            counts, total = entry
            c = counts.get(target, 0) - 1
            if c <= 0:
                counts.pop(target, None)
            else:
                counts[target] = c
            if total - 1 <= 0:
                del self._ctx[m][key]
            else:
                self._ctx[m][key] = (counts, total - 1)


class AdaptiveContextModel(EntropyModel):
    """Self-contained order-k byte model; no external weights required."""

    def __init__(
        self,
        order: int = 2,
        vocab: Vocabulary = BYTE_VOCAB,
        context_limit: int = DEFAULT_CONTEXT_LIMIT,
    ):
        if order < 0:
            raise ValueError("order must be >= 0")
        if context_limit < 1:
            raise ValueError("context_limit must be >= 1")
        self.order = order
        self.descriptor = ModelDescriptor(
            model_id=f"builtin:adaptive:k{order}:v{vocab.size}",
            vocab=vocab,
            deterministic=True,
            context_limit=context_limit,
        )

    def session(self) -> ModelSession:
        return _AdaptiveSession(self.order, self.context_limit, self.vocab)
