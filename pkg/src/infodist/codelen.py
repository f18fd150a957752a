"""Compression-length estimation without performing compression.

C(x) is the summed -log2 probability the model assigns to x token by token;
the rank variant replaces each term with log2 of the realized token's
1-indexed rank. Conditional lengths C(x|y) prepend y (plus a separator) as
scoring context. Long texts are split into fixed-size character chunks
scored independently, which parallelizes at a small ratio cost.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import EmptyOperand
from .models import EntropyModel

DEFAULT_CHUNK_CHARS = 2500
DEFAULT_SEPARATOR = "\n"


class Variant(str, Enum):
    LOGPROB = "logprob"
    LOGRANK = "logrank"


class JointMode(str, Enum):
    CONDITIONAL = "conditional"
    CONCATENATION = "concatenation"


@dataclass(frozen=True)
class CodeLengthReport:
    """Per-token and total bit lengths under one coding variant."""

    variant: Variant
    per_token_bits: tuple[float, ...]
    total_bits: float
    token_count: int

    def to_json_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "total_bits": self.total_bits,
            "token_count": self.token_count,
        }


def _report(variant: Variant, bits: np.ndarray) -> CodeLengthReport:
    return CodeLengthReport(
        variant=variant,
        per_token_bits=tuple(float(b) for b in bits),
        total_bits=float(bits.sum()),
        token_count=int(bits.size),
    )


def codelen_logprob(
    model: EntropyModel, x: Sequence[int], context: Sequence[int] = ()
) -> CodeLengthReport:
    """C(x | context): summed -log2 P per token. Empty x costs 0 bits."""
    bits = model.per_token_bits(x, context, variants=(Variant.LOGPROB.value,))
    return _report(Variant.LOGPROB, bits[Variant.LOGPROB.value])


def codelen_logrank(
    model: EntropyModel, x: Sequence[int], context: Sequence[int] = ()
) -> CodeLengthReport:
    """Rank-coding length: log2 of each realized token's 1-indexed rank.

    Ranks order tokens by descending probability; equal probabilities break
    toward the smaller token id, so the modal token always costs 0 bits.
    """
    bits = model.per_token_bits(x, context, variants=(Variant.LOGRANK.value,))
    return _report(Variant.LOGRANK, bits[Variant.LOGRANK.value])


def sequence_bits(
    model: EntropyModel,
    x: Sequence[int],
    context: Sequence[int] = (),
    variants: Sequence[Variant] = (Variant.LOGPROB,),
) -> dict[Variant, float]:
    """Total bits of x after context for each requested variant, one pass."""
    raw = model.per_token_bits(x, context, variants=tuple(v.value for v in variants))
    return {Variant(k): float(v.sum()) for k, v in raw.items()}


def joint_codelen(
    model: EntropyModel,
    x: Sequence[int],
    y: Sequence[int],
    mode: JointMode = JointMode.CONDITIONAL,
    separator: Sequence[int] = (),
    variant: Variant = Variant.LOGPROB,
) -> tuple[float, float, float]:
    """Joint and conditional lengths (C(xy), C(x|y), C(y|x)).

    Conditional mode conditions directly: C(x|y) scores x after y+separator,
    and C(xy) = C(x) + C(y|x) keeps the chain rule exact. Concatenation mode
    reproduces stream-compressor semantics: C(x|y) = C(y++x) - C(y) with the
    joint symmetrized over both concatenation orders, which makes
    m_mean = 2*CDM - 1 hold exactly.
    """
    if len(x) == 0 or len(y) == 0:
        raise EmptyOperand("joint lengths require nonempty x and y")
    sep = list(separator)
    v = (variant,)
    if mode is JointMode.CONDITIONAL:
        c_x = sequence_bits(model, x, (), v)[variant]
        c_x_given_y = sequence_bits(model, x, list(y) + sep, v)[variant]
        c_y_given_x = sequence_bits(model, y, list(x) + sep, v)[variant]
        c_xy = c_x + c_y_given_x
        return c_xy, c_x_given_y, c_y_given_x
    c_x = sequence_bits(model, x, (), v)[variant]
    c_y = sequence_bits(model, y, (), v)[variant]
    c_xcaty = sequence_bits(model, list(x) + sep + list(y), (), v)[variant]
    c_ycatx = sequence_bits(model, list(y) + sep + list(x), (), v)[variant]
    c_xy = 0.5 * (c_xcaty + c_ycatx)
    return c_xy, c_ycatx - c_y, c_xcaty - c_x


@dataclass(frozen=True)
class ChunkPlan:
    """Character offsets partitioning a text into independent chunks."""

    chunk_chars: int
    boundaries: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.chunk_chars < 1:
            raise ValueError("chunk_chars must be >= 1")
        b = self.boundaries
        if len(b) < 2 or b[0] != 0 or any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
            raise ValueError("boundaries must start at 0 and strictly increase")

    @classmethod
    def for_text(cls, text: str, chunk_chars: int = DEFAULT_CHUNK_CHARS) -> "ChunkPlan":
        if not text:
            raise EmptyOperand("cannot plan chunks over empty text")
        bounds = list(range(0, len(text), chunk_chars)) + [len(text)]
        if bounds[-2] == bounds[-1]:
            bounds.pop()
        return cls(chunk_chars=chunk_chars, boundaries=tuple(bounds))

    def slices(self, text: str) -> list[str]:
        if len(text) != self.boundaries[-1]:
            raise ValueError("plan does not match the text length")
        b = self.boundaries
        return [text[b[i] : b[i + 1]] for i in range(len(b) - 1)]


@dataclass(frozen=True)
class ChunkedCodeLength:
    """Aggregate of independently scored chunks plus the compression ratio."""

    variant: Variant
    total_bits: float
    token_count: int
    chunk_totals: tuple[float, ...]
    original_bytes: int
    ratio: float

    def to_json_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "total_bits": self.total_bits,
            "token_count": self.token_count,
            "chunk_totals": list(self.chunk_totals),
            "ratio": self.ratio,
        }


def chunked_codelen(
    model: EntropyModel,
    text: str,
    chunk_chars: int = DEFAULT_CHUNK_CHARS,
    plan: ChunkPlan | None = None,
    variant: Variant = Variant.LOGPROB,
    jobs: int | None = None,
) -> ChunkedCodeLength:
    """Score chunks independently (empty context each) and sum the totals.

    ratio = 8 * UTF-8 byte length / total bits, the original-over-compressed
    convention; estimator-level, so no container overhead is included.
    """
    if not text:
        raise EmptyOperand("cannot score empty text")
    if plan is None:
        plan = ChunkPlan.for_text(text, chunk_chars)
    pieces = plan.slices(text)

    def one(piece: str) -> tuple[float, int]:
        ids = model.tokenize(piece)
        total = sequence_bits(model, ids, (), (variant,))[variant]
        return total, len(ids)

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            scored = list(pool.map(one, pieces))
    else:
        scored = [one(p) for p in pieces]
    chunk_totals = tuple(s[0] for s in scored)
    total_bits = float(sum(chunk_totals))
    nbytes = len(text.encode("utf-8", "surrogateescape"))
    ratio = (8.0 * nbytes / total_bits) if total_bits > 0 else float("inf")
    return ChunkedCodeLength(
        variant=variant,
        total_bits=total_bits,
        token_count=sum(s[1] for s in scored),
        chunk_totals=chunk_totals,
        original_bytes=nbytes,
        ratio=ratio,
    )
