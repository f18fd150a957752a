"""Shared fixtures and independent oracles for the test suite.

Oracles here deliberately avoid the package's own code paths: counting
dictionaries instead of numpy sessions, Fractions instead of register
arithmetic, plain-Python apportionment instead of vectorized quantization.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from infodist.coder import QuantizedDistribution
from infodist.models import (
    EntropyModel,
    ModelDescriptor,
    ModelSession,
    Vocabulary,
)

# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------


def laplace_probs(observed: list[int], vocab_size: int) -> list[float]:
    """Add-1 estimate over a fully observed prefix (order-0 oracle)."""
    counts = Counter(observed)
    total = len(observed)
    return [(counts.get(t, 0) + 1) / (total + vocab_size) for t in range(vocab_size)]


def laplace_sequence_bits(seq: list[int], context: list[int], vocab_size: int) -> float:
    """Order-0 code length from the counting oracle."""
    observed = list(context)
    bits = 0.0
    for t in seq:
        bits += -math.log2(laplace_probs(observed, vocab_size)[t])
        observed.append(t)
    return bits


def brute_quantize(probs: list[float], total: int) -> list[int]:
    """Plain-Python largest-remainder apportionment (no numpy)."""
    v = len(probs)
    spare = total - v
    targets = [p * spare for p in probs]
    base = [math.floor(t) for t in targets]
    rems = [t - b for t, b in zip(targets, base)]
    leftover = spare - sum(base)
    for i in sorted(range(v), key=lambda i: (-rems[i], i))[:leftover]:
        base[i] += 1
    return [b + 1 for b in base]


def brute_spearman(x: list[float], y: list[float]) -> float:
    """Definition-level Spearman: average ranks as exact rationals."""

    def ranks(v: list[float]) -> list[Fraction]:
        out = []
        for a in v:
            less = sum(1 for b in v if b < a)
            equal = sum(1 for b in v if b == a)
            out.append(Fraction(2 * less + equal + 1, 2))
        return out

    rx, ry = ranks(x), ranks(y)
    n = len(x)
    mx = sum(rx, Fraction(0)) / n
    my = sum(ry, Fraction(0)) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    if vx == 0 or vy == 0:
        raise ZeroDivisionError("constant side")
    return float(cov) / math.sqrt(float(vx) * float(vy))


def ceil_neg_log2(w: Fraction) -> int:
    """Smallest integer k with w >= 2^-k, computed exactly."""
    k = 0
    while Fraction(1, 1 << k) > w:
        k += 1
    return k


def exact_interval_width(freqs: list[int], total: int, symbols: list[int]) -> Fraction:
    w = Fraction(1)
    for s in symbols:
        w *= Fraction(freqs[s], total)
    return w


# ---------------------------------------------------------------------------
# Test models
# ---------------------------------------------------------------------------


class _FixedSession(ModelSession):
    def __init__(self, q: QuantizedDistribution, size: int):
        self._q = q
        self._size = size

    def distribution(self) -> np.ndarray:
        return self._q.freqs / self._q.total

    def push(self, token: int) -> None:
        assert 0 <= token < self._size

    def quantized(self, total: int):
        return self._q if total == self._q.total else None


class FixedQuantizedModel(EntropyModel):
    """Context-free model defined directly by integer frequencies."""

    def __init__(self, freqs, total, eos_id=None):
        q = QuantizedDistribution(np.asarray(freqs, dtype=np.int64), total)
        vocab = Vocabulary(size=len(freqs), eos_id=len(freqs) - 1 if eos_id is None else eos_id)
        self.descriptor = ModelDescriptor(
            model_id=f"test:fixed:{list(freqs)}@{total}",
            vocab=vocab,
            deterministic=True,
            context_limit=16,
        )
        self._q = q

    @property
    def quantized_total(self) -> int:
        return self._q.total

    def session(self):
        return _FixedSession(self._q, self.vocab.size)


class BrokenZeroModel(EntropyModel):
    """Assigns probability zero to token 0 (exercises ZeroProbability)."""

    def __init__(self):
        vocab = Vocabulary(size=3, eos_id=2)
        self.descriptor = ModelDescriptor(
            model_id="test:broken-zero", vocab=vocab, deterministic=True, context_limit=16
        )

    def session(self):
        class _S(ModelSession):
            def distribution(self):
                return np.array([0.0, 0.5, 0.5])

            def push(self, token):
                pass

        return _S()


@pytest.fixture(scope="session")
def tiny_vocab() -> Vocabulary:
    """{a=0, b=1, EOS=2}, used by the hand-derived oracle examples."""
    return Vocabulary(size=3, eos_id=2)
