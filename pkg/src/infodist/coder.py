"""Integer arithmetic coder driven by any entropy model.

The coder subdivides a 32-bit register interval [low, high] by each token's
quantized frequency range, emitting bits as the top bits of low and high
agree and deferring opposite bits while the interval straddles the midpoint
(classic carry-free renormalization). Invariants maintained between symbols:

  - 0 <= low <= high < 2^32, top bits of low/high differ,
  - not both in the middle two quarters,
  - high - low + 1 > 2^30 >= any admissible frequency total.

Termination uses the in-interval codepoint with the most trailing zeros, so
streams carry only the bits a zero-padding reader actually needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CorruptStream, InteriorEos, PrecisionTooLow, RunawayDecode
from .models import EntropyModel

_STATE_BITS = 32
_FULL = 1 << _STATE_BITS
_MASK = _FULL - 1
_TOP = _FULL >> 1
_SECOND = _FULL >> 2

MAX_TOTAL_LOG2 = 22
MIN_TOTAL_LOG2 = 14  # configured coding paths; direct construction may go lower


def default_total(vocab_size: int) -> int:
    """2^16 for byte-sized vocabularies, 2^20 for large (sub-word) ones."""
    return 1 << 16 if vocab_size <= (1 << 14) else 1 << 20


@dataclass(frozen=True)
class QuantizedDistribution:
    """Integer-frequency PMF with an exact power-of-two total.

    Every token keeps frequency >= 1 so it stays encodable; `cum` holds the
    exclusive prefix sums the interval update and the decoder's binary
    search both consume.
    """

    freqs: np.ndarray
    total: int
    cum: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        freqs = np.asarray(self.freqs, dtype=np.int64)
        object.__setattr__(self, "freqs", freqs)
        if self.total <= 0 or self.total & (self.total - 1):
            raise ValueError(f"total must be a power of two, got {self.total}")
        if self.total > (1 << MAX_TOTAL_LOG2):
            raise ValueError(f"total 2^{self.total.bit_length() - 1} exceeds register headroom")
        if freqs.ndim != 1 or freqs.size < 2:
            raise ValueError("freqs must be a 1-D table of at least two entries")
        if self.total < freqs.size:
            raise PrecisionTooLow(f"total {self.total} < vocabulary size {freqs.size}")
        if (freqs < 1).any():
            raise ValueError("every frequency must be >= 1")
        if int(freqs.sum()) != self.total:
            raise ValueError("frequencies must sum to the total exactly")
        cum = np.zeros(freqs.size + 1, dtype=np.int64)
        np.cumsum(freqs, out=cum[1:])
        object.__setattr__(self, "cum", cum)

    @classmethod
    def _trusted(cls, freqs: np.ndarray, total: int) -> "QuantizedDistribution":
        """Constructor for internally produced tables whose invariants are
        guaranteed by construction (skips re-validation on the hot path)."""
        self = object.__new__(cls)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "total", total)
        cum = np.zeros(freqs.size + 1, dtype=np.int64)
        np.cumsum(freqs, out=cum[1:])
        object.__setattr__(self, "cum", cum)
        return self


def quantize(probs: Sequence[float] | np.ndarray, total: int) -> QuantizedDistribution:
    """Deterministic largest-remainder apportionment of `total` over `probs`.

    Every token is seeded with frequency 1; the remaining total - V counts
    are split proportionally, leftovers going to the largest fractional
    remainders (ties to the smaller token id). Identical inputs yield
    identical outputs on every platform: the only comparisons are IEEE-754
    elementwise products and a stable sort.
    """
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise ValueError("probs must be a 1-D table of at least two entries")
    if total <= 0 or total & (total - 1):
        raise ValueError(f"total must be a power of two, got {total}")
    if total < p.size:
        raise PrecisionTooLow(f"total {total} < vocabulary size {p.size}")
    if (p < 0).any() or not np.isfinite(p).all():
        raise ValueError("probabilities must be finite and nonnegative")
    if abs(float(p.sum()) - 1.0) > 1e-6:
        raise ValueError("probabilities must sum to 1")
    spare = total - p.size
    target = p * spare
    base = np.floor(target).astype(np.int64)
    leftover = spare - int(base.sum())
    if leftover:
        order = np.argsort(-(target - base), kind="stable")  # ties: smaller id first
        base[order[:leftover]] += 1
    return QuantizedDistribution._trusted(base + 1, total)


class BitStream:
    """Append-only bit buffer, MSB-first within bytes, zero-padded tail."""

    __slots__ = ("_buf", "length_bits")

    def __init__(self, data: bytes = b"", length_bits: int | None = None):
        if length_bits is None:
            length_bits = 8 * len(data)
        if length_bits > 8 * len(data):
            raise ValueError("length_bits exceeds the provided data")
        nbytes = (length_bits + 7) // 8
        self._buf = bytearray(data[:nbytes])
        tail = length_bits & 7
        if tail and self._buf:
            self._buf[-1] &= 0xFF << (8 - tail) & 0xFF  # canonical zero padding
        self.length_bits = length_bits

    def push(self, bit: int) -> None:
        if bit not in (0, 1):
            raise ValueError("bit must be 0 or 1")
        pos = self.length_bits & 7
        if pos == 0:
            self._buf.append(0)
        if bit:
            self._buf[-1] |= 0x80 >> pos
        self.length_bits += 1

    def bit(self, i: int) -> int:
        """Bit at index i; reads past the end are zero (padded tail)."""
        if i < 0:
            raise IndexError(i)
        if i >= self.length_bits:
            return 0
        return (self._buf[i >> 3] >> (7 - (i & 7))) & 1

    def to_bytes(self) -> bytes:
        return bytes(self._buf)

    def flipped(self, i: int) -> "BitStream":
        """Copy with bit i inverted (corruption harnesses)."""
        if not (0 <= i < self.length_bits):
            raise IndexError(i)
        buf = bytearray(self._buf)
        buf[i >> 3] ^= 0x80 >> (i & 7)
        return BitStream(bytes(buf), self.length_bits)

    def __len__(self) -> int:
        return self.length_bits

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitStream):
            return NotImplemented
        return self.length_bits == other.length_bits and self._buf == other._buf

    def __repr__(self) -> str:
        return f"BitStream({self.length_bits} bits)"


class _BitReader:
    __slots__ = ("_stream", "_pos")

    def __init__(self, stream: BitStream):
        self._stream = stream
        self._pos = 0

    def read(self) -> int:
        b = self._stream.bit(self._pos)
        self._pos += 1
        return b


class ArithmeticEncoder:
    """Streams symbols into a BitStream. Single-threaded by construction."""

    def __init__(self, out: BitStream | None = None):
        self.low = 0
        self.high = _MASK
        self.pending_bits = 0
        self.out = out if out is not None else BitStream()
        self._finished = False

    def encode_symbol(self, dist: QuantizedDistribution, symbol: int) -> None:
        if self._finished:
            raise RuntimeError("encoder already finished")
        total = dist.total
        cum = dist.cum
        span = self.high - self.low + 1
        low = self.low
        self.low = low + int(cum[symbol]) * span // total
        self.high = low + int(cum[symbol + 1]) * span // total - 1
        self._renormalize()

    def _renormalize(self) -> None:
        while ((self.low ^ self.high) & _TOP) == 0:
            self._emit(self.low >> (_STATE_BITS - 1))
            self.low = (self.low << 1) & _MASK
            self.high = ((self.high << 1) & _MASK) | 1
        while (self.low & ~self.high & _SECOND) != 0:
            self.pending_bits += 1
            self.low = (self.low << 1) & (_MASK >> 1)
            self.high = ((self.high << 1) & (_MASK >> 1)) | _TOP | 1

    def _emit(self, bit: int) -> None:
        self.out.push(bit)
        opposite = bit ^ 1
        while self.pending_bits:
            self.out.push(opposite)
            self.pending_bits -= 1

    def finish(self) -> BitStream:
        """Pin a codepoint inside [low, high] using as few bits as possible.

        The value with the most trailing zeros needs only its significant
        prefix on the wire; the decoder's zero-padded reads supply the rest.
        """
        if self._finished:
            return self.out
        value = 0
        nbits = 0
        for tz in range(_STATE_BITS, -1, -1):
            step = 1 << tz
            candidate = (self.low + step - 1) & ~(step - 1)
            if candidate <= self.high:
                value = candidate
                nbits = _STATE_BITS - tz
                break
        if nbits == 0 and self.pending_bits:
            nbits = 1  # deferred bits must resolve against an explicit first bit
        for i in range(nbits):
            self._emit((value >> (_STATE_BITS - 1 - i)) & 1)
        self._finished = True
        return self.out


class ArithmeticDecoder:
    """Mirrors the encoder's interval updates while consuming code bits."""

    def __init__(self, stream: BitStream):
        self.low = 0
        self.high = _MASK
        self._reader = _BitReader(stream)
        self.code = 0
        for _ in range(_STATE_BITS):
            self.code = (self.code << 1) | self._reader.read()

    def decode_symbol(self, dist: QuantizedDistribution) -> int:
        total = dist.total
        span = self.high - self.low + 1
        offset = self.code - self.low
        value = ((offset + 1) * total - 1) // span
        if not (0 <= value < total):
            raise CorruptStream("code value fell outside every token range")
        symbol = int(np.searchsorted(dist.cum, value, side="right")) - 1
        cum = dist.cum
        low = self.low
        self.low = low + int(cum[symbol]) * span // total
        self.high = low + int(cum[symbol + 1]) * span // total - 1
        while ((self.low ^ self.high) & _TOP) == 0:
            self.code = ((self.code << 1) & _MASK) | self._reader.read()
            self.low = (self.low << 1) & _MASK
            self.high = ((self.high << 1) & _MASK) | 1
        while (self.low & ~self.high & _SECOND) != 0:
            self.code = (self.code & _TOP) | ((self.code << 1) & (_MASK >> 1)) | self._reader.read()
            self.low = (self.low << 1) & (_MASK >> 1)
            self.high = ((self.high << 1) & (_MASK >> 1)) | _TOP | 1
        return symbol


def _session_quantized(sess, total: int) -> QuantizedDistribution:
    q = sess.quantized(total)
    if q is None:
        q = quantize(sess.distribution(), total)
    return q


def encode(model: EntropyModel, seq: Sequence[int], total: int | None = None) -> BitStream:
    """Losslessly encode ``seq``; the trailing EOS terminator is implicit."""
    eos = model.vocab.eos_id
    model.vocab.check_ids(seq)
    if any(t == eos for t in seq):
        raise InteriorEos("sequence contains the EOS sentinel")
    if total is None:
        total = default_total(model.vocab.size)
    sess = model.session()
    enc = ArithmeticEncoder()
    for t in seq:
        enc.encode_symbol(_session_quantized(sess, total), t)
        sess.push(t)
    enc.encode_symbol(_session_quantized(sess, total), eos)
    return enc.finish()


def decode(
    model: EntropyModel,
    stream: BitStream,
    total: int | None = None,
    max_tokens: int | None = None,
) -> list[int]:
    """Inverse of encode under an identically configured model.

    Stops at the decoded EOS; a ceiling on the output length guards against
    runaway decoding of corrupt streams.
    """
    if total is None:
        total = default_total(model.vocab.size)
    if max_tokens is None:
        max_tokens = 16 * ((stream.length_bits + 7) // 8) + 4096
    eos = model.vocab.eos_id
    sess = model.session()
    dec = ArithmeticDecoder(stream)
    out: list[int] = []
    while True:
        symbol = dec.decode_symbol(_session_quantized(sess, total))
        if symbol == eos:
            return out
        out.append(symbol)
        if len(out) > max_tokens:
            raise RunawayDecode(f"decoded more than {max_tokens} tokens without EOS")
        sess.push(symbol)


def estimate_quantized_bits(model: EntropyModel, seq: Sequence[int], total: int | None = None) -> float:
    """Sum of -log2(freq/total) over seq plus the trailing EOS.

    Replays the same session/quantization the encoder would see but touches
    none of the interval machinery, making it an independent check on the
    emitted length.
    """
    if total is None:
        total = default_total(model.vocab.size)
    eos = model.vocab.eos_id
    sess = model.session()
    bits = 0.0
    for t in list(seq) + [eos]:
        q = _session_quantized(sess, total)
        bits += -math.log2(int(q.freqs[t]) / q.total)
        sess.push(t)
    return bits
