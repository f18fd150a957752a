"""Integer quantization of probability tables.

Reimplements the client-side rule from scratch so the two codebases can be
checked against each other integer-exactly: seed every token with one count,
distribute the remaining total proportionally, hand leftovers to the largest
fractional remainders (ties to the smaller token id). Arithmetic is plain
IEEE-754 elementwise work plus a stable sort, so identical float inputs give
identical integer outputs everywhere.
"""

from __future__ import annotations

import numpy as np


def quantize_freqs(probs: np.ndarray, total: int) -> np.ndarray:
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise ValueError("probs must be a 1-D table of at least two entries")
    if total <= 0 or total & (total - 1):
        raise ValueError(f"total must be a power of two, got {total}")
    if total < p.size:
        raise ValueError(f"total {total} is below the vocabulary size {p.size}")
    if (p < 0).any() or not np.isfinite(p).all():
        raise ValueError("probabilities must be finite and nonnegative")
    if abs(float(p.sum()) - 1.0) > 1e-6:
        raise ValueError("probabilities must sum to 1")
    spare = total - p.size
    scaled = p * spare
    floors = np.floor(scaled).astype(np.int64)
    leftover = spare - int(floors.sum())
    if leftover:
        by_remainder = np.argsort(-(scaled - floors), kind="stable")
        floors[by_remainder[:leftover]] += 1
    return floors + 1
