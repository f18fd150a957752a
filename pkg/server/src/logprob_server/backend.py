"""Causal-LM scoring backend.

Wraps any HuggingFace causal language model (or an injected model/tokenizer
pair) behind three operations: teacher-forced scoring, next-token
distribution, and tokenization. The start-of-text convention prepends the
EOS token, so the first real token is conditioned on it.
"""

from __future__ import annotations

import hashlib
import math
import threading
from dataclasses import dataclass

import numpy as np
import torch

from .quantization import quantize_freqs

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ServerConfig:
    model: str = "gpt2"
    device: str = "cpu"
    context_window: int | None = None  # None: model maximum minus the sentinel
    total_default: int = 1 << 20
    max_batch: int = 2  # bound on concurrent forward passes

    def __post_init__(self) -> None:
        if self.context_window is not None and self.context_window < 16:
            raise ValueError("context_window must be >= 16")
        if self.total_default <= 0 or self.total_default & (self.total_default - 1):
            raise ValueError("total_default must be a power of two")
        if self.max_batch < 1:
            raise ValueError("max_batch must be >= 1")


class TooLongError(ValueError):
    """Request exceeds the advertised context window."""


class CausalLMBackend:
    def __init__(self, config: ServerConfig, model=None, tokenizer=None):
        self.config = config
        if model is None or tokenizer is None:
            from transformers import AutoModelForCausalLM, AutoTokenizer

            tokenizer = AutoTokenizer.from_pretrained(config.model)
            model = AutoModelForCausalLM.from_pretrained(config.model)
        model.eval()
        model.to(config.device)
        self.model = model
        self.tokenizer = tokenizer
        self.vocab_size = int(model.config.vocab_size)
        eos = tokenizer.eos_token_id
        if eos is None or not (0 <= eos < self.vocab_size):
            raise ValueError("tokenizer must define an EOS token inside the vocabulary")
        self.eos_id = int(eos)
        max_positions = int(getattr(model.config, "n_positions", None) or model.config.max_position_embeddings)
        window = max_positions - 1  # one slot reserved for the EOS sentinel
        if config.context_window is not None:
            window = min(window, config.context_window)
        self.context_window = window
        self.tokenizer_fingerprint = self._fingerprint_tokenizer()
        self.model_id = self._model_identity()
        self._gate = threading.Semaphore(config.max_batch)

    # -- identity ------------------------------------------------------------

    def _fingerprint_tokenizer(self) -> str:
        vocab = self.tokenizer.get_vocab()
        digest = hashlib.blake2b(digest_size=8)
        for token, idx in sorted(vocab.items(), key=lambda kv: kv[1]):
            digest.update(f"{idx}:{token}\n".encode())
        return digest.hexdigest()

    def _model_identity(self) -> str:
        cfg = self.model.config.to_json_string(use_diff=False)
        n_params = sum(p.numel() for p in self.model.parameters())
        digest = hashlib.blake2b(
            f"{self.config.model}|{n_params}|{cfg}".encode(), digest_size=8
        ).hexdigest()
        return f"{self.config.model}:{digest}"

    # -- protocol operations ---------------------------------------------------

    def tokenize(self, text: str) -> list[int]:
        return [int(t) for t in self.tokenizer.encode(text, add_special_tokens=False)]

    def detokenize(self, ids: list[int]) -> str:
        self._check_ids(ids)
        return self.tokenizer.decode(ids, clean_up_tokenization_spaces=False)

    def score(self, context_ids: list[int], target_ids: list[int]) -> tuple[list[float], list[int]]:
        """log2 probabilities and 1-indexed ranks of each target token."""
        self._check_ids(context_ids)
        self._check_ids(target_ids)
        if len(context_ids) + len(target_ids) > self.context_window:
            raise TooLongError(
                f"{len(context_ids)}+{len(target_ids)} tokens exceed window {self.context_window}"
            )
        if not target_ids:
            return [], []
        stream = [self.eos_id] + list(context_ids) + list(target_ids)
        logits = self._forward(stream)  # (len(stream), V): position i predicts i+1
        first = len(context_ids)  # logits index predicting target_ids[0]
        out_logprobs: list[float] = []
        out_ranks: list[int] = []
        logprobs = torch.log_softmax(logits[first : first + len(target_ids)].double(), dim=-1)
        for row, target in zip(logprobs, target_ids):
            value = row[target]
            out_logprobs.append(float(value) / _LN2)
            higher = int((row > value).sum())
            tied_before = int((row[:target] == value).sum())
            out_ranks.append(higher + tied_before + 1)
        return out_logprobs, out_ranks

    def distribution(self, context_ids: list[int], total: int) -> np.ndarray:
        """Quantized next-token frequencies after context_ids."""
        self._check_ids(context_ids)
        if len(context_ids) > self.context_window:
            raise TooLongError(f"{len(context_ids)} context tokens exceed window {self.context_window}")
        if total < self.vocab_size:
            raise ValueError(f"total {total} is below the vocabulary size {self.vocab_size}")
        stream = [self.eos_id] + list(context_ids)
        logits = self._forward(stream)
        probs = torch.softmax(logits[-1].double(), dim=-1).cpu().numpy()
        probs = probs / probs.sum()
        return quantize_freqs(probs, total)

    # -- internals ---------------------------------------------------------

    def _forward(self, stream: list[int]) -> torch.Tensor:
        ids = torch.tensor([stream], dtype=torch.long, device=self.config.device)
        with self._gate, torch.no_grad():
            return self.model(ids).logits[0]

    def _check_ids(self, ids: list[int]) -> None:
        for t in ids:
            if not (0 <= t < self.vocab_size):
                raise ValueError(f"token id {t} outside vocabulary of size {self.vocab_size}")
