"""Server test fixtures: a tiny in-memory causal LM, no downloads needed."""

from __future__ import annotations

import os

import pytest
import torch
from fastapi.testclient import TestClient

from logprob_server.app import create_app
from logprob_server.backend import CausalLMBackend, ServerConfig


class ByteTokenizer:
    """Byte-level tokenizer with an EOS sentinel at id 256."""

    eos_token_id = 256

    def encode(self, text: str, add_special_tokens: bool = False) -> list[int]:
        del add_special_tokens
        return list(text.encode("utf-8", "surrogateescape"))

    def decode(self, ids, clean_up_tokenization_spaces: bool = False) -> str:
        del clean_up_tokenization_spaces
        return bytes(int(t) for t in ids).decode("utf-8", "surrogateescape")

    def get_vocab(self) -> dict[str, int]:
        vocab = {f"<0x{i:02X}>": i for i in range(256)}
        vocab["<eos>"] = 256
        return vocab


def build_tiny_backend(seed: int = 1234, max_batch: int = 2) -> CausalLMBackend:
    from transformers import GPT2Config, GPT2LMHeadModel

    config = GPT2Config(
        vocab_size=257,
        n_positions=64,
        n_embd=32,
        n_layer=2,
        n_head=2,
        eos_token_id=256,
        bos_token_id=256,
    )
    torch.manual_seed(seed)
    model = GPT2LMHeadModel(config)
    return CausalLMBackend(
        ServerConfig(model="tiny-byte-lm", max_batch=max_batch),
        model=model,
        tokenizer=ByteTokenizer(),
    )


@pytest.fixture(scope="session")
def tiny_backend() -> CausalLMBackend:
    return build_tiny_backend()


@pytest.fixture(scope="session")
def tiny_client(tiny_backend) -> TestClient:
    return TestClient(create_app(tiny_backend))


def try_load_gpt2() -> CausalLMBackend | None:
    """Real GPT-2 weights, from INFODIST_GPT2_PATH or the HF hub if reachable."""
    source = os.environ.get("INFODIST_GPT2_PATH", "gpt2")
    try:
        return CausalLMBackend(ServerConfig(model=source))
    except Exception:  # noqa: BLE001 - offline sandboxes have no weights
        return None
