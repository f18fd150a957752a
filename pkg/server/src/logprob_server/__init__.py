"""HTTP probability server for causal language models (protocol v1)."""

from .app import create_app
from .backend import CausalLMBackend, ServerConfig
from .quantization import quantize_freqs

__version__ = "0.1.0"

__all__ = ["CausalLMBackend", "ServerConfig", "create_app", "quantize_freqs"]
