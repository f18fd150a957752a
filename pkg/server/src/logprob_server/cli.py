"""Entry point: load a causal LM and serve the probability protocol."""

from __future__ import annotations

import click


@click.command()
@click.option("--model", default="gpt2", show_default=True, help="HF model name or local path")
@click.option("--device", default="cpu", show_default=True)
@click.option("--context-window", type=int, default=None, help="cap on the advertised window")
@click.option("--max-batch", type=int, default=2, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8732, show_default=True)
def main(model, device, context_window, max_batch, host, port):
    """Serve token-level log probabilities over HTTP (protocol v1)."""
    import uvicorn

    from .app import create_app
    from .backend import CausalLMBackend, ServerConfig

    config = ServerConfig(
        model=model, device=device, context_window=context_window, max_batch=max_batch
    )
    backend = CausalLMBackend(config)
    click.echo(
        f"serving {backend.model_id} (vocab {backend.vocab_size}, window {backend.context_window}) "
        f"on {host}:{port}"
    )
    uvicorn.run(create_app(backend), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
