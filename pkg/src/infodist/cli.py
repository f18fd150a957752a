"""Command-line surface: compress, decompress, codelen, distance, eval, serve-mock.

Reports are line-delimited JSON for pipelines (--pretty for humans). All
commands are deterministic for built-in models given identical flags and
inputs. Configuration precedence: flags > environment (INFODIST_MODEL,
INFODIST_SERVER) > defaults.
"""

from __future__ import annotations

import json
import os
import sys
import time
from typing import Callable

import click

from . import container as container_mod
from .codelen import DEFAULT_CHUNK_CHARS, DEFAULT_SEPARATOR, JointMode, Variant, chunked_codelen
from .coder import MAX_TOTAL_LOG2, MIN_TOTAL_LOG2
from .metrics import Metric, distance as compute_distance, evaluate_metric, pair_lengths
from .errors import InfoDistError
from .models import AdaptiveContextModel, EntropyModel, UniformModel
from . import tasks as tasks_mod

_ENV_MODEL = "INFODIST_MODEL"
_ENV_SERVER = "INFODIST_SERVER"
_DEFAULT_MODEL = "builtin:adaptive:2"


def resolve_model(selector: str | None) -> EntropyModel:
    """builtin:uniform | builtin:adaptive[:k] | remote[:url]"""
    selector = selector or os.environ.get(_ENV_MODEL) or _DEFAULT_MODEL
    parts = selector.split(":")
    if parts[0] == "builtin":
        if len(parts) >= 2 and parts[1] == "uniform":
            return UniformModel()
        if len(parts) >= 2 and parts[1] == "adaptive":
            order = int(parts[2]) if len(parts) >= 3 else 2
            return AdaptiveContextModel(order=order)
        raise InfoDistError(f"unknown builtin model: {selector!r}")
    if parts[0] == "remote":
        from .remote import RemoteModel, ServerEndpoint

        url = selector[len("remote:") :] if len(parts) > 1 else os.environ.get(_ENV_SERVER)
        if not url:
            raise InfoDistError("remote model needs a URL (remote:<url> or INFODIST_SERVER)")
        return RemoteModel(ServerEndpoint(base_url=url))
    raise InfoDistError(f"unknown model selector: {selector!r}")


def _emit(obj: dict, pretty: bool) -> None:
    click.echo(json.dumps(obj, indent=2 if pretty else None))
    if pretty and "grid" in obj:
        click.echo(_grid_table(obj["grid"]))


def _grid_table(grid: dict) -> str:
    variants = sorted({c["variant"] for c in grid["cells"]})
    metrics = sorted({c["metric"] for c in grid["cells"]})
    scores = {(c["metric"], c["variant"]): c.get("score") for c in grid["cells"]}
    width = 10
    lines = [f"{grid['task']} grid ({grid['records']} records)"]
    lines.append("metric".ljust(8) + "".join(v.rjust(width) for v in variants))
    for m in metrics:
        cells = []
        for v in variants:
            s = scores.get((m, v))
            cells.append(("-" if s is None else f"{s:.4f}").rjust(width))
        lines.append(m.ljust(8) + "".join(cells))
    return "\n".join(lines)


def _guard(fn: Callable[[], dict], pretty: bool) -> None:
    try:
        _emit(fn(), pretty)
    except InfoDistError as exc:
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}}, pretty)
        sys.exit(1)
    except OSError as exc:
        _emit({"error": {"type": "IOError", "message": str(exc)}}, pretty)
        sys.exit(1)


def _read_text(path: str) -> str:
    with open(path, "rb") as fh:
        return fh.read().decode("utf-8", "surrogateescape")


model_option = click.option("--model", "-m", default=None, help="builtin:uniform | builtin:adaptive:k | remote:URL")
pretty_option = click.option("--pretty", is_flag=True, help="indent JSON output")
variant_option = click.option(
    "--variant", type=click.Choice([v.value for v in Variant]), default=Variant.LOGPROB.value
)
metric_option = click.option(
    "--metric", type=click.Choice([m.value for m in Metric]), default=Metric.MEAN.value
)
mode_option = click.option(
    "--mode", type=click.Choice([m.value for m in JointMode]), default=JointMode.CONDITIONAL.value
)
separator_option = click.option("--separator", default=DEFAULT_SEPARATOR, show_default=False)
jobs_option = click.option("--jobs", type=int, default=None, help="parallel workers (default: serial)")


@click.group()
@click.version_option(package_name="infodist")
def main() -> None:
    """Compression lengths and information distances from next-token models."""


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("output_path", type=click.Path(dir_okay=False, writable=True))
@model_option
@click.option("--chunk-chars", type=int, default=DEFAULT_CHUNK_CHARS, show_default=True)
@click.option("--total-log2", type=click.IntRange(MIN_TOTAL_LOG2, MAX_TOTAL_LOG2), default=None)
@jobs_option
@pretty_option
def compress(input_path, output_path, model, chunk_chars, total_log2, jobs, pretty):
    """Compress a file into an .idz archive and print stats."""

    def run() -> dict:
        m = resolve_model(model)
        text = _read_text(input_path)
        t0 = time.perf_counter()
        blob = container_mod.compress_text(
            m, text, chunk_chars=chunk_chars, total_log2=total_log2, jobs=jobs
        )
        wall_ms = (time.perf_counter() - t0) * 1e3
        with open(output_path, "wb") as fh:
            fh.write(blob)
        bytes_in = len(text.encode("utf-8", "surrogateescape"))
        bits_out = 8 * len(blob)
        header, _ = container_mod.unpack(blob)
        return {
            "bytes_in": bytes_in,
            "bits_out": bits_out,
            "ratio": (8.0 * bytes_in / bits_out) if bits_out else 0.0,
            "chunks": header.chunk_count,
            "wall_ms": round(wall_ms, 3),
        }

    _guard(run, pretty)


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("output_path", type=click.Path(dir_okay=False, writable=True))
@model_option
@jobs_option
@pretty_option
def decompress(input_path, output_path, model, jobs, pretty):
    """Restore the original file from an .idz archive (checksum verified)."""

    def run() -> dict:
        m = resolve_model(model)
        with open(input_path, "rb") as fh:
            blob = fh.read()
        text = container_mod.decompress_text(m, blob, jobs=jobs)
        raw = text.encode("utf-8", "surrogateescape")
        with open(output_path, "wb") as fh:
            fh.write(raw)
        return {"bytes_out": len(raw)}

    _guard(run, pretty)


@main.command()
@click.argument("x_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("y_path", type=click.Path(exists=True, dir_okay=False), required=False)
@model_option
@variant_option
@mode_option
@separator_option
@click.option("--chunk-chars", type=int, default=DEFAULT_CHUNK_CHARS, show_default=True)
@jobs_option
@pretty_option
def codelen(x_path, y_path, model, variant, mode, separator, chunk_chars, jobs, pretty):
    """Code length of X; with Y, the full length quintuple and all metrics."""

    def run() -> dict:
        m = resolve_model(model)
        v = Variant(variant)
        x_text = _read_text(x_path)
        if y_path is None:
            if not x_text:
                return {"variant": v.value, "total_bits": 0.0, "token_count": 0, "chunk_totals": [], "ratio": None}
            rep = chunked_codelen(m, x_text, chunk_chars=chunk_chars, variant=v, jobs=jobs)
            return rep.to_json_dict()
        y_text = _read_text(y_path)
        sep = m.tokenize(separator) if separator else []
        q = pair_lengths(m, m.tokenize(x_text), m.tokenize(y_text), JointMode(mode), sep, (v,))[v]
        out = {
            "variant": q.variant.value,
            "mode": q.mode.value,
            "separator": separator,
            "c_x": q.c_x,
            "c_y": q.c_y,
            "c_x_given_y": q.c_x_given_y,
            "c_y_given_x": q.c_y_given_x,
            "c_xy": q.c_xy,
        }
        for metric in Metric:
            out[f"m_{metric.value}" if metric is not Metric.CDM else "cdm"] = evaluate_metric(q, metric)
        return out

    _guard(run, pretty)


@main.command("distance")
@click.argument("x_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("y_path", type=click.Path(exists=True, dir_okay=False))
@model_option
@metric_option
@variant_option
@mode_option
@separator_option
@pretty_option
def distance_cmd(x_path, y_path, model, metric, variant, mode, separator, pretty):
    """Distance between two text files under one metric."""

    def run() -> dict:
        m = resolve_model(model)
        report = compute_distance(
            m,
            _read_text(x_path),
            _read_text(y_path),
            metric=Metric(metric),
            variant=Variant(variant),
            mode=JointMode(mode),
            separator=separator,
        )
        out = report.to_json_dict()
        out["separator"] = separator
        return out

    _guard(run, pretty)


@main.group()
def eval() -> None:
    """Task evaluations over JSONL datasets."""


def _grid_json(grid: tasks_mod.MetricGrid) -> dict:
    return grid.to_json_dict()


@eval.command("sts")
@click.argument("data_path", type=click.Path(exists=True, dir_okay=False))
@model_option
@metric_option
@variant_option
@mode_option
@separator_option
@click.option("--grid", is_flag=True, help="evaluate all metric x variant cells")
@jobs_option
@pretty_option
def eval_sts_cmd(data_path, model, metric, variant, mode, separator, grid, jobs, pretty):
    """Spearman correlation on {"a","b","score"} JSONL pairs."""

    def run() -> dict:
        m = resolve_model(model)
        records = tasks_mod.load_sts_jsonl(data_path)
        sims = tasks_mod.sts_details(
            m, records, Metric(metric), Variant(variant), JointMode(mode), separator, jobs
        )
        rho = tasks_mod.spearman_rho(sims, [r.gold for r in records])
        out = {
            "task": "sts",
            "metric": metric,
            "variant": variant,
            "mode": mode,
            "separator": separator,
            "records": len(records),
            "rho": rho,
            "rho_x100": 100.0 * rho,
            "per_record": [
                {"similarity": s, "gold": r.gold} for s, r in zip(sims, records)
            ],
        }
        if grid:
            out["grid"] = _grid_json(
                tasks_mod.metric_grid(m, records, "sts", JointMode(mode), separator, jobs=jobs)
            )
        return out

    _guard(run, pretty)


@eval.command("classify")
@click.argument("data_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("exemplars_path", type=click.Path(exists=True, dir_okay=False))
@model_option
@metric_option
@variant_option
@mode_option
@separator_option
@click.option("--shot", type=click.Choice([s.value for s in tasks_mod.Shot]), default="one")
@click.option("--swap-xy", is_flag=True, help="swap the exemplar/text roles of x and y")
@click.option("--grid", is_flag=True)
@click.option("--rpred", is_flag=True, help="bucketed prediction-distance-ratio analysis")
@click.option("--groups", type=int, default=10, show_default=True)
@jobs_option
@pretty_option
def eval_classify_cmd(
    data_path, exemplars_path, model, metric, variant, mode, separator,
    shot, swap_xy, grid, rpred, groups, jobs, pretty,
):
    """Zero/one-shot accuracy on {"text","label"} + exemplars JSONL."""

    def run() -> dict:
        m = resolve_model(model)
        records = tasks_mod.load_classify_jsonl(data_path, exemplars_path)
        met, var = Metric(metric), Variant(variant)
        details = tasks_mod.classify_details(
            m, records, (var,), JointMode(mode), separator, swap_xy, jobs
        )
        outcomes = [d[var][met] for d in details]
        accuracy = sum(o.correct for o in outcomes) / len(outcomes)
        out = {
            "task": "classify",
            "shot": shot,
            "metric": metric,
            "variant": variant,
            "mode": mode,
            "separator": separator,
            "swap_xy": swap_xy,
            "records": len(records),
            "accuracy": accuracy,
            "per_record": [
                {"prediction": o.prediction, "label": r.label, "correct": o.correct}
                for o, r in zip(outcomes, records)
            ],
        }
        if grid:
            out["grid"] = _grid_json(
                tasks_mod.metric_grid(m, records, "classify", JointMode(mode), separator,
                                      swap_xy=swap_xy, jobs=jobs)
            )
        if rpred:
            buckets = tasks_mod.rpred_analysis(
                m, records, Metric(metric), Variant(variant), groups,
                JointMode(mode), separator, swap_xy, jobs,
            )
            out["rpred"] = [
                {"mean_ratio": b.mean_ratio, "accuracy": b.accuracy, "count": b.count}
                for b in buckets
            ]
        return out

    _guard(run, pretty)


@eval.command("rerank")
@click.argument("queries_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("candidates_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("qrels_path", type=click.Path(exists=True, dir_okay=False))
@model_option
@click.option("--metric", type=click.Choice([m.value for m in Metric]), default=Metric.MIN.value)
@variant_option
@mode_option
@separator_option
@click.option("-k", "--k", type=int, default=10, show_default=True)
@click.option("--grid", is_flag=True)
@jobs_option
@pretty_option
def eval_rerank_cmd(
    queries_path, candidates_path, qrels_path, model, metric, variant, mode,
    separator, k, grid, jobs, pretty,
):
    """NDCG@k after re-ranking pre-retrieved candidates by distance."""

    def run() -> dict:
        m = resolve_model(model)
        records = tasks_mod.load_rerank(queries_path, candidates_path, qrels_path)
        outcomes = tasks_mod.rerank_details(
            m, records, Metric(metric), Variant(variant), k, JointMode(mode), separator, jobs
        )
        out = {
            "task": "rerank",
            "metric": metric,
            "variant": variant,
            "mode": mode,
            "separator": separator,
            "k": k,
            "records": len(records),
            "ndcg": sum(o.ndcg for o in outcomes) / len(outcomes),
            "flagged_queries": sum(1 for o in outcomes if o.flagged),
            "per_record": [
                {"ndcg": o.ndcg, "ranking": list(o.ranking), "flagged": o.flagged}
                for o in outcomes
            ],
        }
        if grid:
            out["grid"] = _grid_json(
                tasks_mod.metric_grid(m, records, "rerank", JointMode(mode), separator, k=k, jobs=jobs)
            )
        return out

    _guard(run, pretty)


@main.command("serve-mock")
@model_option
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8731, show_default=True)
def serve_mock(model, host, port):
    """Run the in-process mock probability server over HTTP."""
    from .mock_server import serve

    serve(resolve_model(model), host=host, port=port)


if __name__ == "__main__":
    main()
