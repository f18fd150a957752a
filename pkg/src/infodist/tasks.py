"""Task evaluators built on the information-distance metrics.

Three task families: semantic textual similarity (Spearman rank correlation
against graded gold labels), zero/one-shot classification (argmin of the
distance between class exemplars and the test text), and candidate-list
re-ranking (NDCG@k against graded relevance judgments). A metric grid runs
all metric x variant combinations off shared length computations, and the
prediction-distance-ratio analysis buckets records by how decisively the
winning class beat the field.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .codelen import DEFAULT_SEPARATOR, JointMode, Variant
from .metrics import LengthQuintuple, Metric, evaluate_metric, pair_lengths
from .errors import EmptyOperand, GroupingError, UndefinedCorrelation
from .models import EntropyModel


class Shot(str, Enum):
    ZERO = "zero"
    ONE = "one"


@dataclass(frozen=True)
class StsRecord:
    sentence_a: str
    sentence_b: str
    gold: float

    def __post_init__(self) -> None:
        if not self.sentence_a or not self.sentence_b:
            raise ValueError("sentences must be nonempty")
        if not (0.0 <= self.gold <= 5.0):
            raise ValueError(f"gold score {self.gold} outside [0, 5]")


@dataclass(frozen=True)
class ClassifyRecord:
    text: str
    label: int
    exemplars: Mapping[int, str | tuple[str, ...]]

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("text must be nonempty")
        if self.label not in self.exemplars:
            raise ValueError(f"label {self.label} missing from exemplars")
        for cls, ex in self.exemplars.items():
            items = (ex,) if isinstance(ex, str) else tuple(ex)
            if not items or any(not e for e in items):
                raise ValueError(f"class {cls} has an empty exemplar")


@dataclass(frozen=True)
class RerankRecord:
    query: str
    candidates: tuple[tuple[str, str], ...]  # (doc id, text)
    qrels: Mapping[str, int]

    def __post_init__(self) -> None:
        ids = [d for d, _ in self.candidates]
        if len(set(ids)) != len(ids):
            raise ValueError("candidate doc ids must be unique")
        if any(r < 0 for r in self.qrels.values()):
            raise ValueError("relevance grades must be >= 0")


# ---------------------------------------------------------------------------
# Evaluation metrics
# ---------------------------------------------------------------------------


def rank_average_ties(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values share the average of their positions."""
    a = np.asarray(values, dtype=np.float64)
    order = np.argsort(a, kind="stable")
    ranks = np.empty(a.size, dtype=np.float64)
    i = 0
    while i < a.size:
        j = i
        while j + 1 < a.size and a[order[j + 1]] == a[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman correlation with average ranks for ties."""
    a = np.asarray(x, dtype=np.float64)
    b = np.asarray(y, dtype=np.float64)
    if a.size != b.size or a.size < 2:
        raise ValueError("need two equal-length samples of size >= 2")
    ra = rank_average_ties(a) - (a.size + 1) / 2.0
    rb = rank_average_ties(b) - (b.size + 1) / 2.0
    denom = math.sqrt(float((ra * ra).sum()) * float((rb * rb).sum()))
    if denom == 0.0:
        raise UndefinedCorrelation("a constant-valued side has no rank ordering")
    return float((ra * rb).sum()) / denom


def ndcg_at_k(ranked_rels: Sequence[int], ideal_rels: Sequence[int], k: int = 10) -> float:
    """Linear-gain NDCG@k with 1/log2(rank+1) discounts.

    ideal_rels is the judged relevance universe for the query; a query with
    no positive judgment scores 0.
    """
    ideal = sorted(ideal_rels, reverse=True)[:k]
    idcg = sum(r / math.log2(i + 2) for i, r in enumerate(ideal))
    if idcg == 0.0:
        return 0.0
    dcg = sum(r / math.log2(i + 2) for i, r in enumerate(ranked_rels[:k]))
    return dcg / idcg


# ---------------------------------------------------------------------------
# Task runners
# ---------------------------------------------------------------------------


def _map_records(fn, records, jobs: int | None):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, records))
    return [fn(r) for r in records]


def sts_details(
    model: EntropyModel,
    records: Sequence[StsRecord],
    metric: Metric = Metric.MEAN,
    variant: Variant = Variant.LOGPROB,
    mode: JointMode = JointMode.CONDITIONAL,
    separator: str = DEFAULT_SEPARATOR,
    jobs: int | None = None,
) -> list[float]:
    """Per-pair similarity scores (negated distances), in record order."""
    sims = _sts_similarities(model, records, (variant,), mode, separator, jobs)
    return [s[variant][metric] for s in sims]


def eval_sts(
    model: EntropyModel,
    records: Sequence[StsRecord],
    metric: Metric = Metric.MEAN,
    variant: Variant = Variant.LOGPROB,
    mode: JointMode = JointMode.CONDITIONAL,
    separator: str = DEFAULT_SEPARATOR,
    jobs: int | None = None,
) -> float:
    """Spearman rho between negated distances and gold similarity labels."""
    if len(records) < 2:
        raise ValueError("need at least two sentence pairs")
    sims = sts_details(model, records, metric, variant, mode, separator, jobs)
    return spearman_rho(sims, [r.gold for r in records])


def _sts_similarities(model, records, variants, mode, separator, jobs):
    sep = model.tokenize(separator) if separator else []

    def one(rec: StsRecord) -> dict[Variant, dict[Metric, float]]:
        x = model.tokenize(rec.sentence_a)
        y = model.tokenize(rec.sentence_b)
        qs = pair_lengths(model, x, y, mode, sep, variants)
        return {v: {m: -evaluate_metric(qs[v], m) for m in Metric} for v in variants}

    return _map_records(one, records, jobs)


@dataclass(frozen=True)
class ClassifyOutcome:
    prediction: int
    correct: bool
    distances: Mapping[int, float]


def classify_details(
    model: EntropyModel,
    records: Sequence[ClassifyRecord],
    variants: Sequence[Variant],
    mode: JointMode,
    separator: str,
    swap_xy: bool,
    jobs: int | None,
) -> list[dict[Variant, dict[Metric, ClassifyOutcome]]]:
    sep = model.tokenize(separator) if separator else []
    keys = None
    for rec in records:
        k = tuple(sorted(rec.exemplars))
        if keys is None:
            keys = k
        elif k != keys:
            raise ValueError("all records must share the same exemplar classes")

    def one(indexed: tuple[int, ClassifyRecord]) -> dict[Variant, dict[Metric, ClassifyOutcome]]:
        idx, rec = indexed
        y = model.tokenize(rec.text)
        if not y:
            raise EmptyOperand(f"record {idx}: text tokenized to nothing")
        per_class: dict[int, list[dict[Variant, LengthQuintuple]]] = {}
        for cls in sorted(rec.exemplars):
            ex = rec.exemplars[cls]
            items = (ex,) if isinstance(ex, str) else tuple(ex)
            quintuples = []
            for item in items:
                x = model.tokenize(item)
                if not x:
                    raise EmptyOperand(f"record {idx}: class {cls} exemplar tokenized to nothing")
                a, b = (y, x) if swap_xy else (x, y)
                quintuples.append(pair_lengths(model, a, b, mode, sep, variants))
            per_class[cls] = quintuples
        out: dict[Variant, dict[Metric, ClassifyOutcome]] = {}
        for v in variants:
            out[v] = {}
            for m in Metric:
                # multiple exemplars per class reduce by min distance
                dists = {
                    cls: min(evaluate_metric(q[v], m) for q in qs)
                    for cls, qs in per_class.items()
                }
                pred = min(sorted(dists), key=lambda c: dists[c])  # ties -> smallest class id
                out[v][m] = ClassifyOutcome(pred, pred == rec.label, dists)
        return out

    return _map_records(one, list(enumerate(records)), jobs)


def eval_classify(
    model: EntropyModel,
    records: Sequence[ClassifyRecord],
    metric: Metric = Metric.MEAN,
    variant: Variant = Variant.LOGPROB,
    shot: Shot = Shot.ONE,
    mode: JointMode = JointMode.CONDITIONAL,
    separator: str = DEFAULT_SEPARATOR,
    swap_xy: bool = False,
    jobs: int | None = None,
) -> float:
    """Fraction of records whose argmin-distance class matches the label.

    Exemplars are x and the test text is y (zero-shot descriptions and
    one-shot training samples alike); --swap-xy flips the direction.
    """
    if not records:
        raise ValueError("need at least one record")
    del shot  # zero- and one-shot share the mechanics; exemplars differ
    details = classify_details(model, records, (variant,), mode, separator, swap_xy, jobs)
    return sum(d[variant][metric].correct for d in details) / len(records)


@dataclass(frozen=True)
class RerankOutcome:
    ndcg: float
    ranking: tuple[str, ...]
    flagged: bool  # no positively judged doc for this query


def eval_rerank(
    model: EntropyModel,
    records: Sequence[RerankRecord],
    metric: Metric = Metric.MIN,
    variant: Variant = Variant.LOGPROB,
    k: int = 10,
    mode: JointMode = JointMode.CONDITIONAL,
    separator: str = DEFAULT_SEPARATOR,
    jobs: int | None = None,
) -> float:
    """Mean NDCG@k after sorting candidates by ascending distance to the query."""
    outcomes = rerank_details(model, records, metric, variant, k, mode, separator, jobs)
    if not outcomes:
        raise ValueError("need at least one query")
    return sum(o.ndcg for o in outcomes) / len(outcomes)


def rerank_details(
    model: EntropyModel,
    records: Sequence[RerankRecord],
    metric: Metric = Metric.MIN,
    variant: Variant = Variant.LOGPROB,
    k: int = 10,
    mode: JointMode = JointMode.CONDITIONAL,
    separator: str = DEFAULT_SEPARATOR,
    jobs: int | None = None,
) -> list[RerankOutcome]:
    sep = model.tokenize(separator) if separator else []

    def one(rec: RerankRecord) -> RerankOutcome:
        if not rec.candidates:
            raise EmptyOperand("query has no candidates")
        y = model.tokenize(rec.query)
        scored: list[tuple[float, int, str]] = []
        for idx, (doc_id, text) in enumerate(rec.candidates):
            x = model.tokenize(text)
            q = pair_lengths(model, x, y, mode, sep, (variant,))[variant]
            scored.append((evaluate_metric(q, metric), idx, doc_id))
        scored.sort()  # ascending distance; ties by original candidate order
        ranking = tuple(doc_id for _, _, doc_id in scored)
        rels = [rec.qrels.get(doc_id, 0) for doc_id in ranking]
        ideal = list(rec.qrels.values())
        flagged = not any(r > 0 for r in ideal)
        return RerankOutcome(ndcg=ndcg_at_k(rels, ideal, k), ranking=ranking, flagged=flagged)

    return _map_records(one, records, jobs)


# ---------------------------------------------------------------------------
# Metric grid (all metric x variant combinations, shared lengths)
# ---------------------------------------------------------------------------

GRID_METRICS = (Metric.MAX, Metric.MIN, Metric.MEAN)
GRID_VARIANTS = (Variant.LOGPROB, Variant.LOGRANK)


@dataclass(frozen=True)
class MetricGrid:
    task_kind: str
    record_count: int
    cells: Mapping[tuple[Metric, Variant], float | None]
    errors: Mapping[tuple[Metric, Variant], str] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out: dict = {"task": self.task_kind, "records": self.record_count, "cells": []}
        for (m, v), score in self.cells.items():
            cell = {"metric": m.value, "variant": v.value, "score": score}
            err = self.errors.get((m, v))
            if err:
                cell["error"] = err
            out["cells"].append(cell)
        return out


def metric_grid(
    model: EntropyModel,
    records: Sequence,
    task_kind: str,
    mode: JointMode = JointMode.CONDITIONAL,
    separator: str = DEFAULT_SEPARATOR,
    k: int = 10,
    swap_xy: bool = False,
    jobs: int | None = None,
) -> MetricGrid:
    """Evaluate every (metric, variant) cell; lengths are computed once.

    Per-cell failures are recorded while the rest of the grid is returned.
    """
    cells: dict[tuple[Metric, Variant], float | None] = {}
    errors: dict[tuple[Metric, Variant], str] = {}

    if task_kind == "sts":
        sims = _sts_similarities(model, records, GRID_VARIANTS, mode, separator, jobs)
        gold = [r.gold for r in records]
        for m in GRID_METRICS:
            for v in GRID_VARIANTS:
                try:
                    cells[(m, v)] = spearman_rho([s[v][m] for s in sims], gold)
                except Exception as exc:  # noqa: BLE001 - recorded per cell
                    cells[(m, v)] = None
                    errors[(m, v)] = f"{type(exc).__name__}: {exc}"
    elif task_kind == "classify":
        details = classify_details(model, records, GRID_VARIANTS, mode, separator, swap_xy, jobs)
        for m in GRID_METRICS:
            for v in GRID_VARIANTS:
                cells[(m, v)] = sum(d[v][m].correct for d in details) / len(details)
    elif task_kind == "rerank":
        for v in GRID_VARIANTS:
            for m in GRID_METRICS:
                try:
                    cells[(m, v)] = eval_rerank(model, records, m, v, k, mode, separator, jobs)
                except Exception as exc:  # noqa: BLE001
                    cells[(m, v)] = None
                    errors[(m, v)] = f"{type(exc).__name__}: {exc}"
    else:
        raise ValueError(f"unknown task kind: {task_kind}")
    return MetricGrid(task_kind=task_kind, record_count=len(records), cells=cells, errors=errors)


# ---------------------------------------------------------------------------
# Prediction distance ratio analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RpredBucket:
    mean_ratio: float
    accuracy: float
    count: int


def rpred_buckets(
    ratios: Sequence[float], correct: Sequence[bool], groups: int = 10
) -> list[RpredBucket]:
    """Sort by ratio ascending and split into near-equal buckets.

    Bucket sizes differ by at most one (earlier buckets take the remainder);
    concatenating the buckets recovers every record exactly once.
    """
    n = len(ratios)
    if len(correct) != n:
        raise ValueError("ratios and correctness flags must align")
    if n < groups:
        raise GroupingError(f"{n} records cannot fill {groups} groups")
    order = sorted(range(n), key=lambda i: (ratios[i], i))
    base, extra = divmod(n, groups)
    buckets: list[RpredBucket] = []
    start = 0
    for g in range(groups):
        size = base + (1 if g < extra else 0)
        idx = order[start : start + size]
        start += size
        buckets.append(
            RpredBucket(
                mean_ratio=sum(ratios[i] for i in idx) / size,
                accuracy=sum(1 for i in idx if correct[i]) / size,
                count=size,
            )
        )
    return buckets


def rpred_analysis(
    model: EntropyModel,
    records: Sequence[ClassifyRecord],
    metric: Metric = Metric.MEAN,
    variant: Variant = Variant.LOGPROB,
    groups: int = 10,
    mode: JointMode = JointMode.CONDITIONAL,
    separator: str = DEFAULT_SEPARATOR,
    swap_xy: bool = False,
    jobs: int | None = None,
) -> list[RpredBucket]:
    """Bucketed accuracy against the prediction distance ratio.

    Per record the ratio is the predicted class's distance over the mean
    distance across all classes; low values mean the winner clearly beat the
    field, and those buckets should be the accurate ones.
    """
    if not records:
        raise GroupingError("no records")
    n_classes = len(records[0].exemplars)
    if n_classes < 2:
        raise ValueError("need at least two classes")
    details = classify_details(model, records, (variant,), mode, separator, swap_xy, jobs)
    ratios: list[float] = []
    correct: list[bool] = []
    for d in details:
        outcome = d[variant][metric]
        mean_dist = sum(outcome.distances.values()) / len(outcome.distances)
        ratios.append(outcome.distances[outcome.prediction] / mean_dist)
        correct.append(outcome.correct)
    return rpred_buckets(ratios, correct, groups)


# ---------------------------------------------------------------------------
# Dataset ingestion (JSONL / TSV)
# ---------------------------------------------------------------------------


def _iter_jsonl(path: str):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def load_sts_jsonl(path: str) -> list[StsRecord]:
    """One pair per line: {"a": str, "b": str, "score": float}."""
    return [StsRecord(obj["a"], obj["b"], float(obj["score"])) for obj in _iter_jsonl(path)]


def load_classify_jsonl(records_path: str, exemplars_path: str) -> list[ClassifyRecord]:
    """Records {"text", "label"}; exemplars file {"class", "text"} per line."""
    exemplars: dict[int, list[str]] = {}
    for obj in _iter_jsonl(exemplars_path):
        exemplars.setdefault(int(obj["class"]), []).append(obj["text"])
    frozen = {c: tuple(v) if len(v) > 1 else v[0] for c, v in exemplars.items()}
    return [
        ClassifyRecord(obj["text"], int(obj["label"]), frozen) for obj in _iter_jsonl(records_path)
    ]


def load_rerank(queries_path: str, candidates_path: str, qrels_path: str) -> list[RerankRecord]:
    """Queries/candidates as JSONL keyed by qid; qrels as TSV qid\\tdocid\\trel."""
    queries = {obj["qid"]: obj["text"] for obj in _iter_jsonl(queries_path)}
    cands: dict[str, list[tuple[str, str]]] = {q: [] for q in queries}
    for obj in _iter_jsonl(candidates_path):
        if obj["qid"] in cands:
            cands[obj["qid"]].append((obj["docid"], obj["text"]))
    qrels: dict[str, dict[str, int]] = {q: {} for q in queries}
    with open(qrels_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            qid, docid, rel = line.split("\t")
            if qid in qrels:
                qrels[qid][docid] = int(rel)
    return [
        RerankRecord(query=queries[q], candidates=tuple(cands[q]), qrels=qrels[q])
        for q in queries
    ]
