"""Lossless compression and information distances from next-token models."""

from .coder import BitStream, QuantizedDistribution, decode, default_total, encode, quantize
from .codelen import (
    ChunkPlan,
    CodeLengthReport,
    JointMode,
    Variant,
    chunked_codelen,
    codelen_logprob,
    codelen_logrank,
    joint_codelen,
)
from .container import compress_text, decompress_text, pack, unpack
from .metrics import (
    DistanceReport,
    LengthQuintuple,
    Metric,
    cdm,
    distance,
    evaluate_metric,
    m_max,
    m_mean,
    m_min,
    pair_lengths,
)
from .models import (
    BYTE_VOCAB,
    AdaptiveContextModel,
    EntropyModel,
    ModelDescriptor,
    ModelSession,
    StaticModel,
    TokenSequence,
    UniformModel,
    Vocabulary,
    predict,
    score_sequence,
)
from .tasks import (
    ClassifyRecord,
    MetricGrid,
    RerankRecord,
    Shot,
    StsRecord,
    classify_details,
    eval_classify,
    eval_rerank,
    eval_sts,
    metric_grid,
    ndcg_at_k,
    rerank_details,
    rpred_analysis,
    rpred_buckets,
    spearman_rho,
    sts_details,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveContextModel",
    "BYTE_VOCAB",
    "BitStream",
    "ChunkPlan",
    "ClassifyRecord",
    "CodeLengthReport",
    "DistanceReport",
    "EntropyModel",
    "JointMode",
    "LengthQuintuple",
    "Metric",
    "MetricGrid",
    "ModelDescriptor",
    "ModelSession",
    "QuantizedDistribution",
    "RerankRecord",
    "Shot",
    "StaticModel",
    "StsRecord",
    "TokenSequence",
    "UniformModel",
    "Variant",
    "Vocabulary",
    "cdm",
    "chunked_codelen",
    "classify_details",
    "codelen_logprob",
    "codelen_logrank",
    "compress_text",
    "decode",
    "decompress_text",
    "default_total",
    "distance",
    "encode",
    "eval_classify",
    "eval_rerank",
    "eval_sts",
    "evaluate_metric",
    "joint_codelen",
    "m_max",
    "m_mean",
    "m_min",
    "metric_grid",
    "ndcg_at_k",
    "pack",
    "pair_lengths",
    "predict",
    "quantize",
    "rerank_details",
    "rpred_analysis",
    "rpred_buckets",
    "score_sequence",
    "spearman_rho",
    "sts_details",
    "unpack",
]
