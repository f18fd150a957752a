"""Normalized information-distance metrics over code-length quintuples.

Given the five lengths C(x), C(y), C(x|y), C(y|x), C(xy):

    m_max  = max{C(x|y), C(y|x)} / max{C(x), C(y)}     (normalized information distance)
    m_min  = min{C(x|y), C(y|x)} / min{C(x), C(y)}     (partial-matching variant)
    m_mean = (C(x|y) + C(y|x)) / (C(x) + C(y))
    cdm    = C(xy) / (C(x) + C(y))

Values are deliberately not clamped to [0, 1]: approximations can exceed 1
and consumers rank by value, so clamping would destroy information.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .codelen import DEFAULT_SEPARATOR, JointMode, Variant, sequence_bits
from .errors import DegenerateInput, EmptyOperand
from .models import EntropyModel


class Metric(str, Enum):
    MAX = "max"
    MIN = "min"
    MEAN = "mean"
    CDM = "cdm"


@dataclass(frozen=True)
class LengthQuintuple:
    """The five code lengths every metric is a ratio of, all in bits."""

    c_x: float
    c_y: float
    c_x_given_y: float
    c_y_given_x: float
    c_xy: float
    variant: Variant
    mode: JointMode

    def __post_init__(self) -> None:
        for name in ("c_x", "c_y", "c_x_given_y", "c_y_given_x", "c_xy"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def swapped(self) -> "LengthQuintuple":
        """The quintuple of (y, x). Note c_xy is direction-dependent in
        conditional mode (chain rule anchors on the first operand)."""
        return LengthQuintuple(
            c_x=self.c_y,
            c_y=self.c_x,
            c_x_given_y=self.c_y_given_x,
            c_y_given_x=self.c_x_given_y,
            c_xy=self.c_y + self.c_x_given_y if self.mode is JointMode.CONDITIONAL else self.c_xy,
            variant=self.variant,
            mode=self.mode,
        )

    def scaled(self, factor: float) -> "LengthQuintuple":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return LengthQuintuple(
            c_x=self.c_x * factor,
            c_y=self.c_y * factor,
            c_x_given_y=self.c_x_given_y * factor,
            c_y_given_x=self.c_y_given_x * factor,
            c_xy=self.c_xy * factor,
            variant=self.variant,
            mode=self.mode,
        )


def m_max(q: LengthQuintuple) -> float:
    if q.c_x <= 0 or q.c_y <= 0:
        raise DegenerateInput("m_max requires positive individual lengths")
    return max(q.c_x_given_y, q.c_y_given_x) / max(q.c_x, q.c_y)


def m_min(q: LengthQuintuple) -> float:
    if q.c_x <= 0 or q.c_y <= 0:
        raise DegenerateInput("m_min requires positive individual lengths")
    return min(q.c_x_given_y, q.c_y_given_x) / min(q.c_x, q.c_y)


def m_mean(q: LengthQuintuple) -> float:
    if q.c_x + q.c_y <= 0:
        raise DegenerateInput("m_mean requires a positive length sum")
    return (q.c_x_given_y + q.c_y_given_x) / (q.c_x + q.c_y)


def cdm(q: LengthQuintuple) -> float:
    if q.c_x + q.c_y <= 0:
        raise DegenerateInput("cdm requires a positive length sum")
    return q.c_xy / (q.c_x + q.c_y)


_METRIC_FN = {Metric.MAX: m_max, Metric.MIN: m_min, Metric.MEAN: m_mean, Metric.CDM: cdm}


def evaluate_metric(q: LengthQuintuple, metric: Metric) -> float:
    return _METRIC_FN[metric](q)


@dataclass(frozen=True)
class DistanceReport:
    """One metric value plus the audited lengths it was derived from."""

    metric: Metric
    value: float
    quintuple: LengthQuintuple

    def to_json_dict(self) -> dict:
        q = self.quintuple
        return {
            "metric": self.metric.value,
            "value": self.value,
            "variant": q.variant.value,
            "mode": q.mode.value,
            "c_x": q.c_x,
            "c_y": q.c_y,
            "c_x_given_y": q.c_x_given_y,
            "c_y_given_x": q.c_y_given_x,
            "c_xy": q.c_xy,
        }


def pair_lengths(
    model: EntropyModel,
    x: Sequence[int],
    y: Sequence[int],
    mode: JointMode = JointMode.CONDITIONAL,
    separator: Sequence[int] = (),
    variants: Sequence[Variant] = (Variant.LOGPROB,),
) -> dict[Variant, LengthQuintuple]:
    """Quintuples for every requested variant, sharing scoring passes.

    Each of the four underlying sequence scorings yields both coding
    variants at once, so asking for the full grid costs no extra model work.
    """
    if len(x) == 0 or len(y) == 0:
        raise EmptyOperand("distances require nonempty x and y")
    vs = tuple(variants)
    sep = list(separator)
    c_x = sequence_bits(model, x, (), vs)
    c_y = sequence_bits(model, y, (), vs)
    out: dict[Variant, LengthQuintuple] = {}
    if mode is JointMode.CONDITIONAL:
        c_x_g_y = sequence_bits(model, x, list(y) + sep, vs)
        c_y_g_x = sequence_bits(model, y, list(x) + sep, vs)
        for v in vs:
            out[v] = LengthQuintuple(
                c_x=c_x[v],
                c_y=c_y[v],
                c_x_given_y=c_x_g_y[v],
                c_y_given_x=c_y_g_x[v],
                c_xy=c_x[v] + c_y_g_x[v],
                variant=v,
                mode=mode,
            )
        return out
    c_xcaty = sequence_bits(model, list(x) + sep + list(y), (), vs)
    c_ycatx = sequence_bits(model, list(y) + sep + list(x), (), vs)
    for v in vs:
        out[v] = LengthQuintuple(
            c_x=c_x[v],
            c_y=c_y[v],
            c_x_given_y=c_ycatx[v] - c_y[v],
            c_y_given_x=c_xcaty[v] - c_x[v],
            c_xy=0.5 * (c_xcaty[v] + c_ycatx[v]),
            variant=v,
            mode=mode,
        )
    return out


def distance(
    model: EntropyModel,
    x_text: str,
    y_text: str,
    metric: Metric = Metric.MEAN,
    variant: Variant = Variant.LOGPROB,
    mode: JointMode = JointMode.CONDITIONAL,
    separator: str = DEFAULT_SEPARATOR,
) -> DistanceReport:
    """Distance between two texts under the selected metric and variant."""
    x = model.tokenize(x_text)
    y = model.tokenize(y_text)
    if not x or not y:
        raise EmptyOperand("both texts must tokenize to nonempty sequences")
    sep = model.tokenize(separator) if separator else []
    q = pair_lengths(model, x, y, mode, sep, (variant,))[variant]
    return DistanceReport(metric=metric, value=evaluate_metric(q, metric), quintuple=q)
