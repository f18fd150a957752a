"""scikit-learn compatible facade over the distance classifier.

The one corner of this toolkit that is genuinely fit/predict shaped:
learning a class from a handful of exemplars and predicting by smallest
information distance. Requires scikit-learn (install extra `[sklearn]`).
"""

from __future__ import annotations

import numpy as np

try:
    from sklearn.base import BaseEstimator, ClassifierMixin
except ImportError as exc:  # pragma: no cover - environment-dependent
    raise ImportError(
        "infodist.estimators requires scikit-learn; install infodist[sklearn]"
    ) from exc

from .codelen import DEFAULT_SEPARATOR, JointMode, Variant
from .metrics import Metric, evaluate_metric, pair_lengths
from .models import EntropyModel


def _check_texts(X, name: str = "X") -> list[str]:
    texts = list(X)
    if not texts:
        raise ValueError(f"{name} must contain at least one text")
    for i, t in enumerate(texts):
        if not isinstance(t, str) or not t:
            raise ValueError(f"{name}[{i}] must be a nonempty string")
    return texts


class CompressionDistanceClassifier(ClassifierMixin, BaseEstimator):
    """Nearest-class-by-compression-distance text classifier.

    fit() stores one or more exemplar texts per class; predict() assigns
    each input the class whose exemplar compresses it best (argmin distance,
    ties to the smallest class label; multiple exemplars per class reduce by
    min). `model` may be a selector string ("builtin:adaptive:2",
    "builtin:uniform", "remote:<url>") or an EntropyModel instance.
    """

    def __init__(
        self,
        model: str | EntropyModel = "builtin:adaptive:2",
        metric: str = "mean",
        variant: str = "logprob",
        mode: str = "conditional",
        separator: str = DEFAULT_SEPARATOR,
        swap_xy: bool = False,
    ):
        self.model = model
        self.metric = metric
        self.variant = variant
        self.mode = mode
        self.separator = separator
        self.swap_xy = swap_xy

    def _resolve(self) -> EntropyModel:
        if isinstance(self.model, EntropyModel):
            return self.model
        from .cli import resolve_model

        return resolve_model(self.model)

    def fit(self, X, y):
        texts = _check_texts(X)
        labels = list(y)
        if len(labels) != len(texts):
            raise ValueError("X and y must have the same length")
        exemplars: dict = {}
        for text, label in zip(texts, labels):
            exemplars.setdefault(label, []).append(text)
        self.classes_ = np.array(sorted(exemplars))
        self.exemplars_ = {label: tuple(v) for label, v in exemplars.items()}
        self._entropy_model_ = self._resolve()
        return self

    def decision_distances(self, X) -> np.ndarray:
        """Distance of every input to every class, shape (n, n_classes)."""
        if not hasattr(self, "exemplars_"):
            raise ValueError("classifier is not fitted yet; call fit first")
        texts = _check_texts(X)
        model = self._entropy_model_
        metric = Metric(self.metric)
        variant = Variant(self.variant)
        mode = JointMode(self.mode)
        sep = model.tokenize(self.separator) if self.separator else []
        out = np.empty((len(texts), len(self.classes_)))
        for i, text in enumerate(texts):
            y_ids = model.tokenize(text)
            for j, label in enumerate(self.classes_):
                dists = []
                for exemplar in self.exemplars_[label]:
                    x_ids = model.tokenize(exemplar)
                    a, b = (y_ids, x_ids) if self.swap_xy else (x_ids, y_ids)
                    q = pair_lengths(model, a, b, mode, sep, (variant,))[variant]
                    dists.append(evaluate_metric(q, metric))
                out[i, j] = min(dists)
        return out

    def predict(self, X) -> np.ndarray:
        distances = self.decision_distances(X)
        return self.classes_[np.argmin(distances, axis=1)]  # argmin ties -> first (smallest label)
