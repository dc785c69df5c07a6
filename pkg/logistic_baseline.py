"""
Logistic-regression baseline for the review sentiment toolkit.
An unweighted linear classifier fitted by full-batch gradient descent,
used to show the majority-class bias that the SVM pipeline corrects.
"""
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, validator

from domain_types import Sentiment
from errors import DimensionMismatchError, TrainingDataError
from svm_trainer import as_rows


class LogisticSpec(BaseModel):
    """Gradient-descent settings."""

    learning_rate: float = 0.5
    epochs: int = 300
    l2: float = 0.0
    init_scale: float = 0.0
    seed: int = 0

    class Config:
        extra = "forbid"

    @validator("learning_rate")
    def _rate_positive(cls, value):
        if not value > 0 or not math.isfinite(value):
            raise ValueError("learning_rate must be a positive finite number")
        return value

    @validator("epochs")
    def _epochs_non_negative(cls, value):
        if value < 0:
            raise ValueError("epochs must not be negative")
        return value

    @validator("l2", "init_scale")
    def _non_negative(cls, value):
        if value < 0:
            raise ValueError("must not be negative")
        return value


@dataclass(frozen=True)
class LogisticBaseline:
    weights: np.ndarray
    bias: float
    learning_rate: float
    epochs: int
    seed: int

    @property
    def dim(self) -> int:
        return int(self.weights.shape[0])


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def train_logistic_baseline(vectors, labels, spec: Optional[LogisticSpec] = None) -> LogisticBaseline:
    """
    Fit weights and bias by full-batch gradient descent on the mean log-loss.

    Args:
        vectors: (n, d) training points.
        labels: Sentiment per point; both classes required.
        spec: Learning rate, epochs, L2 penalty and initialization.

    Returns:
        The fitted baseline.
    """
    spec = spec or LogisticSpec()
    x = as_rows(vectors)
    if x.ndim != 2 or x.shape[0] == 0:
        raise TrainingDataError("training vectors must form a non-empty 2-D array")
    if len(labels) != x.shape[0]:
        raise DimensionMismatchError(f"{x.shape[0]} vectors but {len(labels)} labels")
    target = np.array([1.0 if Sentiment(label) is Sentiment.POSITIVE else 0.0 for label in labels])
    if target.min() == target.max():
        raise TrainingDataError("training data must contain both Positive and Negative examples")

    rng = np.random.default_rng(spec.seed)
    weights = rng.normal(0.0, spec.init_scale, x.shape[1]) if spec.init_scale > 0 else np.zeros(x.shape[1])
    bias = 0.0
    n = x.shape[0]

    for _ in range(spec.epochs):
        error = _sigmoid(x @ weights + bias) - target
        weights = weights - spec.learning_rate * (x.T @ error / n + spec.l2 * weights)
        bias -= spec.learning_rate * float(error.mean())

    if not (np.all(np.isfinite(weights)) and math.isfinite(bias)):
        raise TrainingDataError("gradient descent diverged; lower the learning rate")

    logger.info(f"Logistic baseline: {spec.epochs} epochs over {n} points, |w|={np.linalg.norm(weights):.4g}")
    return LogisticBaseline(weights, float(bias), spec.learning_rate, spec.epochs, spec.seed)


def logistic_decision_values(model: LogisticBaseline, vectors) -> np.ndarray:
    x = as_rows(vectors)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != model.dim:
        raise DimensionMismatchError(f"model expects {model.dim} features, got {x.shape[1]}")
    return np.asarray(x @ model.weights).ravel() + model.bias


def logistic_predict_all(model: LogisticBaseline, vectors) -> List[Sentiment]:
    return [Sentiment.from_sign(value) for value in logistic_decision_values(model, vectors)]
