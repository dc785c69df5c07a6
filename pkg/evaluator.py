"""
Evaluation module for the review sentiment toolkit.
Confusion counts, accuracy, precision/recall/F1 for both classes,
ROC curves and AUC, and the metrics report written after every run.
"""
import csv
import json
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, validator

from domain_types import Sentiment
from errors import DataError, EvaluationError

REPORT_DIGITS = 12


class ConfusionMatrix(BaseModel):
    """Counts with Positive as the positive class."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    class Config:
        extra = "forbid"
        allow_mutation = False

    @validator("tp", "fp", "fn", "tn")
    def _non_negative(cls, value):
        if value < 0:
            raise ValueError("confusion counts must not be negative")
        return value

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def flipped(self) -> "ConfusionMatrix":
        """The same counts with Negative as the positive class."""
        return ConfusionMatrix(tp=self.tn, fp=self.fn, fn=self.fp, tn=self.tp)

    def scaled(self, factor: int) -> "ConfusionMatrix":
        return ConfusionMatrix(tp=self.tp * factor, fp=self.fp * factor, fn=self.fn * factor, tn=self.tn * factor)


def confusion(predictions: Sequence[Sentiment], truths: Sequence[Sentiment]) -> ConfusionMatrix:
    """
    Count predictions against truths.

    Args:
        predictions: Predicted sentiment per example.
        truths: True sentiment per example, aligned with predictions.

    Returns:
        ConfusionMatrix.
    """
    if len(predictions) != len(truths):
        raise EvaluationError(f"{len(predictions)} predictions but {len(truths)} truths")
    counts = {"tp": 0, "fp": 0, "fn": 0, "tn": 0}
    for predicted, truth in zip(predictions, truths):
        predicted_positive = Sentiment(predicted) is Sentiment.POSITIVE
        truly_positive = Sentiment(truth) is Sentiment.POSITIVE
        if predicted_positive:
            counts["tp" if truly_positive else "fp"] += 1
        else:
            counts["fn" if truly_positive else "tn"] += 1
    return ConfusionMatrix(**counts)


def accuracy(cm: ConfusionMatrix) -> float:
    """(TP + TN) / (TP + FP + FN + TN)."""
    if cm.total == 0:
        raise EvaluationError("accuracy of an empty confusion matrix is undefined")
    return (cm.tp + cm.tn) / cm.total


def f1_from_precision_recall(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def precision_recall_f1(cm: ConfusionMatrix) -> Tuple[float, float, float]:
    """
    Positive-class precision, recall and F1.

    Zero denominators give zero rather than an error.
    """
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    return precision, recall, f1_from_precision_recall(precision, recall)


def specificity(cm: ConfusionMatrix) -> float:
    return cm.tn / (cm.tn + cm.fp) if cm.tn + cm.fp else 0.0


@dataclass(frozen=True)
class RocCurve:
    """
    (fpr, tpr) points from the threshold sweep, (0, 0) first and (1, 1) last.

    The cumulative counts behind each point are kept so the area can be
    computed exactly.
    """

    points: List[Tuple[float, float]]
    fp_counts: Tuple[int, ...] = ()
    tp_counts: Tuple[int, ...] = ()
    n_negative: int = 0
    n_positive: int = 0


def roc_curve(scores: Sequence[float], truths: Sequence[Sentiment]) -> RocCurve:
    """
    Sweep thresholds over the distinct scores, highest first.

    Tied scores are taken as one group, so a tie between classes gives a
    diagonal segment.

    Args:
        scores: Decision values; higher means more Positive.
        truths: True sentiment per score.

    Returns:
        RocCurve.
    """
    if len(scores) != len(truths):
        raise EvaluationError(f"{len(scores)} scores but {len(truths)} truths")
    values = np.asarray(scores, dtype=float)
    if not np.all(np.isfinite(values)):
        raise EvaluationError("scores must be finite")
    positive = np.array([Sentiment(t) is Sentiment.POSITIVE for t in truths], dtype=bool)
    n_positive = int(positive.sum())
    n_negative = len(positive) - n_positive
    if n_positive == 0 or n_negative == 0:
        raise EvaluationError("ROC needs at least one example of each class")

    order = np.argsort(-values, kind="stable")
    sorted_scores = values[order]
    sorted_positive = positive[order]

    fp_counts, tp_counts = [0], [0]
    tp = fp = 0
    for index in range(len(order)):
        if sorted_positive[index]:
            tp += 1
        else:
            fp += 1
        last_of_group = index == len(order) - 1 or sorted_scores[index + 1] != sorted_scores[index]
        if last_of_group:
            fp_counts.append(fp)
            tp_counts.append(tp)

    points = [(f / n_negative, t / n_positive) for f, t in zip(fp_counts, tp_counts)]
    return RocCurve(points, tuple(fp_counts), tuple(tp_counts), n_negative, n_positive)


def auc(curve: RocCurve) -> float:
    """
    Trapezoidal area under an ROC curve.

    With the sweep counts available the area is summed in counts, which
    equals the tie-corrected pairwise ranking statistic.
    """
    if curve.fp_counts and curve.n_negative and curve.n_positive:
        doubled = 0
        for k in range(1, len(curve.fp_counts)):
            doubled += (curve.fp_counts[k] - curve.fp_counts[k - 1]) * (curve.tp_counts[k] + curve.tp_counts[k - 1])
        return doubled / (2 * curve.n_negative * curve.n_positive)

    points = curve.points
    return math.fsum(
        (points[k][0] - points[k - 1][0]) * (points[k][1] + points[k - 1][1]) / 2.0
        for k in range(1, len(points))
    )


class MetricsReport(BaseModel):
    """Scores of one trained model on the held-out test split."""

    accuracy: float
    precision: float
    recall: float
    f1: float
    auc: float
    specificity: float
    minority_precision: float
    minority_recall: float
    minority_f1: float
    confusion: ConfusionMatrix
    model_id: str
    config_fingerprint: str
    balanced: bool = False
    train_size: int = 0
    test_size: int = 0
    synthetic_count: int = 0
    converged: bool = True

    class Config:
        extra = "forbid"

    @validator("accuracy", "precision", "recall", "f1", "auc", "specificity",
               "minority_precision", "minority_recall", "minority_f1")
    def _unit_interval(cls, value):
        if not 0.0 <= value <= 1.0:
            raise ValueError("metrics must lie in [0, 1]")
        return value

    def to_json(self) -> str:
        """Sorted-key JSON with floats rounded to 12 significant digits."""
        return json.dumps(_rounded(self.dict()), sort_keys=True, indent=2) + "\n"


def _rounded(value):
    if isinstance(value, float):
        return float(f"{value:.{REPORT_DIGITS}g}")
    if isinstance(value, dict):
        return {key: _rounded(item) for key, item in value.items()}
    return value


def build_report(predictions: Sequence[Sentiment], truths: Sequence[Sentiment], scores: Sequence[float],
                 model_id: str, config_fingerprint: str, **extra) -> Tuple[MetricsReport, RocCurve]:
    """
    Score one model's test-set output.

    Args:
        predictions: Predicted sentiment per test document.
        truths: True sentiment per test document.
        scores: Decision values per test document.
        model_id: Identifier of the trained model.
        config_fingerprint: Hash of the run configuration.
        **extra: Additional MetricsReport fields (sizes, flags).

    Returns:
        (MetricsReport, RocCurve).
    """
    cm = confusion(predictions, truths)
    precision, recall, f1 = precision_recall_f1(cm)
    minority_precision, minority_recall, minority_f1 = precision_recall_f1(cm.flipped())
    curve = roc_curve(scores, truths)
    report = MetricsReport(
        accuracy=accuracy(cm),
        precision=precision,
        recall=recall,
        f1=f1,
        auc=auc(curve),
        specificity=specificity(cm),
        minority_precision=minority_precision,
        minority_recall=minority_recall,
        minority_f1=minority_f1,
        confusion=cm,
        model_id=model_id,
        config_fingerprint=config_fingerprint,
        **extra,
    )
    logger.info(f"accuracy={report.accuracy:.4f} f1={report.f1:.4f} auc={report.auc:.4f} "
                f"minority_recall={report.minority_recall:.4f}")
    return report, curve


def write_metrics_json(report: MetricsReport, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(report.to_json())
    except OSError as e:
        raise DataError(f"Cannot write metrics {path}: {e}") from e


def write_roc_csv(curve: RocCurve, path: str) -> None:
    """Write the curve as fpr,tpr rows with a header."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["fpr", "tpr"])
            for fpr, tpr in curve.points:
                writer.writerow([repr(float(fpr)), repr(float(tpr))])
    except OSError as e:
        raise DataError(f"Cannot write ROC curve {path}: {e}") from e


def read_metrics_json(path: str) -> Dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, ValueError) as e:
        raise DataError(f"Cannot read metrics {path}: {e}") from e


def metric_table(report: MetricsReport) -> Dict[str, float]:
    """The headline numbers of a report, in display order."""
    return {
        "accuracy": report.accuracy,
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "auc": report.auc,
        "specificity": report.specificity,
        "minority_precision": report.minority_precision,
        "minority_recall": report.minority_recall,
        "minority_f1": report.minority_f1,
    }
