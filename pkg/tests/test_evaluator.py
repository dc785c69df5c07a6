import csv
import json

import numpy as np
import pytest

from domain_types import Sentiment
from errors import EvaluationError
from evaluator import (
    ConfusionMatrix,
    MetricsReport,
    RocCurve,
    accuracy,
    auc,
    build_report,
    confusion,
    f1_from_precision_recall,
    metric_table,
    precision_recall_f1,
    read_metrics_json,
    roc_curve,
    specificity,
    write_metrics_json,
    write_roc_csv,
)

P, N = Sentiment.POSITIVE, Sentiment.NEGATIVE


def _pairwise_auc(scores, truths):
    positives = [s for s, t in zip(scores, truths) if t is P]
    negatives = [s for s, t in zip(scores, truths) if t is N]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in positives for n in negatives)
    return wins / (len(positives) * len(negatives))


def test_confusion_counts():
    assert confusion([P, P, N], [P, P, N]) == ConfusionMatrix(tp=2, tn=1)
    assert confusion([P], [N]) == ConfusionMatrix(fp=1)
    assert confusion([N], [P]) == ConfusionMatrix(fn=1)


def test_confusion_length_mismatch():
    with pytest.raises(EvaluationError):
        confusion([P, N], [P])


def test_all_positive_strawman():
    cm = confusion([P] * 3000, [P] * 2714 + [N] * 286)
    assert cm == ConfusionMatrix(tp=2714, fp=286)
    assert accuracy(cm) == pytest.approx(2714 / 3000)
    assert accuracy(cm) == pytest.approx(0.9047, abs=1e-4)
    assert precision_recall_f1(cm.flipped()) == (0.0, 0.0, 0.0)
    assert specificity(cm) == 0.0


def test_accuracy_extremes():
    assert accuracy(ConfusionMatrix(tp=3, tn=4)) == 1.0
    assert accuracy(ConfusionMatrix(fp=3, fn=4)) == 0.0
    with pytest.raises(EvaluationError):
        accuracy(ConfusionMatrix())


@pytest.mark.parametrize("precision, recall, reported", [
    (0.971, 0.997, 0.983),
    (0.946, 0.993, 0.968),
    (0.92, 0.994, 0.955),
    (0.901, 0.991, 0.942),
    (0.927, 0.992, 0.957),
])
def test_f1_matches_published_rows(precision, recall, reported):
    assert f1_from_precision_recall(precision, recall) == pytest.approx(reported, abs=0.002)


def test_zero_conventions():
    assert precision_recall_f1(ConfusionMatrix(fn=3, tn=2)) == (0.0, 0.0, 0.0)
    assert f1_from_precision_recall(0.0, 0.0) == 0.0


def test_metrics_are_scale_free():
    cm = ConfusionMatrix(tp=40, fp=7, fn=3, tn=11)
    scaled = cm.scaled(13)
    assert accuracy(scaled) == pytest.approx(accuracy(cm))
    assert precision_recall_f1(scaled) == pytest.approx(precision_recall_f1(cm))
    assert specificity(scaled) == pytest.approx(specificity(cm))


def test_flipped_swaps_the_roles():
    cm = ConfusionMatrix(tp=5, fp=2, fn=1, tn=3)
    assert precision_recall_f1(cm.flipped())[1] == pytest.approx(specificity(cm))
    assert cm.flipped().flipped() == cm


def test_confusion_counts_must_be_non_negative():
    with pytest.raises(ValueError):
        ConfusionMatrix(tp=-1)


def test_perfect_ranking_curve():
    curve = roc_curve([0.9, 0.1], [P, N])
    assert curve.points == [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
    assert auc(curve) == 1.0


def test_all_tied_scores_give_the_diagonal():
    curve = roc_curve([0.3, 0.3, 0.3, 0.3], [P, N, N, P])
    assert curve.points == [(0.0, 0.0), (1.0, 1.0)]
    assert auc(curve) == 0.5


def test_one_inversion():
    curve = roc_curve([0.8, 0.6, 0.4], [P, N, P])
    assert curve.points == [(0.0, 0.0), (0.0, 0.5), (1.0, 0.5), (1.0, 1.0)]
    assert auc(curve) == 0.5


def test_roc_errors():
    with pytest.raises(EvaluationError):
        roc_curve([0.1, 0.2], [P, P])
    with pytest.raises(EvaluationError):
        roc_curve([0.1, float("nan")], [P, N])
    with pytest.raises(EvaluationError):
        roc_curve([0.1], [P, N])


def test_auc_equals_the_pairwise_statistic():
    rng = np.random.default_rng(2024)
    for case in range(200):
        size = int(rng.integers(2, 201))
        if case % 3 == 0:
            scores = rng.integers(0, 4, size).astype(float)
        else:
            scores = rng.normal(size=size)
        truths = [P if v else N for v in rng.random(size) < rng.uniform(0.1, 0.9)]
        truths[0], truths[-1] = P, N

        curve = roc_curve(scores, truths)
        assert curve.points[0] == (0.0, 0.0)
        assert curve.points[-1] == (1.0, 1.0)
        assert auc(curve) == pytest.approx(_pairwise_auc(scores, truths), abs=1e-12)
        assert auc(curve) + auc(roc_curve(-scores, truths)) == pytest.approx(1.0, abs=1e-12)


def test_auc_from_points_only():
    curve = RocCurve([(0.0, 0.0), (0.0, 0.5), (1.0, 0.5), (1.0, 1.0)])
    assert auc(curve) == pytest.approx(0.5)


def _report(**extra):
    scores = [2.0, 1.5, 0.5, -0.2, -1.0, 0.7]
    truths = [P, P, P, N, N, N]
    predictions = [Sentiment.from_sign(s) for s in scores]
    return build_report(predictions, truths, scores, model_id="m1", config_fingerprint="c1", **extra)


def test_build_report():
    report, curve = _report(train_size=10, test_size=6)
    assert report.confusion == ConfusionMatrix(tp=3, fp=1, fn=0, tn=2)
    assert report.accuracy == pytest.approx(5 / 6)
    assert report.precision == pytest.approx(0.75)
    assert report.recall == 1.0
    assert report.minority_precision == 1.0
    assert report.minority_recall == pytest.approx(2 / 3)
    assert report.specificity == pytest.approx(2 / 3)
    assert report.auc == pytest.approx(8 / 9)
    assert report.test_size == 6
    assert curve.n_positive == 3


def test_report_rejects_unknown_fields():
    with pytest.raises(ValueError):
        _report(unknown=1)


def test_metrics_json_format(tmp_path):
    report, _ = _report()
    path = tmp_path / "metrics.json"
    write_metrics_json(report, str(path))

    raw = path.read_bytes()
    assert b"\r\n" not in raw
    assert raw.endswith(b"}\n")
    data = json.loads(raw)
    assert list(data) == sorted(data)
    assert data["accuracy"] == 0.833333333333
    assert data["confusion"] == {"fn": 0, "fp": 1, "tn": 2, "tp": 3}
    assert read_metrics_json(str(path)) == data
    assert MetricsReport(**data).model_id == "m1"


def test_roc_csv_format(tmp_path):
    _, curve = _report()
    path = tmp_path / "roc.csv"
    write_roc_csv(curve, str(path))

    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["fpr", "tpr"]
    assert [(float(a), float(b)) for a, b in rows[1:]] == curve.points
    assert rows[1] == ["0.0", "0.0"]
    assert rows[-1] == ["1.0", "1.0"]


def test_metric_table_order():
    report, _ = _report()
    assert list(metric_table(report)) == [
        "accuracy", "precision", "recall", "f1", "auc", "specificity",
        "minority_precision", "minority_recall", "minority_f1",
    ]
