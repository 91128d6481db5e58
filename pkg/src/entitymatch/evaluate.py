"""Evaluation of matcher backends against ground-truth labels.

Accepted is the positive class. Ground-truth Doubtful cases are excluded from
the confusion matrix (they have no binary truth) but counted; predicted
Doubtful counts against the predictor — as a missed positive (fn) when the
truth was Accepted, as a refusal on a true negative (tn) when it was Rejected.
"""

from __future__ import annotations

import copy
import csv
import io
import random
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Any, Mapping, Optional, Sequence

from .models import MatchCase, ResolutionLabel

__all__ = [
    "ConfusionMatrix",
    "ConfusionTally",
    "EvaluationError",
    "MetricsRow",
    "ReportFormat",
    "class_distribution",
    "compute_metrics",
    "confusion_from_cases",
    "emit_report",
    "one_point_auc",
    "random_oversample",
    "roc_sweep",
]

_TWO_PLACES = Decimal("0.01")

REPORT_COLUMNS = ("Method", "Accuracy", "Precision", "Recall", "F1 Score", "ROC AUC", "FPR")


class EvaluationError(ValueError):
    """Raised for empty inputs or predictions that do not match the cases."""


@dataclass(frozen=True)
class ConfusionMatrix:
    """Binary confusion counts with Accepted as the positive class."""

    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "tn", "fn"):
            if getattr(self, name) < 0:
                raise EvaluationError(f"{name} must be >= 0")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class ConfusionTally:
    """A confusion matrix plus the counts that fall outside it."""

    matrix: ConfusionMatrix
    doubtful_predictions: int
    excluded_doubtful_truth: int


def confusion_from_cases(
    cases: Sequence[MatchCase],
    predictions: Mapping[str, ResolutionLabel],
) -> ConfusionTally:
    """Tally predictions against case ground truth.

    Args:
        cases: cases, each carrying a ground-truth label.
        predictions: case_id to predicted label; must cover exactly the cases.

    Returns:
        The tally; ``doubtful_predictions`` counts predicted-Doubtful among
        matrix-eligible cases, ``excluded_doubtful_truth`` counts cases whose
        ground truth itself is Doubtful.

    Raises:
        EvaluationError: empty case list, a case without ground truth, a
            prediction for an unknown case_id, or a case with no prediction.
    """
    if not cases:
        raise EvaluationError("cannot tally an empty case list")
    by_id = {case.case_id: case for case in cases}
    unknown = sorted(set(predictions) - set(by_id))
    if unknown:
        raise EvaluationError(f"predictions reference unknown case ids: {unknown}")
    missing = [case.case_id for case in cases if case.case_id not in predictions]
    if missing:
        raise EvaluationError(f"cases without a prediction: {missing}")

    tp = fp = tn = fn = 0
    doubtful_predictions = 0
    excluded = 0
    for case in cases:
        truth = case.ground_truth
        if truth is None:
            raise EvaluationError(f"case {case.case_id} has no ground truth")
        if truth is ResolutionLabel.DOUBTFUL:
            excluded += 1
            continue
        predicted = predictions[case.case_id]
        if predicted is ResolutionLabel.DOUBTFUL:
            doubtful_predictions += 1
            if truth is ResolutionLabel.ACCEPTED:
                fn += 1
            else:
                tn += 1
        elif predicted is ResolutionLabel.ACCEPTED:
            if truth is ResolutionLabel.ACCEPTED:
                tp += 1
            else:
                fp += 1
        else:  # predicted Rejected
            if truth is ResolutionLabel.ACCEPTED:
                fn += 1
            else:
                tn += 1
    return ConfusionTally(ConfusionMatrix(tp, fp, tn, fn), doubtful_predictions, excluded)


def _pct(numerator: int, denominator: int) -> float:
    """Exact percentage rounded half-up to two decimals."""
    value = (Decimal(numerator) * 100 / Decimal(denominator)).quantize(
        _TWO_PLACES, rounding=ROUND_HALF_UP
    )
    return float(value)


@dataclass(frozen=True)
class MetricsRow:
    """One backend's metrics, as percentages rounded to two decimals.

    ``degenerate`` names the metrics whose denominator was zero; their value
    is reported as 0.0 rather than raising.
    """

    method_name: str
    accuracy: float
    precision: float
    recall: float
    f1: float
    roc_auc: float
    fpr: float
    degenerate: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "method_name": self.method_name,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "roc_auc": self.roc_auc,
            "fpr": self.fpr,
            "degenerate": list(self.degenerate),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "MetricsRow":
        return cls(
            method_name=data["method_name"],
            accuracy=float(data["accuracy"]),
            precision=float(data["precision"]),
            recall=float(data["recall"]),
            f1=float(data["f1"]),
            roc_auc=float(data["roc_auc"]),
            fpr=float(data["fpr"]),
            degenerate=tuple(data.get("degenerate") or ()),
        )


def one_point_auc(matrix: ConfusionMatrix) -> float:
    """Area under the one-point ROC curve, as a percentage.

    A hard classifier gives a single ROC point; the curve through (0,0), that
    point, and (1,1) has area ``(TPR + TNR) / 2``.

    Raises:
        EvaluationError: when there are no positives (tp+fn=0) or no
            negatives (fp+tn=0) — neither rate exists.
    """
    positives = matrix.tp + matrix.fn
    negatives = matrix.fp + matrix.tn
    if positives == 0 or negatives == 0:
        raise EvaluationError(
            "one-point AUC needs at least one positive and one negative case"
        )
    tpr = Decimal(matrix.tp) / Decimal(positives)
    tnr = Decimal(matrix.tn) / Decimal(negatives)
    value = ((tpr + tnr) / 2 * 100).quantize(_TWO_PLACES, rounding=ROUND_HALF_UP)
    return float(value)


def compute_metrics(matrix: ConfusionMatrix, method_name: str = "") -> MetricsRow:
    """Compute the six headline metrics for one confusion matrix.

    Accuracy, precision, recall, F1, one-point ROC AUC, and false-positive
    rate, all as percentages rounded half-up to two decimals. A metric whose
    denominator is zero is flagged in ``degenerate`` and reported as 0.0.

    Raises:
        EvaluationError: when the matrix is empty (total = 0).
    """
    if matrix.total == 0:
        raise EvaluationError("cannot compute metrics for an empty confusion matrix")
    degenerate: list[str] = []

    accuracy = _pct(matrix.tp + matrix.tn, matrix.total)

    if matrix.tp + matrix.fp == 0:
        precision = 0.0
        degenerate.append("precision")
    else:
        precision = _pct(matrix.tp, matrix.tp + matrix.fp)

    if matrix.tp + matrix.fn == 0:
        recall = 0.0
        degenerate.append("recall")
    else:
        recall = _pct(matrix.tp, matrix.tp + matrix.fn)

    # F1 = 2PR/(P+R) simplifies to 2tp / (2tp + fp + fn) on raw counts.
    if 2 * matrix.tp + matrix.fp + matrix.fn == 0:
        f1 = 0.0
        degenerate.append("f1")
    else:
        f1 = _pct(2 * matrix.tp, 2 * matrix.tp + matrix.fp + matrix.fn)

    try:
        roc_auc = one_point_auc(matrix)
    except EvaluationError:
        roc_auc = 0.0
        degenerate.append("roc_auc")

    if matrix.fp + matrix.tn == 0:
        fpr = 0.0
        degenerate.append("fpr")
    else:
        fpr = _pct(matrix.fp, matrix.fp + matrix.tn)

    return MetricsRow(
        method_name=method_name,
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        roc_auc=roc_auc,
        fpr=fpr,
        degenerate=tuple(degenerate),
    )


def roc_sweep(
    scored: Sequence[tuple[float, ResolutionLabel]],
) -> tuple[list[tuple[float, float]], float]:
    """Full ROC curve from scored cases with binary ground truth.

    Thresholds sweep the distinct score values from high to low; each step
    adds one (FPR, TPR) point. Ties share a single point, so the curve is a
    function of the score ordering only.

    Args:
        scored: (score, ground_truth) pairs; labels must be Accepted or
            Rejected, with at least one of each.

    Returns:
        ``(points, auc)``: the curve from (0,0) to (1,1) and its trapezoidal
        area, in [0, 1]. Perfectly separated scores give 1.0, perfectly
        inverted 0.0, and a constant score 0.5.

    Raises:
        EvaluationError: empty input, a non-binary label, or a single-class
            input.
    """
    if not scored:
        raise EvaluationError("roc_sweep requires at least one scored case")
    for score, label in scored:
        if label not in (ResolutionLabel.ACCEPTED, ResolutionLabel.REJECTED):
            raise EvaluationError(f"roc_sweep labels must be Accepted/Rejected, got {label}")
        if not (0.0 <= score <= 1.0):
            raise EvaluationError(f"score {score} outside [0, 1]")
    positives = sum(1 for _, label in scored if label is ResolutionLabel.ACCEPTED)
    negatives = len(scored) - positives
    if positives == 0 or negatives == 0:
        raise EvaluationError("roc_sweep needs at least one positive and one negative case")

    ordered = sorted(scored, key=lambda pair: pair[0], reverse=True)
    points: list[tuple[float, float]] = [(0.0, 0.0)]
    tp = fp = 0
    index = 0
    while index < len(ordered):
        threshold = ordered[index][0]
        while index < len(ordered) and ordered[index][0] == threshold:
            if ordered[index][1] is ResolutionLabel.ACCEPTED:
                tp += 1
            else:
                fp += 1
            index += 1
        points.append((fp / negatives, tp / positives))

    auc = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        auc += (x1 - x0) * (y0 + y1) / 2
    return points, auc


def class_distribution(cases: Sequence[MatchCase]) -> dict[str, int]:
    """Count cases per ground-truth label; values sum to ``len(cases)``.

    Cases without ground truth land in the ``"Unlabeled"`` bucket.
    """
    counts = {label.value: 0 for label in ResolutionLabel}
    counts["Unlabeled"] = 0
    for case in cases:
        key = case.ground_truth.value if case.ground_truth else "Unlabeled"
        counts[key] += 1
    return counts


def random_oversample(cases: Sequence[MatchCase], seed: int) -> list[MatchCase]:
    """Balance Accepted vs Rejected by duplicating random minority cases.

    Originals are kept, in order; duplicates (deep copies, drawn uniformly
    with replacement) are appended until both classes are equal in size.
    Cases with other ground truth pass through untouched.

    Args:
        cases: labelled cases.
        seed: RNG seed; equal seeds give equal output.

    Returns:
        A new list: the originals followed by the duplicates.

    Raises:
        EvaluationError: when fewer than two of {Accepted, Rejected} are
            present — there is no minority to balance.
    """
    accepted = [c for c in cases if c.ground_truth is ResolutionLabel.ACCEPTED]
    rejected = [c for c in cases if c.ground_truth is ResolutionLabel.REJECTED]
    if not accepted or not rejected:
        raise EvaluationError(
            "oversampling needs both Accepted and Rejected cases present"
        )
    result = list(cases)
    need = abs(len(accepted) - len(rejected))
    if need == 0:
        return result
    minority = accepted if len(accepted) < len(rejected) else rejected
    rng = random.Random(seed)
    result.extend(copy.deepcopy(choice) for choice in rng.choices(minority, k=need))
    return result


class ReportFormat(str, Enum):
    """Output format for the metrics report."""

    DELIMITED = "delimited"
    MARKDOWN = "markdown"


def _format_value(value: float) -> str:
    return f"{value:.2f}"


def emit_report(rows: Sequence[MetricsRow], fmt: ReportFormat) -> str:
    """Render metrics rows as a table, preserving row order.

    Delimited output is CSV with the fixed column header; markdown output is
    a pipe table. All values print with exactly two decimals.
    """
    cells = [
        (
            row.method_name,
            _format_value(row.accuracy),
            _format_value(row.precision),
            _format_value(row.recall),
            _format_value(row.f1),
            _format_value(row.roc_auc),
            _format_value(row.fpr),
        )
        for row in rows
    ]
    if fmt is ReportFormat.DELIMITED:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        writer.writerows(cells)
        return buffer.getvalue()
    lines = [
        "| " + " | ".join(REPORT_COLUMNS) + " |",
        "| " + " | ".join("---" for _ in REPORT_COLUMNS) + " |",
    ]
    lines.extend("| " + " | ".join(row) + " |" for row in cells)
    return "\n".join(lines) + "\n"
