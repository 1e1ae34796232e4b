"""Binary classification report: per-class precision/recall/F1, accuracy, averages."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassificationReport:
    """Confusion-matrix-derived metrics, exact until rendered."""

    per_class: dict[int, ClassMetrics]
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    total: int

    def to_dict(self) -> dict:
        return {
            "classes": {
                str(c): {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for c, m in sorted(self.per_class.items())
            },
            "accuracy": self.accuracy,
            "macro_avg": {
                "precision": self.macro_precision,
                "recall": self.macro_recall,
                "f1": self.macro_f1,
            },
            "weighted_avg": {
                "precision": self.weighted_precision,
                "recall": self.weighted_recall,
                "f1": self.weighted_f1,
            },
            "total": self.total,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        """Render in the conventional report layout, rounded to 2 decimals."""
        lines = [f"{'':>12} {'precision':>9} {'recall':>9} {'f1-score':>9} {'support':>9}", ""]
        for c, m in sorted(self.per_class.items()):
            lines.append(
                f"{c:>12} {m.precision:>9.2f} {m.recall:>9.2f} {m.f1:>9.2f} {m.support:>9}"
            )
        lines.append("")
        lines.append(f"{'accuracy':>12} {'':>9} {'':>9} {self.accuracy:>9.2f} {self.total:>9}")
        lines.append(
            f"{'macro avg':>12} {self.macro_precision:>9.2f} {self.macro_recall:>9.2f} "
            f"{self.macro_f1:>9.2f} {self.total:>9}"
        )
        lines.append(
            f"{'weighted avg':>12} {self.weighted_precision:>9.2f} {self.weighted_recall:>9.2f} "
            f"{self.weighted_f1:>9.2f} {self.total:>9}"
        )
        return "\n".join(lines)


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def classification_report(y_true, y_pred) -> ClassificationReport:
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError("y_true and y_pred must be 1-D arrays of equal length")
    if y_true.size == 0:
        raise ValueError("cannot build a report from an empty label set")
    classes = sorted(set(y_true.tolist()) | set(y_pred.tolist()))
    per_class: dict[int, ClassMetrics] = {}
    for c in classes:
        tp = int(np.sum((y_pred == c) & (y_true == c)))
        fp = int(np.sum((y_pred == c) & (y_true != c)))
        fn = int(np.sum((y_pred != c) & (y_true == c)))
        precision, recall, f1 = _prf(tp, fp, fn)
        per_class[c] = ClassMetrics(precision, recall, f1, int(np.sum(y_true == c)))
    total = int(y_true.size)
    supports = np.array([per_class[c].support for c in classes], dtype=float)
    weights = supports / total
    return ClassificationReport(
        per_class=per_class,
        accuracy=float(np.mean(y_true == y_pred)),
        macro_precision=float(np.mean([per_class[c].precision for c in classes])),
        macro_recall=float(np.mean([per_class[c].recall for c in classes])),
        macro_f1=float(np.mean([per_class[c].f1 for c in classes])),
        weighted_precision=float(np.sum(weights * [per_class[c].precision for c in classes])),
        weighted_recall=float(np.sum(weights * [per_class[c].recall for c in classes])),
        weighted_f1=float(np.sum(weights * [per_class[c].f1 for c in classes])),
        total=total,
    )
