"""Confusion matrices and precision/recall/F1 reports."""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import InputError


def confusion(y_true, y_pred, n_classes) -> np.ndarray:
    """``cm[i, j]`` counts rows with true code ``i`` predicted as ``j``."""
    y_true = np.asarray(y_true, dtype=np.int64).reshape(-1)
    y_pred = np.asarray(y_pred, dtype=np.int64).reshape(-1)
    if y_true.shape != y_pred.shape:
        raise InputError(f"length mismatch: {y_true.size} true vs {y_pred.size} predicted")
    for name, arr in (("true", y_true), ("predicted", y_pred)):
        if arr.size and (arr.min() < 0 or arr.max() >= n_classes):
            raise InputError(f"{name} label code outside [0, {n_classes})")
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (y_true, y_pred), 1)
    return cm


def _ratio(num, den):
    return num / den if den else 0.0


@dataclass(frozen=True)
class MetricsReport:
    labels: List[str]
    accuracy: float
    precision: Dict[str, float]
    recall: Dict[str, float]
    f1: Dict[str, float]
    support: Dict[str, int]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    confusion: List[List[int]]

    def to_kv(self) -> str:
        lines = [f"accuracy={self.accuracy!r}"]
        for name in self.labels:
            lines.append(f"precision.{name}={self.precision[name]!r}")
            lines.append(f"recall.{name}={self.recall[name]!r}")
            lines.append(f"f1.{name}={self.f1[name]!r}")
            lines.append(f"support.{name}={self.support[name]}")
        lines.append(f"macro_precision={self.macro_precision!r}")
        lines.append(f"macro_recall={self.macro_recall!r}")
        lines.append(f"macro_f1={self.macro_f1!r}")
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        width = max([len("macro avg")] + [len(n) for n in self.labels])
        out = [f"{'':<{width}}  precision  recall  f1-score  support"]
        for name in self.labels:
            out.append(
                f"{name:<{width}}  {self.precision[name]:9.4f}  {self.recall[name]:6.4f}"
                f"  {self.f1[name]:8.4f}  {self.support[name]:7d}"
            )
        total = sum(self.support.values())
        out.append(
            f"{'macro avg':<{width}}  {self.macro_precision:9.4f}  {self.macro_recall:6.4f}"
            f"  {self.macro_f1:8.4f}  {total:7d}"
        )
        out.append(f"accuracy: {self.accuracy:.4f}")
        out.append("confusion (rows=true, cols=predicted):")
        cw = max(8, max(len(n) for n in self.labels))
        out.append(" " * (width + 2) + " ".join(f"{n:>{cw}}" for n in self.labels))
        for name, row in zip(self.labels, self.confusion):
            out.append(f"{name:<{width}}  " + " ".join(f"{v:>{cw}d}" for v in row))
        return "\n".join(out) + "\n"

    def format(self, fmt="table") -> str:
        if fmt == "kv":
            return self.to_kv()
        if fmt == "table":
            return self.to_table()
        raise ValueError(f"unknown report format {fmt!r}")


def metrics(cm, labels: Optional[Sequence[str]] = None) -> MetricsReport:
    """Accuracy plus per-class and macro-averaged precision, recall and F1.

    A ratio with a zero denominator is reported as 0.
    """
    cm = np.asarray(cm, dtype=np.int64)
    k = cm.shape[0]
    if cm.ndim != 2 or cm.shape[1] != k:
        raise InputError("confusion matrix must be square")
    total = int(cm.sum())
    if total == 0:
        raise InputError("cannot compute metrics on an empty confusion matrix")
    if labels is None:
        from .dataset import LABEL_MAP

        labels = [LABEL_MAP[i] for i in range(k)] if k == len(LABEL_MAP) else [str(i) for i in range(k)]
    labels = list(labels)
    if len(labels) != k:
        raise InputError(f"{len(labels)} label names for {k} classes")
    precision, recall, f1, support = {}, {}, {}, {}
    for c, name in enumerate(labels):
        tp = int(cm[c, c])
        p = _ratio(tp, int(cm[:, c].sum()))
        r = _ratio(tp, int(cm[c, :].sum()))
        precision[name] = p
        recall[name] = r
        f1[name] = _ratio(2 * p * r, p + r)
        support[name] = int(cm[c, :].sum())
    return MetricsReport(
        labels=labels,
        accuracy=int(np.trace(cm)) / total,
        precision=precision,
        recall=recall,
        f1=f1,
        support=support,
        macro_precision=sum(precision.values()) / k,
        macro_recall=sum(recall.values()) / k,
        macro_f1=sum(f1.values()) / k,
        confusion=cm.tolist(),
    )


def evaluate(y_true, y_pred, n_classes, labels=None) -> MetricsReport:
    return metrics(confusion(y_true, y_pred, n_classes), labels)
