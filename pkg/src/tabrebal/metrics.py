"""Ranking metrics and distribution-diversity measures.

AUC-ROC is the trapezoidal area under the ROC curve, which for tied
scores equals the pairwise win rate with half credit for ties.  AUC-PR
is step-interpolated average precision.  Diversity is Shannon entropy in
bits; numeric columns are discretized into decile bins computed on the
rows being evaluated.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyColumnError,
    EmptySubgroupError,
    NoPositivesError,
    SingleClassLabelsError,
)
from .table import ColumnKind, Predicate, Table


@dataclass(frozen=True)
class Curve:
    """Operating-characteristic curve: one point per distinct threshold."""

    kind: str  # "roc" or "pr"
    xs: np.ndarray
    ys: np.ndarray
    thresholds: np.ndarray

    def write_csv(self, path: str) -> None:
        header = {
            "roc": ("fpr", "tpr", "threshold"),
            "pr": ("recall", "precision", "threshold"),
        }[self.kind]
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for x, y, t in zip(self.xs, self.ys, self.thresholds):
                writer.writerow([repr(float(x)), repr(float(y)), repr(float(t))])


def _group_counts(y_true: np.ndarray, scores: np.ndarray):
    """Cumulative true/false positive counts at each distinct score, descending."""
    y_true = np.asarray(y_true).astype(np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if y_true.shape != scores.shape:
        raise ValueError("labels and scores differ in length")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    t = y_true[order]
    last = np.r_[np.flatnonzero(np.diff(s)), s.size - 1]
    tps = np.cumsum(t)[last].astype(np.float64)
    fps = (last + 1) - tps
    return s[last], tps, fps


def roc_curve(y_true: np.ndarray, scores: np.ndarray) -> Curve:
    y_true = np.asarray(y_true)
    n_pos = int((y_true == 1).sum())
    n_neg = int((y_true == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise SingleClassLabelsError("ROC needs both classes present")
    thr, tps, fps = _group_counts(y_true, scores)
    fpr = np.r_[0.0, fps / n_neg]
    tpr = np.r_[0.0, tps / n_pos]
    thresholds = np.r_[np.inf, thr]
    return Curve("roc", fpr, tpr, thresholds)


def pr_curve(y_true: np.ndarray, scores: np.ndarray) -> Curve:
    y_true = np.asarray(y_true)
    n_pos = int((y_true == 1).sum())
    if n_pos == 0:
        raise NoPositivesError("precision-recall needs at least one positive")
    thr, tps, fps = _group_counts(y_true, scores)
    recall = np.r_[0.0, tps / n_pos]
    precision = np.r_[1.0, tps / (tps + fps)]
    thresholds = np.r_[np.inf, thr]
    return Curve("pr", recall, precision, thresholds)


def auc_roc(y_true: np.ndarray, scores: np.ndarray) -> float:
    c = roc_curve(y_true, scores)
    return float(np.sum(np.diff(c.xs) * (c.ys[1:] + c.ys[:-1]) / 2.0))


def auc_pr(y_true: np.ndarray, scores: np.ndarray) -> float:
    c = pr_curve(y_true, scores)
    return float(np.sum(np.diff(c.xs) * c.ys[1:]))


def shannon_entropy(counts) -> float:
    """Entropy in bits of the distribution given by non-negative counts."""
    arr = np.asarray(list(counts) if not isinstance(counts, np.ndarray) else counts)
    arr = arr.astype(np.float64)
    if arr.size == 0 or arr.sum() <= 0:
        raise EmptyColumnError("entropy needs at least one observation")
    if np.any(arr < 0):
        raise ValueError("counts must be non-negative")
    p = arr / arr.sum()
    p = p[p > 0]
    # abs() keeps a single-category distribution at 0.0 rather than -0.0
    return float(abs((p * np.log2(p)).sum()))


def decile_bin_counts(values: np.ndarray, n_bins: int = 10) -> np.ndarray:
    """Occupancy of quantile bins; duplicate edges are collapsed."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyColumnError("no values to bin")
    qs = np.arange(1, n_bins) / n_bins
    edges = np.unique(np.quantile(values, qs))
    bins = np.searchsorted(edges, values, side="right")
    return np.bincount(bins, minlength=edges.size + 1)


def column_entropy(table: Table, name: str, mask: np.ndarray | None = None) -> float:
    """Shannon entropy of one column, restricted to masked rows if given."""
    kind = table.schema.kind_of(name)
    values = table.column(name)
    if mask is not None:
        values = values[mask]
    if values.size == 0:
        raise EmptyColumnError(f"column {name!r} has no rows to evaluate")
    if kind is ColumnKind.CATEGORICAL:
        counts = np.bincount(values, minlength=len(table.dictionary(name)))
        return shannon_entropy(counts)
    return shannon_entropy(decile_bin_counts(values))


def entropy_report(
    table: Table,
    predicate: Predicate | None = None,
    columns: tuple[str, ...] | None = None,
) -> dict[str, float]:
    """Per-column entropy over the rows matching the predicate."""
    if columns is None:
        columns = table.schema.feature_names
    mask = None
    if predicate is not None:
        mask = predicate.mask(table)
        if not mask.any():
            raise EmptySubgroupError(f"predicate {predicate.text!r} matched no rows")
    return {name: column_entropy(table, name, mask) for name in columns}


def frequency_report(
    table: Table, name: str, predicate: Predicate | None = None
) -> list[tuple[str, float]]:
    """Relative frequencies of one categorical column under a predicate.

    Only observed categories appear, ordered by descending frequency
    (ties by dictionary code); the frequencies sum to 1.
    """
    if table.schema.kind_of(name) is not ColumnKind.CATEGORICAL:
        raise ValueError(f"column {name!r} is not categorical")
    codes = table.column(name)
    if predicate is not None:
        mask = predicate.mask(table)
        if not mask.any():
            raise EmptySubgroupError(f"predicate {predicate.text!r} matched no rows")
        codes = codes[mask]
    d = table.dictionary(name)
    counts = np.bincount(codes, minlength=len(d))
    total = counts.sum()
    order = sorted(range(len(d)), key=lambda c: (-counts[c], c))
    return [(d[c], float(counts[c] / total)) for c in order if counts[c] > 0]
