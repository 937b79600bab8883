"""Ranking metrics and aggregation of benchmark results.

AUC is the Mann-Whitney statistic with ties counted as one half. Pair counts
are kept as exact integers (doubled, so that half-pairs stay integral) and the
division happens last, which makes comparisons against brute-force
enumeration exact.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exceptions import DataError


def mann_whitney_counts(scores, labels, positive_class=1) -> tuple[int, int]:
    """Return ``(2 * U, n_pos * n_neg)`` for the positive class.

    ``U`` counts positive/negative pairs where the positive scores higher,
    with ties contributing 1/2. It is computed from the rank sum of the
    positives using mid-ranks for ties, in doubled integer form.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise DataError("scores and labels must be 1-d arrays of equal length")
    if np.isnan(scores).any():
        raise DataError("scores contain missing values")
    pos = labels == positive_class
    n_pos = int(pos.sum())
    n_neg = int(pos.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUC needs both classes present")

    order = np.argsort(scores, kind="mergesort")
    s_sorted = scores[order]
    pos_sorted = pos[order]
    # tie groups: [starts[g], starts[g+1])
    boundaries = np.flatnonzero(np.diff(s_sorted)) + 1
    starts = np.concatenate(([0], boundaries))
    sizes = np.diff(np.concatenate((starts, [s_sorted.size])))
    pos_per_group = np.add.reduceat(pos_sorted.astype(np.int64), starts)
    # doubled 1-based mid-rank of group: 2*start + size + 1
    doubled_rank = 2 * starts.astype(np.int64) + sizes + 1
    twice_rank_sum = int(np.dot(doubled_rank, pos_per_group))
    twice_u = twice_rank_sum - n_pos * (n_pos + 1)
    return twice_u, n_pos * n_neg


def auc(scores, labels, positive_class=1) -> float:
    """Area under the ROC curve; higher scores should indicate ``positive_class``.

    >>> auc([0.9, 0.8, 0.1, 0.2], [1, 1, 2, 2])
    1.0
    """
    twice_u, pairs = mann_whitney_counts(scores, labels, positive_class)
    return twice_u / (2 * pairs)


def auc_fraction(scores, labels, positive_class=1) -> Fraction:
    twice_u, pairs = mann_whitney_counts(scores, labels, positive_class)
    return Fraction(twice_u, 2 * pairs)


@dataclass(frozen=True)
class SplitResult:
    split: int
    value: float
    n_features: int


@dataclass
class EvalReport:
    """Per-split metric values with their aggregate."""

    metric_name: str
    per_split: list[SplitResult] = field(default_factory=list)
    mean: float = math.nan
    sd: float = math.nan
    mean_features: float = math.nan
    dataset: str = ""
    dimensions: str = ""
    notes: dict = field(default_factory=dict)

    def per_split_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["split", self.metric_name, "n_features"])
        for r in self.per_split:
            writer.writerow([r.split, repr(float(r.value)), r.n_features])
        return buf.getvalue()

    def summary_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dataset", "dimensions", "n_splits", f"mean_{self.metric_name}",
                         f"sd_{self.metric_name}", "mean_features"])
        writer.writerow([self.dataset, self.dimensions, len(self.per_split), repr(self.mean),
                         repr(self.sd), repr(self.mean_features)])
        return buf.getvalue()

    def table(self) -> str:
        """Aligned text rendering, one row in the layout of the benchmark tables."""
        head = ["Data", "Dimensions", f"mean {self.metric_name.upper()} (features)", "sd", "splits"]
        row = [self.dataset or "-", self.dimensions or "-",
               f"{self.mean:.2f} ({self.mean_features:.1f})", f"{self.sd:.3f}",
               str(len(self.per_split))]
        widths = [max(len(h), len(c)) for h, c in zip(head, row)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths)),
                 "  ".join("-" * w for w in widths),
                 "  ".join(c.ljust(w) for c, w in zip(row, widths))]
        for key, val in self.notes.items():
            lines.append(f"{key}: {val}")
        return "\n".join(lines) + "\n"


def aggregate(values: Sequence[float], features_used: Sequence[int],
              metric_name: str = "auc", **meta) -> EvalReport:
    """Mean, sample standard deviation and mean feature count across splits.

    The standard deviation of a single value is reported as 0.
    """
    values = [float(v) for v in values]
    features_used = list(features_used)
    if not values:
        raise DataError("aggregate needs at least one split")
    if len(values) != len(features_used):
        raise DataError("values and features_used differ in length")
    arr = np.asarray(values)
    if np.all(arr == arr[0]):
        mean, sd = values[0], 0.0
    else:
        mean = math.fsum(values) / len(values)
        sd = float(np.sqrt(np.sum((arr - mean) ** 2) / (arr.size - 1)))
    per_split = [SplitResult(i, v, int(k)) for i, (v, k) in enumerate(zip(values, features_used))]
    return EvalReport(metric_name=metric_name, per_split=per_split, mean=mean, sd=sd,
                      mean_features=float(np.mean(features_used)), **meta)
