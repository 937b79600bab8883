"""Survival data as a bipartite ranking problem.

A threshold time T splits observations into "early failure" (an event at or
before T, label 1) and "no early failure" (any time after T, label 2).
Censored observations at or before T have an unknown class and are left
out. T is the event time that best balances the two class sizes.
Models are evaluated with Harrell's concordance index.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dataset import SurvivalRecords
from .exceptions import DataError

log = logging.getLogger(__name__)

EARLY_FAILURE = 1
NO_EARLY_FAILURE = 2
EXCLUDED = 0


@dataclass(frozen=True)
class ThresholdResult:
    threshold: float
    n_early: int
    n_late: int
    excluded: np.ndarray

    @property
    def imbalance(self) -> int:
        return abs(self.n_early - self.n_late)

    def report(self) -> str:
        return (f"T={self.threshold!r} L={self.n_early} H={self.n_late} "
                f"excluded={self.excluded.size}")


def _records(records) -> SurvivalRecords:
    if isinstance(records, SurvivalRecords):
        return records
    time, event = records
    return SurvivalRecords(time, event)


def select_threshold(records) -> ThresholdResult:
    """Event time minimizing ``|L_T - H_T|``; ties go to the smallest time.

    ``L_T`` counts events at or before ``T`` and ``H_T`` counts all
    observations after ``T``.
    """
    rec = _records(records)
    t, e = rec.time, rec.event
    if not np.any(e == 1):
        raise DataError("no failures observed")
    candidates = np.unique(t[e == 1])
    event_times = np.sort(t[e == 1])
    all_times = np.sort(t)
    n_early = np.searchsorted(event_times, candidates, side="right")
    n_late = t.size - np.searchsorted(all_times, candidates, side="right")
    h = np.abs(n_early - n_late)
    best = int(np.argmin(h))  # first minimum = smallest T
    T = float(candidates[best])
    excluded = np.flatnonzero((e == 0) & (t <= T))
    return ThresholdResult(T, int(n_early[best]), int(n_late[best]), excluded)


def derive_classes(records, threshold: float) -> np.ndarray:
    """Per-row class: 1 early failure, 2 no early failure, 0 excluded."""
    rec = _records(records)
    t, e = rec.time, rec.event
    out = np.where(t > threshold, NO_EARLY_FAILURE,
                   np.where(e == 1, EARLY_FAILURE, EXCLUDED)).astype(np.int8)
    if not np.any(out == EARLY_FAILURE) or not np.any(out == NO_EARLY_FAILURE):
        raise DataError("degenerate threshold: one of the derived classes is empty")
    return out


def concordance_counts(time, event, scores) -> tuple[int, int]:
    """Return ``(2 * concordant, comparable)`` for Harrell's index.

    A pair is comparable when the earlier time has an observed event
    (equal times never are). It is concordant when the earlier failure has
    the higher score; tied scores count one half.
    """
    time = np.asarray(time, dtype=float)
    event = np.asarray(event)
    scores = np.asarray(scores, dtype=float)
    twice_conc = 0
    comparable = 0
    for i in np.flatnonzero(event == 1):
        later = time > time[i]
        n = int(later.sum())
        if not n:
            continue
        s = scores[later]
        twice_conc += 2 * int(np.sum(scores[i] > s)) + int(np.sum(scores[i] == s))
        comparable += n
    return twice_conc, comparable


def harrell_cindex(records, scores, higher_score_means_earlier_failure: bool = True) -> float:
    """Harrell's concordance index; rows with missing scores are dropped (logged)."""
    rec = _records(records)
    scores = np.asarray(scores, dtype=float)
    if scores.size != len(rec):
        raise DataError("scores and records differ in length")
    if not higher_score_means_earlier_failure:
        scores = -scores
    ok = ~np.isnan(scores)
    if not ok.all():
        log.warning("concordance: dropping %d rows with missing scores", int((~ok).sum()))
    twice_conc, comparable = concordance_counts(rec.time[ok], rec.event[ok], scores[ok])
    if comparable == 0:
        raise DataError("no comparable pairs")
    return twice_conc / (2 * comparable)


def cindex_fraction(records, scores) -> Fraction:
    rec = _records(records)
    twice_conc, comparable = concordance_counts(rec.time, rec.event, scores)
    if comparable == 0:
        raise DataError("no comparable pairs")
    return Fraction(twice_conc, 2 * comparable)
