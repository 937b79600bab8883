"""Repeated random-split benchmarks for ranking and survival data.

Every repeat is seeded from its own child of ``SeedSequence(seed)``, so the
per-split results do not depend on whether repeats run serially or in a
process pool.
"""

from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataset import (
    FeatureMatrix,
    ImputationConfig,
    SplitSpec,
    SurvivalRecords,
    filter_sparse_features,
    knn_impute,
    split_once,
)
from .exceptions import DataError
from .metrics import aggregate, auc
from .ranker import SmoothRankModel, dumps_model, train
from .survival import derive_classes, harrell_cindex, select_threshold

log = logging.getLogger(__name__)

MAX_RESAMPLES = 1000


@dataclass(frozen=True)
class BenchConfig:
    split: SplitSpec = SplitSpec()
    impute: bool = True
    impute_train_only: bool = False
    imputation: ImputationConfig = ImputationConfig()
    missing_filter: float | None = 0.2
    n_jobs: int = 1
    null_model: bool = False


@dataclass(frozen=True)
class _Outcome:
    value: float
    n_features: int
    dropped: int = 0
    resampled: int = 0
    threshold: float = float("nan")


def prepare_features(m: FeatureMatrix, cfg: BenchConfig) -> FeatureMatrix:
    """Sparse-column filter and (full-data) imputation applied before splitting."""
    if cfg.missing_filter is not None:
        m = filter_sparse_features(m, cfg.missing_filter)
    if cfg.impute and not cfg.impute_train_only:
        m = knn_impute(m, cfg.imputation)
    return m


def _fold_features(m: FeatureMatrix, train_idx, test_idx, cfg: BenchConfig):
    if cfg.impute and cfg.impute_train_only:
        idx = np.concatenate([train_idx, test_idx])
        sub = knn_impute(m.take_rows(idx), cfg.imputation, donors=np.arange(train_idx.size))
        return sub.values[:train_idx.size], sub.values[train_idx.size:]
    return m.values[train_idx], m.values[test_idx]


def _run(worker, tasks, n_jobs):
    if n_jobs > 1:
        with ProcessPoolExecutor(n_jobs) as pool:
            return list(pool.map(worker, tasks))
    return [worker(t) for t in tasks]


def _children(cfg: BenchConfig):
    return np.random.SeedSequence(cfg.split.seed).spawn(cfg.split.n_repeats)


# -- classification ----------------------------------------------------------

def _rank_split(task) -> _Outcome:
    m, y, child, cfg = task
    rng = np.random.default_rng(child)
    train_idx, test_idx = split_once(m.n_rows, cfg.split.train_fraction, rng, strata=y)
    Xtr, Xte = _fold_features(m, train_idx, test_idx, cfg)
    ytr, yte = y[train_idx], y[test_idx]
    if cfg.null_model:
        s, k = rng.random(test_idx.size), 0
    else:
        model = train(FeatureMatrix(Xtr, m.col_names), ytr)
        s, k = model.score(Xte), model.n_features_used
    ok = ~np.isnan(s)
    return _Outcome(auc(s[ok], yte[ok], positive_class=1), k, int((~ok).sum()))


def bench_rank(m: FeatureMatrix, y, cfg: BenchConfig = BenchConfig(), dataset: str = ""):
    """Mean test AUC of Smooth Rank over repeated stratified splits."""
    y = np.asarray(y)
    dims = f"{m.n_rows} X {m.n_cols}"
    m = prepare_features(m, cfg)
    tasks = [(m, y, c, cfg) for c in _children(cfg)]
    outcomes = _run(_rank_split, tasks, cfg.n_jobs)
    report = aggregate([o.value for o in outcomes], [o.n_features for o in outcomes], "auc",
                       dataset=dataset, dimensions=dims)
    report.notes["features_after_filter"] = m.n_cols
    report.notes["test_rows_without_score"] = sum(o.dropped for o in outcomes)
    return report


# -- survival ----------------------------------------------------------------

def fit_survival_model(X, records: SurvivalRecords, col_names=None):
    """Threshold, derived classes and Smooth Rank model for one training set.

    Returns ``(model, threshold_result)``.
    """
    thr = select_threshold(records)
    classes = derive_classes(records, thr.threshold)
    keep = classes != 0
    X = np.asarray(X, dtype=float)
    names = col_names or tuple(f"x{j}" for j in range(X.shape[1]))
    model = train(FeatureMatrix(X[keep], names), classes[keep],
                  metadata={"threshold": thr.threshold})
    return model, thr


def _surv_split(task) -> _Outcome:
    m, rec, child, cfg = task
    rng = np.random.default_rng(child)
    resampled = 0
    while True:
        train_idx, test_idx = split_once(m.n_rows, cfg.split.train_fraction, rng,
                                         strata=rec.event)
        if np.any(rec.event[train_idx] == 1):
            break
        resampled += 1
        if resampled > MAX_RESAMPLES:
            raise DataError("no split with an event in the training fold")
    Xtr, Xte = _fold_features(m, train_idx, test_idx, cfg)
    test_rec = rec.take(test_idx)
    if cfg.null_model:
        s, k, T = rng.random(test_idx.size), 0, float("nan")
    else:
        model, thr = fit_survival_model(Xtr, rec.take(train_idx), m.col_names)
        s, k, T = model.score(Xte), model.n_features_used, thr.threshold
    ok = ~np.isnan(s)
    ci = harrell_cindex(test_rec.take(np.flatnonzero(ok)), s[ok])
    return _Outcome(ci, k, int((~ok).sum()), resampled, T)


def bench_surv(m: FeatureMatrix, records: SurvivalRecords, cfg: BenchConfig = BenchConfig(),
               dataset: str = ""):
    """Mean test concordance index of Smooth Rank over repeated splits."""
    dims = f"{m.n_rows} X {m.n_cols}"
    m = prepare_features(m, cfg)
    tasks = [(m, records, c, cfg) for c in _children(cfg)]
    outcomes = _run(_surv_split, tasks, cfg.n_jobs)
    report = aggregate([o.value for o in outcomes], [o.n_features for o in outcomes], "ci",
                       dataset=dataset, dimensions=dims)
    report.notes["features_after_filter"] = m.n_cols
    report.notes["test_rows_without_score"] = sum(o.dropped for o in outcomes)
    report.notes["resampled_splits"] = sum(o.resampled for o in outcomes)
    return report


def model_digest(model: SmoothRankModel) -> str:
    return hashlib.sha256(dumps_model(model).encode()).hexdigest()
