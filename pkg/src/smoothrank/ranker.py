"""The Smooth Rank scoring model.

Training fits one marginal predictor per column, weights each by how far
its training AUC exceeds 1/2, then zeroes every weight that does not
strictly exceed a third of the largest one. A row is scored by the
weighted mean of the predictors that are defined at its values.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .dataset import FeatureMatrix
from .exceptions import DataError, ModelFormatError, ModelVersionError
from .marginal import MASK_THRESHOLD, ClassPriors, MarginalPredictor, evaluate, fit_marginal
from .metrics import auc
from .smoothing import DEFAULT_SPAN, LoessConfig

FORMAT = "smoothrank-model"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class SmoothRankModel:
    predictors: tuple[MarginalPredictor, ...]
    weights: np.ndarray
    priors: ClassPriors
    feature_names: tuple[str, ...]
    label_mapping: dict | None = None
    raw_weights: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.size != len(self.predictors) or len(self.feature_names) != w.size:
            raise DataError("weights, predictors and feature names differ in length")
        if np.any(w < 0) or not np.any(w > 0):
            raise DataError("weights must be non-negative with at least one positive")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n_features_used(self) -> int:
        return int(np.count_nonzero(self.weights))

    def evaluations(self, X) -> np.ndarray:
        """Matrix of marginal predictor values, NaN where missing."""
        X = _as_matrix(X)
        if X.shape[1] != len(self.predictors):
            raise DataError(f"expected {len(self.predictors)} columns, got {X.shape[1]}")
        out = np.full(X.shape, math.nan)
        for j, (p, w) in enumerate(zip(self.predictors, self.weights)):
            if w > 0:
                out[:, j] = evaluate(p, X[:, j])
        return out

    def score(self, X) -> np.ndarray:
        return score(self, X)


def _as_matrix(X) -> np.ndarray:
    if isinstance(X, FeatureMatrix):
        return X.values
    X = np.asarray(X, dtype=float)
    return X[None, :] if X.ndim == 1 else X


def compute_weight(p: MarginalPredictor, col, labels) -> float:
    """``max(AUC - 1/2, 0)`` of the predictor over rows where it is defined."""
    if p.dead:
        return 0.0
    q = evaluate(p, np.asarray(col, dtype=float))
    labels = np.asarray(labels)
    ok = ~np.isnan(q)
    if not ok.any() or len(np.unique(labels[ok])) < 2:
        return 0.0
    return max(auc(q[ok], labels[ok], positive_class=1) - 0.5, 0.0)


def post_filter(weights) -> np.ndarray:
    """Zero every weight that is not strictly above ``max(weights) / 3``."""
    w = np.asarray(weights, dtype=float)
    if w.size == 0 or np.any(w < 0):
        raise DataError("weights must be non-negative")
    top = w.max()
    if not top > 0:
        raise DataError("no predictive features")
    # a weight within rounding noise of the cut counts as equal to it, so it is dropped
    cut = top / 3.0 + 8 * np.finfo(float).eps * top
    return np.where(w > cut, w, 0.0)


def _config_digest(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def train(m: FeatureMatrix, y, span: float = DEFAULT_SPAN,
          mask_threshold: float = MASK_THRESHOLD, standardize: bool = True, label_mapping=None,
          n_jobs: int = 1, metadata: dict | None = None) -> SmoothRankModel:
    """Fit a Smooth Rank model on a feature matrix and labels in {1, 2}."""
    X = _as_matrix(m)
    names = m.col_names if isinstance(m, FeatureMatrix) else tuple(f"x{j}" for j in range(X.shape[1]))
    y = np.asarray(y)
    if y.size != X.shape[0]:
        raise DataError("label count differs from row count")
    if not np.all(np.isin(y, (1, 2))):
        raise DataError("labels must be 1 or 2")
    if min(np.sum(y == 1), np.sum(y == 2)) < 2:
        raise DataError("training needs at least 2 rows of each class")
    cfg = LoessConfig(span=span)

    def fit_one(j):
        p = fit_marginal(X[:, j], y, cfg, mask_threshold, standardize)
        return p, compute_weight(p, X[:, j], y)

    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            fitted = list(pool.map(fit_one, range(X.shape[1])))
    else:
        fitted = [fit_one(j) for j in range(X.shape[1])]
    predictors = tuple(p for p, _ in fitted)
    raw = np.array([w for _, w in fitted])
    weights = post_filter(raw)
    config = {"span": span, "mask_threshold": mask_threshold, "standardize": standardize,
              "degree": 1, "grid": 512}
    meta = {"config": config, "config_digest": _config_digest(config),
            "n_train": int(y.size), "package_version": __version__}
    meta.update(metadata or {})
    return SmoothRankModel(predictors, weights, ClassPriors.from_labels(y), tuple(names),
                           label_mapping, raw, meta)


def score(model: SmoothRankModel, X) -> np.ndarray:
    """Weighted mean of the defined marginal predictor values per row.

    Rows with no contributing feature score NaN. Contributions are sorted
    before summation so the result does not depend on column order.
    """
    X = _as_matrix(X)
    ev = model.evaluations(X)
    w = np.broadcast_to(model.weights, ev.shape)
    live = ~np.isnan(ev) & (w > 0)
    num = np.sort(np.where(live, w * np.nan_to_num(ev), 0.0), axis=1).sum(axis=1)
    den = np.sort(np.where(live, w, 0.0), axis=1).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(live.any(axis=1), num / den, math.nan)
    return out


# -- persistence ------------------------------------------------------------

def _floats(a) -> list:
    return [None if math.isnan(v) else float(v) for v in np.asarray(a, dtype=float)]


def _unfloats(a) -> np.ndarray:
    return np.array([math.nan if v is None else float(v) for v in a], dtype=float)


def model_to_dict(model: SmoothRankModel) -> dict:
    preds = []
    for name, p, w in zip(model.feature_names, model.predictors, model.weights):
        preds.append({
            "feature": name,
            "weight": float(w),
            "grid": _floats(p.grid),
            "q_smooth": _floats(p.q_smooth),
            "raw_q": _floats(p.raw_q),
            "mask": [bool(b) for b in p.mask],
            "n_train_used": p.n_train_used,
            "priors": None if p.priors is None else [p.priors.pi1, p.priors.pi2],
            "dead_reason": p.dead_reason,
        })
    return {
        "format": f"{FORMAT}/{FORMAT_VERSION}",
        "priors": [model.priors.pi1, model.priors.pi2],
        "label_mapping": model.label_mapping,
        "raw_weights": None if model.raw_weights is None else _floats(model.raw_weights),
        "metadata": model.metadata,
        "predictors": preds,
    }


def model_from_dict(d: dict) -> SmoothRankModel:
    fmt = d.get("format") if isinstance(d, dict) else None
    if not isinstance(fmt, str) or "/" not in fmt:
        raise ModelFormatError("missing or malformed format field")
    name, _, ver = fmt.partition("/")
    if name != FORMAT:
        raise ModelFormatError(f"not a smoothrank model: {fmt!r}")
    if ver != str(FORMAT_VERSION):
        raise ModelVersionError(f"unsupported model format version {ver!r} "
                                f"(this build reads {FORMAT_VERSION})")
    try:
        predictors, names, weights = [], [], []
        for e in d["predictors"]:
            pri = e["priors"]
            predictors.append(MarginalPredictor(
                grid=_unfloats(e["grid"]),
                q_smooth=_unfloats(e["q_smooth"]),
                raw_q=_unfloats(e["raw_q"]),
                mask=np.array(e["mask"], dtype=bool),
                n_train_used=int(e["n_train_used"]),
                priors=None if pri is None else ClassPriors(*pri),
                dead_reason=e["dead_reason"],
            ))
            names.append(e["feature"])
            weights.append(float(e["weight"]))
        raw = d.get("raw_weights")
        return SmoothRankModel(tuple(predictors), np.array(weights), ClassPriors(*d["priors"]),
                               tuple(names), d.get("label_mapping"),
                               None if raw is None else _unfloats(raw), d.get("metadata", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupted model: {exc}") from exc


def dumps_model(model: SmoothRankModel) -> str:
    return json.dumps(model_to_dict(model), indent=1, allow_nan=False) + "\n"


def save_model(model: SmoothRankModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))


def load_model(path) -> SmoothRankModel:
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ModelFormatError(f"cannot read model {path}: {exc}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"corrupted model file {path}: {exc}") from exc
    return model_from_dict(d)
