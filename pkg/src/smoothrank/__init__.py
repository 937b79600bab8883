"""Smooth Rank: bipartite ranking by aggregating univariate density-ratio predictors."""

__version__ = "0.1.0"

from .dataset import (  # noqa: E402
    FeatureMatrix,
    ImputationConfig,
    SplitSpec,
    SurvivalRecords,
    filter_sparse_features,
    knn_impute,
    load_csv,
    random_split,
)
from .exceptions import DataError, ModelFormatError, ModelVersionError, NumericalError  # noqa: E402
from .marginal import ClassPriors, MarginalPredictor, evaluate, fit_marginal, raw_q  # noqa: E402
from .metrics import EvalReport, aggregate, auc  # noqa: E402
from .ranker import (  # noqa: E402
    SmoothRankModel,
    compute_weight,
    load_model,
    post_filter,
    save_model,
    score,
    train,
)
from .survival import derive_classes, harrell_cindex, select_threshold  # noqa: E402

__all__ = [
    "ClassPriors", "DataError", "EvalReport", "FeatureMatrix", "ImputationConfig",
    "MarginalPredictor", "ModelFormatError", "ModelVersionError", "NumericalError",
    "SmoothRankModel", "SplitSpec", "SurvivalRecords", "aggregate", "auc", "compute_weight",
    "derive_classes", "evaluate", "filter_sparse_features", "fit_marginal", "harrell_cindex",
    "knn_impute", "load_csv", "load_model", "post_filter", "random_split", "raw_q",
    "save_model", "score", "select_threshold", "train",
]
