"""
Survival data as a ranking problem
==================================

Pick the event time T that best balances "failed by T" against "still
under observation after T", drop the censored rows whose class is unknown,
train a ranker, and score it with Harrell's concordance index.
"""

import numpy as np

from smoothrank import SurvivalRecords
from smoothrank.bench import fit_survival_model
from smoothrank.survival import derive_classes, harrell_cindex, select_threshold

rng = np.random.default_rng(2)
n = 400

# one covariate raises the hazard, one is noise
risk = rng.normal(size=n)
noise = rng.normal(size=n)
failure = rng.exponential(10 * np.exp(-0.8 * risk))
censor = rng.exponential(15, n)
records = SurvivalRecords(np.minimum(failure, censor) + 1e-3, (failure <= censor).astype(np.int8))
print("events:", int(records.event.sum()), "of", n)

thr = select_threshold(records)
print(thr.report())
classes = derive_classes(records, thr.threshold)
print("early failure:", int((classes == 1).sum()), " no early failure:", int((classes == 2).sum()),
      " excluded:", int((classes == 0).sum()))

X = np.column_stack([risk, noise])
train_rows, test_rows = np.arange(260), np.arange(260, n)
model, _ = fit_survival_model(X[train_rows], records.take(train_rows), ("risk", "noise"))
print("weights:", {k: round(float(w), 3) for k, w in zip(model.feature_names, model.weights)})

scores = model.score(X[test_rows])
print("test concordance:", round(harrell_cindex(records.take(test_rows), scores), 3))
