"""
Ranking with Smooth Rank
========================

Train a scoring function on a small synthetic problem, look at the
weights it assigns, and measure the test AUC.
"""

import numpy as np

from smoothrank import FeatureMatrix, auc, train

rng = np.random.default_rng(0)
n = 600

# class 1 tends to have larger x0 and smaller x1; x2 and x3 are noise
y = rng.integers(1, 3, n)
X = np.column_stack([
    rng.normal(np.where(y == 1, 1.0, 0.0), 1.0),
    rng.normal(np.where(y == 1, -0.5, 0.0), 1.0),
    rng.normal(size=n),
    rng.uniform(size=n),
])

# a few missing cells: they are simply skipped when scoring
X[rng.random(X.shape) < 0.05] = np.nan

train_rows, test_rows = np.arange(400), np.arange(400, n)
m = FeatureMatrix(X[train_rows], ("x0", "x1", "x2", "x3"))
model = train(m, y[train_rows])

# raw weight is AUC - 1/2 on the training rows; weak features are then dropped
for name, raw, w in zip(model.feature_names, model.raw_weights, model.weights):
    print(f"{name}: raw weight {raw:.3f}  kept weight {w:.3f}")

# a row scores as missing only if none of its kept features is usable
scores = model.score(X[test_rows])
scored = ~np.isnan(scores)
print("rows without a score:", int((~scored).sum()))
print("test AUC:", round(auc(scores[scored], y[test_rows][scored]), 3))

# higher scores point toward class 1
print("mean score, class 1:", round(np.nanmean(scores[y[test_rows] == 1]), 3))
print("mean score, class 2:", round(np.nanmean(scores[y[test_rows] == 2]), 3))
