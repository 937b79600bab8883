"""
Repeated-split benchmark
========================

Run the evaluation protocol (seeded 2:1 splits, mean test AUC and mean
number of features kept) on a CSV file. Without an argument a synthetic
file is written first.

    python demos/04_benchmark.py [path/to/data.csv label_column]
"""

import pathlib
import sys
import tempfile

import numpy as np

from smoothrank.bench import BenchConfig, bench_rank
from smoothrank.dataset import SplitSpec, load_csv

if len(sys.argv) == 3:
    path, label = pathlib.Path(sys.argv[1]), sys.argv[2]
else:
    rng = np.random.default_rng(3)
    n = 300
    y = rng.choice(["no", "yes"], n)
    x = rng.normal(size=(n, 3)) + (y == "yes")[:, None] * [0.8, 0.0, -0.4]
    path = pathlib.Path(tempfile.mkdtemp()) / "synthetic.csv"
    with open(path, "w") as fh:
        fh.write("a,b,c,label\n")
        for row, lab in zip(x, y):
            fh.write(",".join(repr(float(v)) for v in row) + f",{lab}\n")
    label = "label"

data = load_csv(path, label_col=label)
print("labels:", data.label_mapping)

cfg = BenchConfig(split=SplitSpec(n_repeats=20, seed=0))
report = bench_rank(data.features, data.labels, cfg, dataset=path.stem)
print(report.table())
print(report.per_split_csv().splitlines()[:4])
