"""Acceptance suite: one test and one PASS/FAIL line per criterion.

The dataset criteria read CSVs produced by ``scripts/fetch_datasets.py``
from ``data/``; a dataset that is not present is reported as SKIP.
"""

import csv
import json
import time

import numpy as np
import pytest

from acceptance_log import record
from conftest import DATA_DIR
from oracles import auc_pairs, cindex_pairs, threshold_scan
from smoothrank.bench import BenchConfig, bench_rank, bench_surv
from smoothrank.cli import main
from smoothrank.dataset import FeatureMatrix, SplitSpec, SurvivalRecords
from smoothrank.marginal import ClassPriors, fit_marginal, raw_q
from smoothrank.metrics import auc_fraction
from smoothrank.ranker import SmoothRankModel, dumps_model, model_from_dict, post_filter, train
from smoothrank.smoothing import kde_cosine, loess_fit
from smoothrank.survival import cindex_fraction, select_threshold

N_SPLITS = 100
TOLERANCE = 0.03
FEATURE_TOLERANCE = 0.30

# (file, label column, paper mean AUC, paper mean features)
RANK_TARGETS = {
    "Pima": ("pima.csv", "class", 0.83, 6.6),
    "Statlog-Heart": ("statlog_heart.csv", "class", 0.90, 10.4),
    "Parkinsons": ("parkinsons.csv", "status", 0.88, None),
}
# (file, paper mean CI, paper mean features)
SURV_TARGETS = {
    "PBC": ("pbc.csv", 0.83, 12.6),
    "Lung1": ("lung.csv", 0.63, 5.7),
    "Colon": ("colon_recurrence.csv", 0.65, 4.0),
    "Lung2": ("veteran.csv", 0.73, 2.16),
}


def status(ok):
    return "PASS" if ok else "FAIL"


def summary_row(path):
    with open(path, newline="") as fh:
        return next(csv.DictReader(fh))


def run_bench(command, args, out):
    code = main([command, *args, "--repeats", str(N_SPLITS), "--seed", "0", "--out", str(out)])
    assert code == 0, f"{command} exited with {code}"
    return summary_row(out)


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="module")
def pima_serial(workdir):
    """Serial Pima benchmark report, shared by criteria 4 and 7."""
    path = DATA_DIR / "pima.csv"
    if not path.exists():
        return None
    out = workdir / "pima_serial.csv"
    run_bench("bench-rank", ["--input", str(path), "--label-col", "class", "--name", "Pima"], out)
    return out


def test_criterion_1_oracle_equivalence():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    mismatches = {"auc": 0, "cindex": 0, "threshold": 0}
    counts = dict.fromkeys(mismatches, 0)
    while min(counts.values()) < 1000:
        n = int(rng.integers(2, 201))
        scores = rng.integers(0, rng.integers(2, 30), n).astype(float)  # plenty of ties
        labels = rng.integers(1, 3, n)
        times = rng.integers(1, rng.integers(2, 60), n).astype(float)
        events = (rng.random(n) < rng.uniform(0.2, 0.9)).astype(np.int8)
        if counts["auc"] < 1000 and len(set(labels.tolist())) == 2:
            counts["auc"] += 1
            mismatches["auc"] += auc_fraction(scores, labels) != auc_pairs(scores, labels)
        if counts["cindex"] < 1000:
            rec = SurvivalRecords(times, events)
            try:
                ref = cindex_pairs(times, events, scores)
            except ZeroDivisionError:
                ref = None
            if ref is not None:
                counts["cindex"] += 1
                mismatches["cindex"] += cindex_fraction(rec, scores) != ref
        if counts["threshold"] < 1000 and events.any():
            counts["threshold"] += 1
            res = select_threshold(SurvivalRecords(times, events))
            got = (res.threshold, res.n_early, res.n_late)
            mismatches["threshold"] += got != threshold_scan(times, events)
    elapsed = time.perf_counter() - start
    ok = not any(mismatches.values()) and elapsed < 60
    record(1, status(ok), f"mismatches {mismatches} over 1000 instances each, {elapsed:.1f}s")
    assert ok


def test_criterion_2_kernel_properties():
    rng = np.random.default_rng(2)
    integrals, sym, affine, linear = [], [], [], []
    for _ in range(200):
        n = int(rng.integers(1, 300))
        xs = rng.standard_t(3, n) * rng.uniform(0.01, 100) + rng.uniform(-1e3, 1e3)
        integrals.append(kde_cosine(xs).integral())
        half = rng.normal(size=int(rng.integers(1, 100)))
        est = kde_cosine(np.r_[half, -half])
        sym.append(np.max(np.abs(est.values - est.values[::-1])))
        x = rng.uniform(-10, 10, int(rng.integers(3, 200)))
        t = rng.uniform(-12, 12, 50)
        a, b = rng.normal(size=2)
        affine.append(np.max(np.abs(loess_fit(x, a * x + b, t) - (a * t + b))))
        y1, y2 = rng.normal(size=(2, x.size))
        c1, c2 = rng.normal(size=2)
        lhs = loess_fit(x, c1 * y1 + c2 * y2, t)
        linear.append(np.max(np.abs(lhs - (c1 * loess_fit(x, y1, t) + c2 * loess_fit(x, y2, t)))))
    ok = (0.99 <= min(integrals) and max(integrals) <= 1.01 and max(sym) <= 1e-12
          and max(affine) <= 1e-9 and max(linear) <= 1e-9)
    record(2, status(ok), f"KDE integral in [{min(integrals):.5f}, {max(integrals):.5f}], "
                          f"symmetry {max(sym):.1e}, LOESS affine {max(affine):.1e}, "
                          f"linearity {max(linear):.1e}")
    assert ok


def test_criterion_3_algorithm_invariants():
    rng = np.random.default_rng(3)
    failures = []

    # raw q bounds on random densities
    for _ in range(2000):
        pi1 = rng.uniform(0.01, 0.99)
        pr = ClassPriors(pi1, 1 - pi1)
        q = raw_q(rng.exponential(size=64), rng.exponential(size=64) * rng.integers(0, 2, 64), pr)
        q = q[~np.isnan(q)]
        if q.size and (q.min() < -1 / pr.pi2 - 1e-12 or q.max() > 1 / pr.pi1 + 1e-12):
            failures.append("raw q bound")
            break

    # label-swap antisymmetry
    swap = 0.0
    for _ in range(20):
        n = int(rng.integers(40, 400))
        y = rng.integers(1, 3, n)
        x = rng.normal(size=n) + rng.uniform(0, 2) * (y == 1) * rng.choice([-1, 1])
        a, b = fit_marginal(x, y), fit_marginal(x, 3 - y)
        if not np.array_equal(a.mask, b.mask):
            failures.append("label-swap mask")
        live = ~a.mask
        if live.any():
            swap = max(swap, float(np.max(np.abs(a.q_smooth[live] + b.q_smooth[live]))))
    if swap > 1e-9:
        failures.append(f"label-swap {swap:.1e}")

    # post-filter postcondition
    for _ in range(2000):
        w = rng.uniform(0, 0.5, int(rng.integers(1, 30))) * rng.integers(0, 2, 1)
        w[rng.integers(w.size)] = rng.uniform(0.01, 0.5)
        out = post_filter(w)
        top = w.max()
        if out[np.argmax(w)] != top or np.any((out != 0) & ~(out > top / 3)):
            failures.append("post-filter")
            break

    # trained-model invariants
    scale_err, convex_ok, perm_ok, trip_ok = 0.0, True, True, True
    for _ in range(5):
        n, p = 300, int(rng.integers(2, 7))
        X = rng.normal(size=(n, p))
        y = np.where(X @ rng.normal(size=p) + rng.normal(size=n) > 0, 1, 2)
        T = rng.normal(size=(200, p)) * 1.5
        T[rng.random(T.shape) < 0.2] = np.nan
        model = train(FeatureMatrix(X, tuple(f"f{j}" for j in range(p))), y)
        s = model.score(T)
        ev = model.evaluations(T)
        has = ~np.isnan(s)
        lo, hi = np.nanmin(ev[has], axis=1), np.nanmax(ev[has], axis=1)
        convex_ok &= bool(np.all((lo - 1e-12 <= s[has]) & (s[has] <= hi + 1e-12)))
        for c in (1e-4, 0.37, 250.0):
            scaled = SmoothRankModel(model.predictors, model.weights * c, model.priors,
                                     model.feature_names)
            scale_err = max(scale_err, float(np.nanmax(np.abs(scaled.score(T) - s))))
        perm = rng.permutation(p)
        permuted = train(FeatureMatrix(X[:, perm], tuple(f"f{j}" for j in perm)), y)
        perm_ok &= bool(np.array_equal(permuted.score(T[:, perm]), s, equal_nan=True))
        back = model_from_dict(json.loads(dumps_model(model)))
        trip_ok &= bool(np.array_equal(back.score(T), s, equal_nan=True))
    if not convex_ok:
        failures.append("convex bound")
    if scale_err > 1e-12:
        failures.append(f"weight scaling {scale_err:.1e}")
    if not perm_ok:
        failures.append("column permutation")
    if not trip_ok:
        failures.append("round trip")

    ok = not failures
    record(3, status(ok), f"label-swap {swap:.1e}, weight scaling {scale_err:.1e}"
                          + (f"; failed: {failures}" if failures else "; all invariants hold"))
    assert ok


@pytest.mark.slow
def test_criterion_4_classification_reproduction(workdir, pima_serial):
    parts, ok, ran = [], True, 0
    for name, (fname, label, target, feats) in RANK_TARGETS.items():
        path = DATA_DIR / fname
        if not path.exists():
            parts.append(f"{name} SKIP (data/{fname} unavailable)")
            continue
        out = pima_serial if name == "Pima" else workdir / f"{path.stem}.csv"
        row = summary_row(out) if name == "Pima" else run_bench(
            "bench-rank", ["--input", str(path), "--label-col", label, "--name", name], out)
        mean, used = float(row["mean_auc"]), float(row["mean_features"])
        good = abs(mean - target) <= TOLERANCE
        ok &= good
        ran += 1
        paper_feats = f", paper {feats}" if feats else ""
        parts.append(f"{name} AUC {mean:.4f} vs {target}±{TOLERANCE} {status(good)} "
                     f"(features {used:.2f}{paper_feats})")
    ok &= ran > 0
    record(4, status(ok), "; ".join(parts))
    assert ok


@pytest.mark.slow
def test_criterion_5_survival_reproduction(workdir):
    parts, ok, ran = [], True, 0
    for name, (fname, target, feats) in SURV_TARGETS.items():
        path = DATA_DIR / fname
        if not path.exists():
            parts.append(f"{name} SKIP (data/{fname} unavailable)")
            continue
        row = run_bench("bench-surv", ["--input", str(path), "--name", name],
                        workdir / f"{path.stem}.csv")
        mean, used = float(row["mean_ci"]), float(row["mean_features"])
        good = abs(mean - target) <= TOLERANCE
        feats_ok = abs(used - feats) <= FEATURE_TOLERANCE * feats
        ok &= good
        ran += 1
        parts.append(f"{name} CI {mean:.4f} vs {target}±{TOLERANCE} {status(good)} "
                     f"(features {used:.2f} vs {feats}: {'within' if feats_ok else 'outside'} 30%)")
    ok &= ran > 0
    record(5, status(ok), "; ".join(parts))
    assert ok


@pytest.mark.slow
def test_criterion_6_null_models():
    g = np.random.default_rng(6)
    n = 500
    X = FeatureMatrix(g.normal(size=(n, 5)), tuple(f"x{j}" for j in range(5)))
    y = g.integers(1, 3, n)
    cfg = BenchConfig(split=SplitSpec(n_repeats=N_SPLITS, seed=0))
    rank = bench_rank(X, y, cfg, "random labels").mean
    rec = SurvivalRecords(g.exponential(10, n) + 0.01, (g.random(n) < 0.7).astype(np.int8))
    surv = bench_surv(X, rec, BenchConfig(split=cfg.split, null_model=True), "random scores").mean
    ok = 0.45 <= rank <= 0.55 and 0.45 <= surv <= 0.55
    record(6, status(ok), f"random labels AUC {rank:.4f}, random scores CI {surv:.4f} "
                          f"(both required in [0.45, 0.55])")
    assert ok


@pytest.mark.slow
def test_criterion_7_determinism(workdir, pima_serial):
    if pima_serial is not None:
        args = ["--input", str(DATA_DIR / "pima.csv"), "--label-col", "class", "--name", "Pima"]
        serial = pima_serial
    else:
        g = np.random.default_rng(7)
        src = workdir / "synthetic.csv"
        x = g.normal(size=(300, 3))
        y = np.where(x[:, 0] + g.normal(size=300) > 0, "a", "b")
        with open(src, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x0", "x1", "x2", "y"])
            w.writerows([[*map(repr, map(float, r)), c] for r, c in zip(x, y)])
        args = ["--input", str(src), "--label-col", "y", "--name", "synthetic"]
        serial = workdir / "synthetic_serial.csv"
        run_bench("bench-rank", args, serial)
    parallel = workdir / f"{serial.stem.replace('serial', 'parallel')}.csv"
    run_bench("bench-rank", [*args, "--jobs", "2"], parallel)
    same = [serial.read_bytes() == parallel.read_bytes()]
    for p in (serial, parallel):
        assert p.with_name(p.stem + ".splits.csv").exists()
    same.append(serial.with_name(serial.stem + ".splits.csv").read_bytes()
                == parallel.with_name(parallel.stem + ".splits.csv").read_bytes())
    ok = all(same)
    record(7, status(ok), f"{args[-1]} bench-rank, {N_SPLITS} splits, serial vs 2 workers: "
                          f"summary {'identical' if same[0] else 'DIFFERENT'}, "
                          f"per-split {'identical' if same[1] else 'DIFFERENT'}")
    assert ok
