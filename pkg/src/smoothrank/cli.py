"""Command-line interface: ``smoothrank <command> [options]``.

Commands: train, score, inspect, impute, bench-rank, bench-surv. Options may
also come from a JSON file given with ``--config`` (keys are option names
with dashes replaced by underscores); explicit flags win.

Exit codes: 0 success, 2 user or data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import math
import pathlib
import sys

import numpy as np

from .bench import BenchConfig, bench_rank, bench_surv, prepare_features
from .dataset import ImputationConfig, SplitSpec, knn_impute, load_csv, write_csv
from .exceptions import DataError, NumericalError
from .ranker import load_model, save_model, train

log = logging.getLogger("smoothrank")


def _missing_filter(text):
    if str(text).lower() in ("none", "off"):
        return None
    v = float(text)
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError("missing filter must lie in [0, 1] or be 'none'")
    return v


def _add_data_args(p, label=False, survival=False):
    p.add_argument("--input", required=True, help="CSV file with a header row")
    if label:
        p.add_argument("--label-col", required=True, help="two-valued class column")
    if survival:
        p.add_argument("--time-col", default="time")
        p.add_argument("--event-col", default="event")
    p.add_argument("--drop-col", action="append", default=[], metavar="NAME",
                   help="column to ignore (repeatable)")


def _add_prep_args(p, missing_filter):
    p.add_argument("--impute", action=argparse.BooleanOptionalAction, default=True,
                   help="k-NN imputation of missing cells (default: on)")
    p.add_argument("--impute-train-only", action="store_true",
                   help="impute each split from its training fold instead of the full data")
    p.add_argument("--k", type=int, default=5, help="neighbours for imputation")
    p.add_argument("--missing-filter", type=_missing_filter, default=missing_filter,
                   help="drop columns with a larger missing fraction ('none' disables)")


def _add_bench_args(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--train-frac", type=float, default=2.0 / 3.0)
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--null-model", action="store_true",
                   help="replace model scores by uniform noise (sanity check)")
    p.add_argument("--name", default=None, help="dataset name in the report")
    p.add_argument("--out", default=None,
                   help="summary CSV path; per-split results go to <stem>.splits.csv")


def build_parser():
    parser = argparse.ArgumentParser(prog="smoothrank", description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=None, help="JSON file with option defaults")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model and write it as JSON")
    _add_data_args(p, label=True)
    _add_prep_args(p, missing_filter=0.2)
    p.add_argument("--out", required=True, help="model file to write")

    p = sub.add_parser("score", help="score rows of a CSV with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None, help="scores CSV (default: stdout)")

    p = sub.add_parser("inspect", help="dump the fitted marginal curves as CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--out", default=None, help="curves CSV (default: stdout)")

    p = sub.add_parser("impute", help="k-NN impute missing cells and write the result")
    _add_data_args(p)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench-rank", help="repeated-split AUC benchmark")
    _add_data_args(p, label=True)
    _add_prep_args(p, missing_filter=0.2)
    _add_bench_args(p)

    p = sub.add_parser("bench-surv", help="repeated-split concordance benchmark")
    _add_data_args(p, survival=True)
    _add_prep_args(p, missing_filter=None)
    _add_bench_args(p)
    return parser, sub


def parse_args(argv=None):
    parser, sub = build_parser()
    # find --config and the subcommand without triggering the subparsers' required checks
    peek = argparse.ArgumentParser(add_help=False)
    peek.add_argument("--config", default=None)
    pre, rest = peek.parse_known_args(argv)
    pre.command = next((a for a in rest if a in sub.choices), None)
    if pre.config and pre.command:
        try:
            with open(pre.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config {pre.config}: {exc}")
        if not isinstance(cfg, dict):
            parser.error("config file must hold a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        if "missing_filter" in cfg and cfg["missing_filter"] is not None:
            cfg["missing_filter"] = _missing_filter(cfg["missing_filter"])
        sub.choices[pre.command].set_defaults(**cfg)
        # required options satisfied by the config file
        for action in sub.choices[pre.command]._actions:
            if action.dest in cfg:
                action.required = False
    return parser.parse_args(argv)


def _open_out(path):
    if path is None:
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w", newline="", encoding="utf-8")


def _bench_config(args) -> BenchConfig:
    return BenchConfig(
        split=SplitSpec(train_fraction=args.train_frac, n_repeats=args.repeats, seed=args.seed),
        impute=args.impute,
        impute_train_only=args.impute_train_only,
        imputation=ImputationConfig(k=args.k),
        missing_filter=args.missing_filter,
        n_jobs=args.jobs,
        null_model=args.null_model,
    )


def _emit_report(report, args):
    sys.stdout.write(report.table())
    if args.out:
        out = pathlib.Path(args.out)
        out.write_text(report.summary_csv(), encoding="utf-8")
        splits = out.with_name(out.stem + ".splits.csv")
        splits.write_text(report.per_split_csv(), encoding="utf-8")


def cmd_train(args):
    data = load_csv(args.input, label_col=args.label_col, drop_cols=args.drop_col)
    cfg = BenchConfig(impute=args.impute, imputation=ImputationConfig(k=args.k),
                      missing_filter=args.missing_filter)
    m = prepare_features(data.features, cfg)
    model = train(m, data.labels, label_mapping=data.label_mapping,
                  metadata={"source": pathlib.Path(args.input).name, "codings": m.codings})
    save_model(model, args.out)
    used = [n for n, w in zip(model.feature_names, model.weights) if w > 0]
    print(f"trained on {m.n_rows} rows, {m.n_cols} features; "
          f"{model.n_features_used} retained after post-filtering: {', '.join(used)}")
    return model


def cmd_score(args):
    model = load_model(args.model)
    data = load_csv(args.input, codings=model.metadata.get("codings"))
    names = data.features.col_names
    missing = [n for n in model.feature_names if n not in names]
    if missing:
        raise DataError(f"input lacks model features: {missing}")
    X = data.features.values[:, [names.index(n) for n in model.feature_names]]
    scores = model.score(X)
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row_index", "score"])
        for i, s in enumerate(scores):
            w.writerow([i, "NA" if math.isnan(s) else repr(float(s))])
    return scores


def cmd_inspect(args):
    model = load_model(args.model)
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature", "grid", "raw_q", "q_smooth", "masked", "weight"])
        for name, p, wt in zip(model.feature_names, model.predictors, model.weights):
            for g, rq, qs, mk in zip(p.grid, p.raw_q, p.q_smooth, p.mask):
                w.writerow([name, _fmt(g), _fmt(rq), _fmt(qs), int(mk), repr(float(wt))])


def _fmt(v):
    return "NA" if math.isnan(v) else repr(float(v))


def cmd_impute(args):
    data = load_csv(args.input, drop_cols=args.drop_col)
    out = knn_impute(data.features, ImputationConfig(k=args.k, standardize=not args.no_standardize))
    write_csv(args.out, out)


def cmd_bench_rank(args):
    data = load_csv(args.input, label_col=args.label_col, drop_cols=args.drop_col)
    name = args.name or pathlib.Path(args.input).stem
    report = bench_rank(data.features, data.labels, _bench_config(args), dataset=name)
    _emit_report(report, args)
    return report


def cmd_bench_surv(args):
    data = load_csv(args.input, time_col=args.time_col, event_col=args.event_col,
                    drop_cols=args.drop_col)
    name = args.name or pathlib.Path(args.input).stem
    report = bench_surv(data.features, data.survival, _bench_config(args), dataset=name)
    _emit_report(report, args)
    return report


COMMANDS = {
    "train": cmd_train,
    "score": cmd_score,
    "inspect": cmd_inspect,
    "impute": cmd_impute,
    "bench-rank": cmd_bench_rank,
    "bench-surv": cmd_bench_surv,
}


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
