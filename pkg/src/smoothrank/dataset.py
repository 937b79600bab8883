"""Tabular data model, CSV ingestion, missing-value handling and splitting.

Missing cells are stored as NaN inside a float array; every other cell is
finite. Labels are coded 1/2, survival outcomes as (time, event) arrays.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DataError

log = logging.getLogger(__name__)

MISSING_TOKENS = frozenset({"NA", ""})


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray
    col_names: tuple[str, ...]
    codings: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise DataError("feature matrix must be 2-d")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise DataError("feature matrix needs at least one row and one column")
        if np.isinf(values).any():
            raise DataError("feature matrix contains infinite values")
        if len(self.col_names) != values.shape[1]:
            raise DataError("column names do not match column count")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "col_names", tuple(self.col_names))

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    @property
    def missing(self) -> np.ndarray:
        return np.isnan(self.values)

    def take_rows(self, idx) -> "FeatureMatrix":
        return FeatureMatrix(self.values[np.asarray(idx)], self.col_names, self.codings)

    def take_cols(self, idx) -> "FeatureMatrix":
        idx = list(idx)
        names = tuple(self.col_names[i] for i in idx)
        codings = {k: v for k, v in self.codings.items() if k in names}
        return FeatureMatrix(self.values[:, idx], names, codings)


@dataclass(frozen=True)
class SurvivalRecords:
    time: np.ndarray
    event: np.ndarray

    def __post_init__(self):
        time = np.array(self.time, dtype=float).ravel()
        event = np.array(self.event).ravel()
        if time.size != event.size:
            raise DataError("time and event differ in length")
        if not np.all(np.isfinite(time)) or np.any(time <= 0):
            raise DataError("survival times must be finite and positive")
        if not np.all(np.isin(event, (0, 1))):
            raise DataError("event indicator must be 0 or 1")
        event = event.astype(np.int8)
        time.setflags(write=False)
        event.setflags(write=False)
        object.__setattr__(self, "time", time)
        object.__setattr__(self, "event", event)

    def __len__(self):
        return self.time.size

    def take(self, idx) -> "SurvivalRecords":
        idx = np.asarray(idx)
        return SurvivalRecords(self.time[idx], self.event[idx])


@dataclass(frozen=True)
class LoadedData:
    """Result of :func:`load_csv`."""

    features: FeatureMatrix
    labels: np.ndarray | None = None
    label_mapping: dict | None = None
    survival: SurvivalRecords | None = None


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 2.0 / 3.0
    n_repeats: int = 100
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise DataError("train_fraction must lie in (0, 1)")
        if self.n_repeats < 1:
            raise DataError("n_repeats must be at least 1")


@dataclass(frozen=True)
class ImputationConfig:
    k: int = 5
    standardize: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise DataError("k must be at least 1")


def _parse_number(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def load_csv(path, label_col=None, time_col=None, event_col=None,
             missing_tokens=MISSING_TOKENS, drop_cols=(), codings=None) -> LoadedData:
    """Read a comma-separated file with a header row.

    Cells equal to a missing token become NaN. A label column must hold
    exactly two distinct values; the lexicographically smaller one maps to 1.
    String-valued feature columns are integer-coded in order of first
    appearance, with a warning, because downstream models treat every
    column as ordinal. ``codings`` maps column names to a fixed
    value-to-code mapping (e.g. the one recorded at training time); values
    outside it become missing.
    """
    if (time_col is None) != (event_col is None):
        raise DataError("time and event columns must be given together")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except (UnicodeDecodeError, csv.Error) as exc:
        raise DataError(f"cannot parse {path}: {exc}") from exc
    rows = [r for r in rows if r]
    if not rows:
        raise DataError(f"{path} is empty")
    header, body = [h.strip() for h in rows[0]], rows[1:]
    if not body:
        raise DataError(f"{path} has a header but no data rows")
    for lineno, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(r)}")
    if len(set(header)) != len(header):
        raise DataError(f"{path}: duplicate column names")

    special = [c for c in (label_col, time_col, event_col) if c is not None]
    for c in list(special) + list(drop_cols):
        if c not in header:
            raise DataError(f"column {c!r} not found in {path}")
    columns = {name: [r[j].strip() for r in body] for j, name in enumerate(header)}

    labels = mapping = survival = None
    if label_col is not None:
        raw = columns[label_col]
        if any(v in missing_tokens for v in raw):
            raise DataError(f"label column {label_col!r} has missing values")
        distinct = sorted(set(raw))
        if len(distinct) != 2:
            raise DataError(f"label column {label_col!r} must have exactly 2 distinct values, "
                            f"found {len(distinct)}")
        mapping = {distinct[0]: 1, distinct[1]: 2}
        labels = np.array([mapping[v] for v in raw], dtype=np.int8)
    if time_col is not None:
        time = np.array([_cell_or_fail(v, time_col, missing_tokens) for v in columns[time_col]])
        event = np.array([_cell_or_fail(v, event_col, missing_tokens) for v in columns[event_col]])
        if not np.all(np.isin(event, (0.0, 1.0))):
            raise DataError(f"event column {event_col!r} has values outside {{0, 1}}")
        survival = SurvivalRecords(time, event.astype(np.int8))

    feature_names = [h for h in header if h not in special and h not in drop_cols]
    if not feature_names:
        raise DataError(f"{path}: no feature columns")
    values = np.empty((len(body), len(feature_names)))
    fixed_codings = codings or {}
    codings = {}
    for j, name in enumerate(feature_names):
        fixed = fixed_codings.get(name)
        values[:, j], coding = _code_column(columns[name], name, missing_tokens, fixed)
        if coding is not None:
            codings[name] = coding
    features = FeatureMatrix(values, tuple(feature_names), codings)
    return LoadedData(features, labels, mapping, survival)


def _cell_or_fail(cell, col, missing_tokens) -> float:
    if cell in missing_tokens:
        raise DataError(f"column {col!r} has missing values")
    v = _parse_number(cell)
    if v is None or not math.isfinite(v):
        raise DataError(f"column {col!r}: non-numeric value {cell!r}")
    return v


def _code_column(cells, name, missing_tokens, fixed=None):
    if fixed is not None:
        unknown = sorted({c for c in cells if c not in missing_tokens and c not in fixed})
        if unknown:
            log.warning("column %r: unseen categories %s treated as missing", name, unknown)
        out = np.array([fixed.get(c, math.nan) if c not in missing_tokens else math.nan
                        for c in cells], dtype=float)
        return out, dict(fixed)
    parsed = [None if c in missing_tokens else _parse_number(c) for c in cells]
    numeric = all(p is not None for p, c in zip(parsed, cells) if c not in missing_tokens)
    if numeric:
        out = np.array([math.nan if c in missing_tokens else p for p, c in zip(parsed, cells)])
        if np.isinf(out).any() or np.isnan(out[[c not in missing_tokens for c in cells]]).any():
            raise DataError(f"column {name!r} contains non-finite numbers")
        return out, None
    coding: dict[str, int] = {}
    out = np.empty(len(cells))
    for i, c in enumerate(cells):
        if c in missing_tokens:
            out[i] = math.nan
        else:
            out[i] = coding.setdefault(c, len(coding))
    log.warning("column %r is non-numeric; integer-coded as ordinal %s", name, coding)
    return out, coding


def filter_sparse_features(m: FeatureMatrix, max_missing_frac: float = 0.2) -> FeatureMatrix:
    """Keep the columns whose fraction of missing cells is at most ``max_missing_frac``."""
    frac = m.missing.mean(axis=0)
    keep = [j for j in range(m.n_cols) if frac[j] <= max_missing_frac]
    if not keep:
        raise DataError("no usable features")
    if len(keep) == m.n_cols:
        return m
    return m.take_cols(keep)


def knn_impute(m: FeatureMatrix, cfg: ImputationConfig = ImputationConfig(),
               donors=None) -> FeatureMatrix:
    """Fill missing cells with the mean over the k nearest rows.

    Distances are Euclidean over columns observed in both rows, computed on
    standardized columns, and divided by the number of shared columns. Only
    rows where the target column is observed are candidates, and only the
    originally observed values are averaged. ``donors`` optionally restricts
    the candidate rows (boolean mask or index array), e.g. to a training fold.
    """
    vals = m.values
    miss = np.isnan(vals)
    if not miss.any():
        return m
    n = m.n_rows
    donor_mask = np.ones(n, dtype=bool)
    if donors is not None:
        donors = np.asarray(donors)
        donor_mask = donors if donors.dtype == bool else np.isin(np.arange(n), donors)
    observed_in_donors = (~miss & donor_mask[:, None]).any(axis=0)
    if not observed_in_donors.all():
        bad = [m.col_names[j] for j in np.flatnonzero(~observed_in_donors)]
        raise DataError(f"columns entirely missing: {bad}")

    z = vals.copy()
    if cfg.standardize:
        mu = np.nanmean(vals, axis=0)
        sd = np.nanstd(vals, axis=0)
        sd = np.where(sd > 0, sd, 1.0)
        z = (vals - mu) / sd
    zf = np.where(miss, 0.0, z)
    obs = (~miss).astype(float)

    out = vals.copy()
    for i in np.flatnonzero(miss.any(axis=1)):
        shared = obs @ obs[i]
        diff = (zf - zf[i]) * obs * obs[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            dist = np.sqrt((diff ** 2).sum(axis=1)) / shared
        for j in np.flatnonzero(miss[i]):
            cand = donor_mask & ~miss[:, j] & (shared > 0)
            cand[i] = False
            idx = np.flatnonzero(cand)
            if idx.size == 0:
                raise DataError(f"row {i} shares no observed column with any donor for "
                                f"{m.col_names[j]!r}")
            nearest = idx[_tie_stable_order(dist[idx])[:cfg.k]]
            out[i, j] = vals[nearest, j].mean()
    return FeatureMatrix(out, m.col_names, m.codings)


def _tie_stable_order(d: np.ndarray, rel: float = 1e-12) -> np.ndarray:
    """Ascending order of ``d`` where values equal up to rounding keep input order."""
    order = np.argsort(d, kind="stable")
    s = d[order]
    gap = np.diff(s) > rel * np.maximum(np.abs(s[1:]), 1.0)
    group = np.concatenate(([0], np.cumsum(gap)))
    return order[np.lexsort((order, group))]


def _train_size(n: int, fraction: float) -> int:
    return int(math.floor(fraction * n + 0.5))


def random_split(n_rows: int, spec: SplitSpec, strata=None) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded train/test partitions of ``range(n_rows)``.

    Each repeat draws from its own child of ``SeedSequence(seed)``, so any
    subset of repeats can be regenerated independently. With ``strata`` the
    training size ``round(fraction * n)`` is allocated across strata by
    largest remainder and each stratum is sampled separately.
    """
    if n_rows < 3:
        raise DataError("random_split needs at least 3 rows")
    children = np.random.SeedSequence(spec.seed).spawn(spec.n_repeats)
    return [split_once(n_rows, spec.train_fraction, np.random.default_rng(c), strata)
            for c in children]


def split_once(n_rows, fraction, rng, strata=None):
    n_train = _train_size(n_rows, fraction)
    if strata is None:
        perm = rng.permutation(n_rows)
        train = np.sort(perm[:n_train])
    else:
        strata = np.asarray(strata)
        if strata.size != n_rows:
            raise DataError("strata length differs from row count")
        groups = [np.flatnonzero(strata == s) for s in np.unique(strata)]
        quotas = [fraction * g.size for g in groups]
        alloc = [int(math.floor(qv)) for qv in quotas]
        rest = n_train - sum(alloc)
        by_remainder = sorted(range(len(groups)), key=lambda k: (-(quotas[k] - alloc[k]), k))
        for k in by_remainder[:rest]:
            alloc[k] += 1
        train = np.sort(np.concatenate([rng.permutation(g)[:a] for g, a in zip(groups, alloc)]))
    test = np.setdiff1d(np.arange(n_rows), train)
    return train, test


def write_split_manifest(path, splits) -> None:
    """CSV with columns ``repeat,row_index,role``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["repeat", "row_index", "role"])
        for r, (train, test) in enumerate(splits):
            roles = sorted([(int(i), "train") for i in train] + [(int(i), "test") for i in test])
            for i, role in roles:
                w.writerow([r, i, role])


def write_csv(path, m: FeatureMatrix, extra: dict | None = None) -> None:
    """Write a feature matrix (plus optional extra columns) with ``NA`` for missing."""
    extra = extra or {}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(m.col_names) + list(extra))
        cols = [np.asarray(v) for v in extra.values()]
        for i, row in enumerate(m.values):
            cells = ["NA" if math.isnan(v) else repr(float(v)) for v in row]
            w.writerow(cells + [c[i] for c in cols])
