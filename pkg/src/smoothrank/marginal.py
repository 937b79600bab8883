"""Univariate marginal predictors.

For one feature, the class-conditional densities ``g1`` and ``g2`` are
estimated on a shared grid, and the normalized density difference

    q(r) = (g1(r) - g2(r)) / (pi1 * g1(r) + pi2 * g2(r))

is computed wherever the mixture density reaches ``MASK_THRESHOLD``. The
unmasked part of ``q`` is then LOESS-smoothed. Under Bayes' rule ``q`` is
``P(1|r)/pi1 - P(2|r)/pi2``, so it is near zero where the feature carries
no information and positive where it points toward class 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .smoothing import (
    Grid,
    LoessConfig,
    DensityEstimate,
    bandwidth_nrd0,
    density_grid,
    kde_on_grid,
    loess_fit,
    smooth_densities,
)

MASK_THRESHOLD = 0.1
MIN_CLASS_OBS = 2


@dataclass(frozen=True)
class ClassPriors:
    pi1: float
    pi2: float

    def __post_init__(self):
        if not (0 < self.pi1 < 1 and 0 < self.pi2 < 1) or abs(self.pi1 + self.pi2 - 1) > 1e-12:
            raise ValueError(f"invalid class priors ({self.pi1}, {self.pi2})")

    @classmethod
    def from_labels(cls, labels) -> "ClassPriors":
        labels = np.asarray(labels)
        n = labels.size
        return cls(int(np.sum(labels == 1)) / n, int(np.sum(labels == 2)) / n)


@dataclass(frozen=True)
class MarginalPredictor:
    """Smoothed ``q`` on a 512-point grid; NaN marks masked (unusable) points.

    ``raw_q`` keeps the pre-smoothing values for inspection. A predictor is
    dead when it has no usable grid point; it then evaluates to missing
    everywhere.
    """

    grid: np.ndarray
    q_smooth: np.ndarray
    raw_q: np.ndarray
    mask: np.ndarray
    n_train_used: int
    priors: ClassPriors | None = None
    dead_reason: str = ""

    @property
    def dead(self) -> bool:
        return bool(self.dead_reason) or bool(np.all(self.mask))

    @property
    def lo(self) -> float:
        return float(self.grid[0])

    @property
    def hi(self) -> float:
        return float(self.grid[-1])

    def __call__(self, x):
        return evaluate(self, x)


def dead_predictor(values, reason: str, n_used: int = 0) -> MarginalPredictor:
    values = np.asarray(values, dtype=float)
    if values.size and np.ptp(values) > 0:
        grid = density_grid(values, bandwidth_nrd0(values)).points
    elif values.size:
        grid = np.full(Grid.between(0, 1).points.size, float(values[0]))
    else:
        grid = np.full(Grid.between(0, 1).points.size, math.nan)
    nan = np.full(grid.size, math.nan)
    return MarginalPredictor(grid, nan, nan.copy(), np.ones(grid.size, dtype=bool), n_used,
                             None, reason)


def class_densities(col, labels, cfg: LoessConfig = LoessConfig()):
    """Smoothed class densities on one shared grid.

    Returns ``(g1, g2, priors, grid, scale)``, or ``None`` when a class has
    fewer than two observed values or the pooled values are constant.
    ``scale`` is the pooled standard deviation.
    """
    col = np.asarray(col, dtype=float)
    labels = np.asarray(labels)
    obs = ~np.isnan(col)
    x, y = col[obs], labels[obs]
    x1, x2 = x[y == 1], x[y == 2]
    if x1.size < MIN_CLASS_OBS or x2.size < MIN_CLASS_OBS or np.ptp(x) == 0:
        return None
    bw = bandwidth_nrd0(x)
    grid = density_grid(x, bw)
    g1, g2 = smooth_densities(DensityEstimate(grid, kde_on_grid(x1, bw, grid.points), bw),
                              DensityEstimate(grid, kde_on_grid(x2, bw, grid.points), bw),
                              cfg=cfg)
    priors = ClassPriors(x1.size / x.size, x2.size / x.size)
    return g1, g2, priors, grid, float(np.std(x, ddof=1))


def raw_q(g1, g2, priors: ClassPriors, threshold: float = MASK_THRESHOLD):
    """Normalized density difference; NaN where the mixture density is below ``threshold``."""
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    mix = priors.pi1 * g1 + priors.pi2 * g2
    with np.errstate(divide="ignore", invalid="ignore"):
        q = (g1 - g2) / mix
    q = np.where(mix < threshold, math.nan, q)
    return q if q.ndim else float(q)


def fit_marginal(col, labels, cfg: LoessConfig = LoessConfig(),
                 threshold: float = MASK_THRESHOLD, standardize: bool = True) -> MarginalPredictor:
    """Fit the smoothed predictor of one feature.

    With ``standardize`` the mask threshold applies to the densities of the
    z-scored feature (raw density times the pooled standard deviation),
    which makes masking independent of the feature's units. ``q`` itself is
    unit-free either way.
    """
    col = np.asarray(col, dtype=float)
    obs = ~np.isnan(col)
    dens = class_densities(col, labels, cfg)
    if dens is None:
        return dead_predictor(col[obs], "fewer than 2 observations in a class or constant feature",
                              int(obs.sum()))
    g1, g2, priors, grid, sd = dens
    unit = sd if standardize else 1.0
    q = raw_q(g1.values * unit, g2.values * unit, priors, threshold)
    mask = np.isnan(q)
    pts = grid.points
    if np.count_nonzero(~mask) < 2:
        p = dead_predictor(col[obs], "fewer than 2 grid points above the density threshold",
                           int(obs.sum()))
        return MarginalPredictor(np.array(pts), p.q_smooth, q, p.mask, p.n_train_used, priors,
                                 p.dead_reason)
    smooth = np.full(pts.size, math.nan)
    keep = ~mask
    smooth[keep] = loess_fit(pts[keep], q[keep], pts[keep], cfg)
    return MarginalPredictor(np.array(pts), smooth, q, mask, int(obs.sum()), priors)


def evaluate(p: MarginalPredictor, x):
    """Piecewise-linear evaluation of ``q_smooth``; NaN means missing.

    Inside the grid the two bracketing nodes are interpolated, and the result
    is missing if either is masked (a node hit exactly only needs itself).
    Outside the grid the nearest endpoint value is used.
    """
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.full(flat.size, math.nan)
    if p.dead:
        return out.reshape(x.shape) if x.ndim else math.nan
    g = p.grid
    q = np.where(p.mask, math.nan, p.q_smooth)
    n = g.size
    ok = ~np.isnan(flat)
    xv = flat[ok]
    k = np.clip(np.searchsorted(g, xv, side="right") - 1, 0, n - 2)
    left, right = q[k], q[k + 1]
    frac = (xv - g[k]) / (g[k + 1] - g[k])
    val = left + (right - left) * frac
    val = np.where(frac == 0.0, left, val)
    val = np.where(frac == 1.0, right, val)
    val = np.where(xv <= g[0], q[0], val)
    val = np.where(xv >= g[-1], q[-1], val)
    out[ok] = val
    return out.reshape(x.shape) if x.ndim else float(out[0])
