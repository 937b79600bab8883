"""Density estimation and local linear regression kernels.

Densities use the cosine kernel ``K(u) = pi/4 * cos(pi*u/2)`` on ``|u| <= 1``,
evaluated exactly (no binning) on a 512-point grid that extends three
bandwidths past the data. LOESS is the non-robust, degree-1 variant with
tricube weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DataError

GRID_SIZE = 512
GRID_CUT = 3.0
DEFAULT_SPAN = 0.75


@dataclass(frozen=True)
class Grid:
    """Equally spaced evaluation points between ``lo`` and ``hi``."""

    lo: float
    hi: float
    points: np.ndarray

    @classmethod
    def between(cls, lo: float, hi: float, size: int = GRID_SIZE) -> "Grid":
        points = np.linspace(lo, hi, size)
        points.setflags(write=False)
        return cls(float(lo), float(hi), points)

    def __len__(self):
        return self.points.size


@dataclass(frozen=True)
class DensityEstimate:
    grid: Grid
    values: np.ndarray
    bandwidth: float

    def integral(self) -> float:
        return float(np.trapezoid(self.values, self.grid.points))


@dataclass(frozen=True)
class LoessConfig:
    span: float = DEFAULT_SPAN
    degree: int = 1

    def __post_init__(self):
        if self.degree != 1:
            raise ValueError("only degree-1 LOESS is supported")
        if not 0.0 < self.span <= 1.0:
            raise ValueError(f"span must lie in (0, 1], got {self.span}")


def bandwidth_nrd0(xs) -> float:
    """Silverman's rule of thumb, ``0.9 * min(sd, IQR/1.34) * n**(-1/5)``.

    When one of sd and IQR is zero the other one is used. When both vanish
    (constant data, or a single observation) the result falls back to
    ``max(1e-3 * max|x|, 1e-6)``.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    if xs.size == 0:
        raise DataError("bandwidth of an empty sample")
    n = xs.size
    sd = float(np.std(xs, ddof=1)) if n > 1 else 0.0
    q75, q25 = np.percentile(xs, [75, 25])
    iqr = float(q75 - q25) / 1.34
    spread = min(sd, iqr) if (sd > 0 and iqr > 0) else max(sd, iqr)
    bw = 0.9 * spread * n ** (-0.2)
    if bw > 0:
        return bw
    return max(1e-3 * float(np.max(np.abs(xs))), 1e-6)


def cosine_kernel(u):
    u = np.asarray(u, dtype=float)
    return np.where(np.abs(u) <= 1.0, (math.pi / 4.0) * np.cos(0.5 * math.pi * u), 0.0)


def kde_on_grid(xs, bw: float, points) -> np.ndarray:
    """Cosine-kernel density of ``xs`` evaluated at ``points``."""
    xs = np.asarray(xs, dtype=float).ravel()
    points = np.asarray(points, dtype=float)
    if xs.size == 0:
        raise DataError("density of an empty sample")
    if not bw > 0:
        raise DataError(f"bandwidth must be positive, got {bw}")
    out = np.zeros(points.shape, dtype=float)
    # chunk over samples to bound memory at ~4M cells
    step = max(1, 4_000_000 // max(points.size, 1))
    for start in range(0, xs.size, step):
        u = (points[:, None] - xs[None, start:start + step]) / bw
        out += cosine_kernel(u).sum(axis=1)
    return out / (xs.size * bw)


def density_grid(xs, bw: float) -> Grid:
    xs = np.asarray(xs, dtype=float)
    return Grid.between(float(xs.min()) - GRID_CUT * bw, float(xs.max()) + GRID_CUT * bw)


def kde_cosine(xs, bw: float | None = None) -> DensityEstimate:
    """Kernel density estimate on 512 points spanning ``[min - 3bw, max + 3bw]``."""
    xs = np.asarray(xs, dtype=float).ravel()
    if xs.size == 0 or not np.all(np.isfinite(xs)):
        raise DataError("kde_cosine needs a non-empty finite sample")
    if bw is None:
        bw = bandwidth_nrd0(xs)
    grid = density_grid(xs, bw)
    return DensityEstimate(grid, kde_on_grid(xs, bw, grid.points), float(bw))


def loess_matrix(x, targets, cfg: LoessConfig = LoessConfig()) -> np.ndarray:
    """Linear operator ``L`` such that ``L @ y`` is the LOESS fit of ``y`` at ``targets``.

    For each target the ``ceil(span * n)`` nearest points receive tricube
    weights relative to the largest distance among them, and a weighted
    least-squares line is fitted. Where the weighted design is degenerate
    (a single distinct abscissa) the row of ``L`` gives the weighted mean.
    """
    x = np.asarray(x, dtype=float).ravel()
    t = np.asarray(targets, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise DataError("loess needs at least 2 points")
    q = min(n, max(1, math.ceil(cfg.span * n)))

    u = x[None, :] - t[:, None]
    dist = np.abs(u)
    dmax = np.partition(dist, q - 1, axis=1)[:, q - 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = dist / dmax[:, None]
    # zero-radius window: every point at the target location gets full weight
    r = np.where(dmax[:, None] > 0, r, np.where(dist == 0, 0.0, np.inf))
    w = np.where(r < 1.0, (1.0 - r ** 3) ** 3, 0.0)

    s0 = w.sum(axis=1)
    s1 = (w * u).sum(axis=1)
    s2 = (w * u * u).sum(axis=1)
    det = s0 * s2 - s1 * s1
    scale = np.where(dmax > 0, dmax, 1.0)
    ok = det > 1e-10 * s0 * s0 * scale * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        line = w * (s2[:, None] - s1[:, None] * u) / det[:, None]
        mean = w / s0[:, None]
    return np.where(ok[:, None], line, mean)


def loess_fit(x, y, targets, cfg: LoessConfig = LoessConfig()) -> np.ndarray:
    """Degree-1 LOESS of ``y`` on ``x`` evaluated at ``targets``.

    ``y`` may be 2-d with one column per response; all columns share the
    same local weights.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if y.shape[0] != x.size:
        raise DataError("x and y differ in length")
    fitted = loess_matrix(x, targets, cfg) @ y
    if not np.all(np.isfinite(fitted)):
        raise DataError("loess produced non-finite values")
    return fitted.reshape(targets.shape + y.shape[1:])


def smooth_densities(*estimates: DensityEstimate, cfg: LoessConfig = LoessConfig()):
    """LOESS-smooth densities sharing one grid onto that grid, clamping negatives to zero."""
    grid = estimates[0].grid
    pts = grid.points
    op = loess_matrix(pts, pts, cfg)
    # one matrix-vector product per density keeps each result independent of its position
    return [DensityEstimate(grid, np.maximum(op @ e.values, 0.0), e.bandwidth)
            for e in estimates]
