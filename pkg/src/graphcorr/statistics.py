"""Graph correlation statistics.

All three statistics share the signature ``statistic(x, y) -> GCorrStatistic``:

* ``pearson`` -- Pearson correlation of the vectorised strict upper triangles.
* ``dcorr`` -- unbiased (U-centred) distance correlation of the
  kernel-induced distance matrices.
* ``mgc`` -- multiscale graph correlation: the smoothed maximum over the grid
  of local distance correlations, falling back to ``dcorr`` at the global scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import ndimage
from scipy import stats as sps

from .errors import ConstantInput, DimensionMismatch, TooFewSamples
from .graph import as_array, kernel_to_distance

METHODS = ("pearson", "dcorr", "mgc")


@dataclass(frozen=True)
class GCorrStatistic:
    value: float
    method: str
    scale: Optional[tuple[int, int]] = None

    def __float__(self):
        return float(self.value)

    def to_dict(self) -> dict:
        out = {"value": self.value, "method": self.method}
        if self.scale is not None:
            out["scale"] = list(self.scale)
        return out


def _pair(x, y):
    a, b = as_array(x), as_array(y)
    if a.shape != b.shape:
        raise DimensionMismatch(f"graphs differ in shape: {a.shape} vs {b.shape}")
    return a, b


# ---------------------------------------------------------------- pearson


def _pearson_vectors(u: np.ndarray, v: np.ndarray) -> float:
    u = u - u.mean()
    v = v - v.mean()
    su = np.dot(u, u)
    sv = np.dot(v, v)
    if su <= 0 or sv <= 0:
        raise ConstantInput("Pearson correlation undefined for a constant edge vector")
    return float(np.clip(np.dot(u, v) / np.sqrt(su * sv), -1.0, 1.0))


def pearson_graph(x, y) -> GCorrStatistic:
    a, b = _pair(x, y)
    iu = np.triu_indices(a.shape[0], k=1)
    return GCorrStatistic(_pearson_vectors(a[iu], b[iu]), "pearson")


# ---------------------------------------------------------------- dcorr


def u_center(d) -> np.ndarray:
    """U-centre a distance matrix (zero diagonal, zero off-diagonal row sums)."""
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if n < 4:
        raise TooFewSamples(f"U-centring needs n >= 4, got {n}")
    rows = d.sum(axis=1)
    cols = d.sum(axis=0)
    total = rows.sum()
    out = d - rows[:, None] / (n - 2) - cols[None, :] / (n - 2) + total / ((n - 1) * (n - 2))
    np.fill_diagonal(out, 0.0)
    return out


def dcov_unbiased(cx, cy) -> float:
    """Unbiased distance covariance from two U-centred matrices."""
    cx = np.asarray(cx, dtype=float)
    cy = np.asarray(cy, dtype=float)
    if cx.shape != cy.shape:
        raise DimensionMismatch(f"centred matrices differ in shape: {cx.shape} vs {cy.shape}")
    n = cx.shape[0]
    if n < 4:
        raise TooFewSamples(f"unbiased distance covariance needs n >= 4, got {n}")
    # diagonals are zero, so the full elementwise sum is the i != j sum
    return float(np.vdot(cx, cy) / (n * (n - 3)))


def _normalise(cov: float, var_x: float, var_y: float) -> float:
    if var_x <= 0 or var_y <= 0:
        return 0.0
    return float(np.clip(cov / np.sqrt(var_x * var_y), -1.0, 1.0))


def dcorr_graph(x, y) -> GCorrStatistic:
    a, b = _pair(x, y)
    ca = u_center(kernel_to_distance(a))
    cb = u_center(kernel_to_distance(b))
    value = _normalise(dcov_unbiased(ca, cb), dcov_unbiased(ca, ca), dcov_unbiased(cb, cb))
    return GCorrStatistic(value, "dcorr")


# ---------------------------------------------------------------- mgc


def _row_ranks(d: np.ndarray) -> np.ndarray:
    """1-based within-row ranks; tied distances share the smallest rank.

    Sharing ranks keeps the grid independent of vertex order.  With binary
    graphs every neighbour enters at the same scale, so index order never
    decides which tied neighbours are inside a neighbourhood.
    """
    return sps.rankdata(d, method="min", axis=1).astype(np.intp)


class _LocalParts:
    """Per-graph pieces of the local correlation grid that do not depend on the partner graph."""

    __slots__ = ("c", "ranks", "mean", "var")

    def __init__(self, w: np.ndarray):
        d = kernel_to_distance(w)
        n = d.shape[0]
        self.c = u_center(d)
        self.ranks = _row_ranks(d)
        pairs = n * (n - 1)
        # mean of the truncated centred matrix at each neighbourhood size
        self.mean = np.bincount(self.ranks.ravel() - 1, weights=self.c.ravel(), minlength=n).cumsum() / pairs
        both = np.maximum(self.ranks, self.ranks.T)
        second = np.bincount(both.ravel() - 1, weights=(self.c * self.c.T).ravel(), minlength=n).cumsum() / pairs
        self.var = second - self.mean**2


def local_correlations(x, y) -> np.ndarray:
    """Grid of local distance correlations; entry ``[k-1, l-1]`` uses k and l neighbours.

    The bottom-right entry (all neighbours) equals the unbiased distance
    correlation.
    """
    a, b = _pair(x, y)
    return _local_grid(_LocalParts(a), _LocalParts(b))


def _local_grid(px: _LocalParts, py: _LocalParts) -> np.ndarray:
    n = px.c.shape[0]
    idx = (px.ranks - 1) * n + (py.ranks.T - 1)
    cross = np.bincount(idx.ravel(), weights=(px.c * py.c.T).ravel(), minlength=n * n).reshape(n, n)
    cross = cross.cumsum(axis=0).cumsum(axis=1) / (n * (n - 1))
    cov = cross - np.outer(px.mean, py.mean)
    denom = np.outer(px.var, py.var)
    grid = np.zeros((n, n))
    ok = (np.outer(px.var > 0, py.var > 0)) & (denom > 0)
    grid[ok] = cov[ok] / np.sqrt(denom[ok])
    np.clip(grid, -1.0, 1.0, out=grid)
    # the global entry is exactly dcorr; recompute it from the unbiased formula to avoid drift
    grid[-1, -1] = _normalise(np.vdot(px.c, py.c), np.vdot(px.c, px.c), np.vdot(py.c, py.c))
    return grid


@lru_cache(maxsize=256)
def _significance_threshold(n: int) -> float:
    # upper 0.02/n tail of the approximate null of an unbiased dcorr
    shape = n * (n - 3) / 4 - 0.5
    return float(sps.beta.ppf(1 - 0.02 / n, shape, shape) * 2 - 1)


def smooth_mgc(grid: np.ndarray) -> tuple[float, tuple[int, int]]:
    """Pick the MGC statistic and scale from a local correlation grid.

    The candidate region is the largest 4-connected component of scales whose
    local correlation exceeds both the global value and a significance
    threshold.  Its maximum is used only if the region covers at least 2n
    grid cells; otherwise the global scale is returned.
    """
    n = grid.shape[0]
    stat = float(grid[-1, -1])
    scale = (n, n)
    threshold = max(_significance_threshold(n), stat)
    above = grid > threshold
    if not above.any():
        return stat, scale
    labels, count = ndimage.label(above)
    sizes = np.bincount(labels.ravel())[1:]
    region = labels == (int(np.argmax(sizes)) + 1)
    if region.sum() < 2 * n:
        return stat, scale
    best = float(grid[region].max())
    if best < stat:
        return stat, scale
    hits = np.flatnonzero((grid >= best) & region)
    k, l = divmod(int(hits.max()), n)
    return best, (k + 1, l + 1)


def mgc_graph(x, y) -> GCorrStatistic:
    a, b = _pair(x, y)
    grid = _local_grid(_LocalParts(a), _LocalParts(b))
    value, scale = smooth_mgc(grid)
    return GCorrStatistic(value, "mgc", scale)


# ---------------------------------------------------------------- dispatch

_STATISTICS = {"pearson": pearson_graph, "dcorr": dcorr_graph, "mgc": mgc_graph}


def gcorr(x, y, method: str = "dcorr") -> GCorrStatistic:
    try:
        fn = _STATISTICS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}") from None
    return fn(x, y)


def against(y, method: str = "dcorr") -> Callable[[np.ndarray], GCorrStatistic]:
    """Statistic with the second graph fixed; caches its per-graph work.

    Used by the permutation loops, where ``y`` is compared against many
    permuted copies of ``x``.
    """
    b = as_array(y)
    if method == "pearson":
        iu = np.triu_indices(b.shape[0], k=1)
        vb = b[iu]

        def stat(x):
            a = as_array(x)
            if a.shape != b.shape:
                raise DimensionMismatch(f"graphs differ in shape: {a.shape} vs {b.shape}")
            return GCorrStatistic(_pearson_vectors(a[iu], vb), "pearson")

        return stat

    if method == "dcorr":
        cb = u_center(kernel_to_distance(b))
        var_b = dcov_unbiased(cb, cb)

        def stat(x):
            ca = u_center(kernel_to_distance(_pair(x, b)[0]))
            return GCorrStatistic(_normalise(dcov_unbiased(ca, cb), dcov_unbiased(ca, ca), var_b), "dcorr")

        return stat

    if method == "mgc":
        py = _LocalParts(b)

        def stat(x):
            grid = _local_grid(_LocalParts(_pair(x, b)[0]), py)
            value, scale = smooth_mgc(grid)
            return GCorrStatistic(value, "mgc", scale)

        return stat

    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
