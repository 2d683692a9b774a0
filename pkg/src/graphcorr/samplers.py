"""Samplers for rho-correlated Bernoulli and Gaussian ER/SBM graph pairs.

Edge pairs are drawn in row-major upper-triangle order, so a seeded
generator reproduces the same pair of graphs on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMarginal, DimensionMismatch, InvalidCovariance, RhoOutOfRange, ValidationError
from .graph import AdjacencyMatrix, CommunityAssignment, as_assignment, from_upper

# conditional probabilities may overshoot [0, 1] by rounding at the interval endpoints
_CLAMP_TOL = 1e-12


def rho_bounds(p: float, q: float) -> tuple[float, float]:
    """Closed interval of admissible edge correlations for Bernoulli(p), Bernoulli(q)."""
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise DegenerateMarginal(f"marginals must lie strictly inside (0, 1), got p={p}, q={q}; use rho=0")
    a = p * q / ((1 - p) * (1 - q))
    b = p * (1 - q) / (q * (1 - p))
    lo = max(-a, -1.0 / a)
    hi = min(b, 1.0 / b)
    return lo, hi


def _check_rho(p: float, q: float, rho: float) -> None:
    if p in (0.0, 1.0) or q in (0.0, 1.0):
        if rho != 0:
            raise RhoOutOfRange(f"p={p}, q={q} is degenerate; only rho=0 is allowed")
        return
    lo, hi = rho_bounds(p, q)
    if not lo <= rho <= hi:
        raise RhoOutOfRange(f"rho={rho} outside [{lo:.6g}, {hi:.6g}] for p={p}, q={q}")


def conditional_probs(p, q, rho):
    """P(Y=1 | X=1) and P(Y=1 | X=0), elementwise, clamped into [0, 1]."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    spread = q * (1 - q)
    with np.errstate(divide="ignore", invalid="ignore"):
        up = np.where(p > 0, np.sqrt(np.where(p > 0, (1 - p) / p, 0.0) * spread), 0.0)
        down = np.where(p < 1, np.sqrt(np.where(p < 1, p / (1 - p), 0.0) * spread), 0.0)
    given1 = q + rho * up
    given0 = q - rho * down
    for arr in (given1, given0):
        if np.any(arr < -_CLAMP_TOL) or np.any(arr > 1 + _CLAMP_TOL):
            raise RhoOutOfRange(f"rho={rho} produces conditional probabilities outside [0, 1]")
    return np.clip(given1, 0.0, 1.0), np.clip(given0, 0.0, 1.0)


def sample_correlated_bernoulli_edge(p: float, q: float, rho: float, rng) -> tuple[int, int]:
    _check_rho(p, q, rho)
    given1, given0 = conditional_probs(p, q, rho)
    x = rng.random() < p
    y = rng.random() < (given1 if x else given0)
    return int(x), int(y)


def _square(name, a, k):
    a = np.asarray(a, dtype=float)
    if a.shape != (k, k):
        raise DimensionMismatch(f"{name} must be {k}x{k}, got {a.shape}")
    if not np.allclose(a, a.T):
        raise ValidationError(f"{name} must be symmetric")
    return a


@dataclass(frozen=True)
class CorrelatedBernoulliParams:
    bx: np.ndarray
    by: np.ndarray
    rho: float
    z: CommunityAssignment

    def __post_init__(self):
        z = as_assignment(self.z)
        object.__setattr__(self, "z", z)
        bx = _square("bx", self.bx, z.k)
        by = _square("by", self.by, z.k)
        if np.any((bx < 0) | (bx > 1)) or np.any((by < 0) | (by > 1)):
            raise ValidationError("block probabilities must lie in [0, 1]")
        object.__setattr__(self, "bx", bx)
        object.__setattr__(self, "by", by)
        for i in range(z.k):
            for j in range(i, z.k):
                try:
                    _check_rho(bx[i, j], by[i, j], self.rho)
                except RhoOutOfRange as exc:
                    raise RhoOutOfRange(f"block ({i}, {j}): {exc}") from None


@dataclass(frozen=True)
class CorrelatedGaussianParams:
    mux: np.ndarray
    muy: np.ndarray
    sigx: np.ndarray
    sigy: np.ndarray
    rho: float
    z: CommunityAssignment

    def __post_init__(self):
        z = as_assignment(self.z)
        object.__setattr__(self, "z", z)
        for name in ("mux", "muy", "sigx", "sigy"):
            object.__setattr__(self, name, _square(name, getattr(self, name), z.k))
        if np.any(self.sigx <= 0) or np.any(self.sigy <= 0):
            raise InvalidCovariance("block standard deviations must be positive")
        if not abs(self.rho) < 1:
            raise InvalidCovariance(f"|rho| must be < 1 for a positive definite covariance, got {self.rho}")


def _pair_blocks(z: CommunityAssignment):
    n = z.n
    iu, ju = np.triu_indices(n, k=1)
    return n, z.z[iu], z.z[ju]


def sample_bernoulli_upper(params: CorrelatedBernoulliParams, rng) -> tuple[np.ndarray, np.ndarray]:
    """Upper-triangle edge vectors of a correlated Bernoulli SBM pair."""
    n, bi, bj = _pair_blocks(params.z)
    p = params.bx[bi, bj]
    q = params.by[bi, bj]
    given1, given0 = conditional_probs(p, q, params.rho)
    u = rng.random((2, p.size))
    x = u[0] < p
    y = u[1] < np.where(x, given1, given0)
    return x.astype(float), y.astype(float)


def sample_gaussian_upper(params: CorrelatedGaussianParams, rng) -> tuple[np.ndarray, np.ndarray]:
    n, bi, bj = _pair_blocks(params.z)
    g = rng.standard_normal((2, bi.size))
    rho = params.rho
    x = params.mux[bi, bj] + params.sigx[bi, bj] * g[0]
    y = params.muy[bi, bj] + params.sigy[bi, bj] * (rho * g[0] + math.sqrt(1 - rho * rho) * g[1])
    return x, y


def sample_correlated_bernoulli_sbm(params: CorrelatedBernoulliParams, rng) -> tuple[AdjacencyMatrix, AdjacencyMatrix]:
    """Draw a rho-correlated Bernoulli SBM pair; ER is the one-block case."""
    x, y = sample_bernoulli_upper(params, rng)
    n = params.z.n
    return AdjacencyMatrix(from_upper(x, n)), AdjacencyMatrix(from_upper(y, n))


def sample_correlated_gaussian_sbm(params: CorrelatedGaussianParams, rng) -> tuple[AdjacencyMatrix, AdjacencyMatrix]:
    """Draw a pair of weighted graphs whose matched edges are bivariate normal."""
    x, y = sample_gaussian_upper(params, rng)
    n = params.z.n
    return AdjacencyMatrix(from_upper(x, n)), AdjacencyMatrix(from_upper(y, n))


def sample_pair(params, rng) -> tuple[AdjacencyMatrix, AdjacencyMatrix]:
    if isinstance(params, CorrelatedGaussianParams):
        return sample_correlated_gaussian_sbm(params, rng)
    return sample_correlated_bernoulli_sbm(params, rng)
