"""Joint community estimation for two vertex-matched graphs.

Adjacency spectral embedding of each graph, an SVD of the concatenated
embeddings, and Gaussian-mixture clustering of the joint latent positions,
with the number of blocks optionally chosen by BIC.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.cluster.vq import kmeans2
from scipy.special import logsumexp

from .errors import DegenerateCluster, DimensionMismatch, EigenFailure, ValidationError
from .graph import CommunityAssignment, as_array


@dataclass(frozen=True)
class Embedding:
    coords: np.ndarray
    values: Optional[np.ndarray] = None  # eigen/singular values backing each column

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 2 or c.shape[1] < 1:
            raise ValidationError(f"embedding must be n x d with d >= 1, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise EigenFailure("embedding has non-finite entries")
        object.__setattr__(self, "coords", c)

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    @property
    def n(self) -> int:
        return self.coords.shape[0]


def _fix_signs(v: np.ndarray) -> np.ndarray:
    """Flip columns so each column's largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return v * signs


def _eigh(w: np.ndarray):
    try:
        return linalg.eigh(w)
    except linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc


def _ase_from_eig(vals, vecs, d):
    top = np.argsort(-np.abs(vals), kind="stable")[:d]
    lam = vals[top]
    v = _fix_signs(vecs[:, top])
    return Embedding(v * np.sqrt(np.abs(lam)), lam)


def ase(x, d: int) -> Embedding:
    """Adjacency spectral embedding ``V |L|^(1/2)`` from the d largest-|eigenvalue| pairs."""
    w = as_array(x)
    n = w.shape[0]
    if not 1 <= d <= n:
        raise ValidationError(f"embedding dimension must be in [1, {n}], got {d}")
    if not np.any(w):
        warnings.warn("embedding an all-zero graph; returning zero coordinates", stacklevel=2)
        return Embedding(np.zeros((n, d)), np.zeros(d))
    vals, vecs = _eigh(w)
    return _ase_from_eig(vals, vecs, d)


def _joint_from_ases(r1: np.ndarray, r2: np.ndarray, d: int) -> Embedding:
    u = np.hstack([r1, r2])
    try:
        left, sv, _ = linalg.svd(u, full_matrices=False)
    except linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    return Embedding(_fix_signs(left[:, :d]), sv[:d])


def joint_embed(x1, x2, d: int) -> Embedding:
    """Leading d left singular vectors of the column-concatenated ASEs."""
    a, b = as_array(x1), as_array(x2)
    if a.shape != b.shape:
        raise DimensionMismatch(f"graphs differ in shape: {a.shape} vs {b.shape}")
    return _joint_from_ases(ase(a, d).coords, ase(b, d).coords, d)


# ---------------------------------------------------------------- elbow


def profile_loglik(values) -> np.ndarray:
    """Two-group Gaussian profile log-likelihood for each split ``q = 1..p-1``.

    Group one is ``values[:q]``, group two the rest; both share a pooled
    variance.  A zero pooled variance gives ``+inf``.
    """
    x = np.asarray(values, dtype=float)
    p = x.size
    out = np.empty(p - 1)
    for q in range(1, p):
        a, b = x[:q], x[q:]
        ss = np.sum((a - a.mean()) ** 2) + np.sum((b - b.mean()) ** 2)
        var = ss / (p - 2) if p > 2 else ss
        if var <= 0:
            out[q - 1] = np.inf
        else:
            out[q - 1] = -0.5 * p * math.log(2 * math.pi * var) - ss / (2 * var)
    return out


def select_dim(singular_values, n_elbows: int = 1) -> int:
    """Profile-likelihood elbow of a nonincreasing spectrum.

    With ``n_elbows > 1`` the search is repeated on the values after the
    previous elbow and the position of the last elbow is returned.  Ties go
    to the smallest dimension.
    """
    x = np.asarray(singular_values, dtype=float)
    if x.size < 2:
        raise ValidationError("need at least two values to locate an elbow")
    pos = 0
    for _ in range(n_elbows):
        rest = x[pos:]
        if rest.size < 2:
            break
        ll = profile_loglik(rest)
        pos += int(np.argmax(ll)) + 1
    return pos


# ---------------------------------------------------------------- gmm


@dataclass(frozen=True)
class GmmModel:
    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    loglik: float
    n: int
    converged: bool = True
    n_iter: int = 0
    trace: tuple = field(default=(), repr=False)

    @property
    def k(self) -> int:
        return self.weights.size

    @property
    def d(self) -> int:
        return self.means.shape[1]

    @property
    def n_params(self) -> int:
        k, d = self.k, self.d
        return k - 1 + k * d + k * d * (d + 1) // 2

    @property
    def bic(self) -> float:
        return -2.0 * self.loglik + self.n_params * math.log(self.n)

    def log_resp(self, data) -> np.ndarray:
        lp = _log_weighted_density(np.asarray(data, dtype=float), self.weights, self.means, self.covariances)
        return lp - logsumexp(lp, axis=1, keepdims=True)

    def predict(self, data) -> np.ndarray:
        return np.argmax(self.log_resp(data), axis=1)


def _log_weighted_density(x, weights, means, covs):
    n, d = x.shape
    out = np.empty((n, weights.size))
    for j in range(weights.size):
        try:
            chol = linalg.cholesky(covs[j], lower=True)
        except linalg.LinAlgError as exc:
            raise DegenerateCluster(f"component {j} covariance is not positive definite") from exc
        sol = linalg.solve_triangular(chol, (x - means[j]).T, lower=True)
        logdet = 2.0 * np.sum(np.log(np.diag(chol)))
        out[:, j] = math.log(weights[j]) - 0.5 * (d * math.log(2 * math.pi) + logdet + np.sum(sol**2, axis=0))
    return out


def _m_step(x, resp, floor):
    n, d = x.shape
    nk = resp.sum(axis=0)
    if np.any(nk < 1e-8 * n):
        raise DegenerateCluster("a mixture component lost all of its points")
    weights = nk / n
    means = (resp.T @ x) / nk[:, None]
    covs = np.empty((nk.size, d, d))
    for j in range(nk.size):
        diff = x - means[j]
        covs[j] = (resp[:, j, None] * diff).T @ diff / nk[j]
        covs[j].flat[:: d + 1] += floor
    return weights, means, covs


def _kmeanspp(x, k, rng):
    n = x.shape[0]
    centers = [x[rng.integers(n)]]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d2 / total)
        centers.append(x[idx])
        d2 = np.minimum(d2, np.sum((x - x[idx]) ** 2, axis=1))
    return np.asarray(centers)


def _covariance_floor(x):
    d = x.shape[1]
    spread = np.trace(np.atleast_2d(np.cov(x, rowvar=False, bias=True))) if x.shape[0] > 1 else 0.0
    return 1e-6 * spread / d if spread > 0 else 1e-6


def _em_once(x, k, rng, floor, max_iter, tol):
    n = x.shape[0]
    centers = _kmeanspp(x, k, rng)
    nearest = np.argmin(((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2), axis=1)
    resp = np.zeros((n, k))
    resp[np.arange(n), nearest] = 1.0
    weights, means, covs = _m_step(x, resp, floor)
    trace = []
    converged = False
    for it in range(max_iter):
        lp = _log_weighted_density(x, weights, means, covs)
        norm = logsumexp(lp, axis=1)
        ll = float(norm.sum())
        trace.append(ll)
        if len(trace) > 1 and abs(trace[-1] - trace[-2]) < tol * abs(trace[-2]):
            converged = True
            break
        resp = np.exp(lp - norm[:, None])
        weights, means, covs = _m_step(x, resp, floor)
    return GmmModel(weights, means, covs, trace[-1], n, converged, len(trace), tuple(trace))


def gmm_fit(e, k: int, rng, restarts: int = 3, max_iter: int = 300, tol: float = 1e-6) -> GmmModel:
    """Full-covariance Gaussian mixture by EM; best log-likelihood of ``restarts`` k-means++ starts."""
    x = e.coords if isinstance(e, Embedding) else np.atleast_2d(np.asarray(e, dtype=float))
    n, d = x.shape
    if k < 1 or n < k:
        raise ValidationError(f"need 1 <= k <= n, got k={k}, n={n}")
    floor = _covariance_floor(x)
    if k == 1:
        resp = np.ones((n, 1))
        weights, means, covs = _m_step(x, resp, floor)
        ll = float(logsumexp(_log_weighted_density(x, weights, means, covs), axis=1).sum())
        return GmmModel(weights, means, covs, ll, n, True, 1, (ll,))
    best = None
    failures = []
    for _ in range(restarts):
        try:
            model = _em_once(x, k, rng, floor, max_iter, tol)
        except DegenerateCluster as exc:
            failures.append(str(exc))
            continue
        if best is None or model.loglik > best.loglik:
            best = model
    if best is None:
        raise DegenerateCluster(f"all {restarts} EM restarts degenerated: {failures[-1]}")
    return best


# ---------------------------------------------------------------- block estimation


@dataclass(frozen=True)
class BlockEstimate:
    z: CommunityAssignment
    d: int
    k: int
    bic: dict = field(default_factory=dict)  # candidate k -> BIC (fitted models only)
    method: str = "gmm"


def joint_spectrum(x, y) -> np.ndarray:
    """Singular values of the concatenation of both full-rank ASEs, largest first."""
    a, b = as_array(x), as_array(y)
    va, ua = _eigh(a)
    vb, ub = _eigh(b)
    u = np.hstack([ua * np.sqrt(np.abs(va)), ub * np.sqrt(np.abs(vb))])
    return linalg.svd(u, compute_uv=False)


def _kmeans_labels(v, k, rng):
    seed = int(rng.integers(2**31 - 1))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, labels = kmeans2(v, k, minit="++", seed=seed)
    return labels


def estimate_blocks(
    x,
    y,
    k: Optional[int] = None,
    d: Optional[int] = None,
    kmax: Optional[int] = None,
    rng=None,
    n_elbows: int = 1,
) -> BlockEstimate:
    """Estimate a shared community assignment from two matched graphs.

    ``d`` defaults to the ``n_elbows``-th profile-likelihood elbow of the
    joint spectrum, raised to ``k`` when ``k`` is given.  With ``k`` given a single mixture is fitted (k-means is
    the fallback if every EM restart degenerates); otherwise k = 1..kmax are
    fitted and the lowest BIC among converged fits wins.  ``k >= n`` puts
    every vertex in its own block.
    """
    a, b = as_array(x), as_array(y)
    if a.shape != b.shape:
        raise DimensionMismatch(f"graphs differ in shape: {a.shape} vs {b.shape}")
    n = a.shape[0]
    rng = np.random.default_rng(rng)
    if k is not None:
        if k < 1:
            raise ValidationError(f"k must be positive, got {k}")
        if k == 1:
            return BlockEstimate(CommunityAssignment(np.zeros(n, dtype=int)), d or 0, 1, method="trivial")
        if k >= n:
            return BlockEstimate(CommunityAssignment(np.arange(n)), d or 0, n, method="trivial")

    va, ua = _eigh(a)
    vb, ub = _eigh(b)
    if d is None:
        full = np.hstack([ua * np.sqrt(np.abs(va)), ub * np.sqrt(np.abs(vb))])
        spectrum = linalg.svd(full, compute_uv=False)[:n]
        d = select_dim(spectrum, n_elbows=n_elbows)
        if k is not None:
            # k blocks need up to k directions; the leading one mostly carries degree
            d = max(d, k)
    if not 1 <= d <= n:
        raise ValidationError(f"embedding dimension must be in [1, {n}], got {d}")
    emb = _joint_from_ases(_ase_from_eig(va, ua, d).coords, _ase_from_eig(vb, ub, d).coords, d)

    if k is not None:
        try:
            model = gmm_fit(emb, k, rng)
        except DegenerateCluster:
            return BlockEstimate(CommunityAssignment(_kmeans_labels(emb.coords, k, rng)), d, k, method="kmeans")
        return BlockEstimate(CommunityAssignment(model.predict(emb.coords)), d, k, {k: model.bic})

    kmax = kmax or max(1, math.isqrt(n))
    bics = {}
    best = None
    for kk in range(1, min(kmax, n) + 1):
        try:
            model = gmm_fit(emb, kk, rng)
        except DegenerateCluster:
            continue
        if not model.converged:
            continue
        bics[kk] = model.bic
        if best is None or (model.bic, kk) < (best.bic, best.k):
            best = model
    if best is None:
        raise DegenerateCluster("no candidate mixture converged")
    return BlockEstimate(CommunityAssignment(best.predict(emb.coords)), d, best.k, bics)


def block_estimation(x, y, k: Optional[int] = None, **kwargs) -> CommunityAssignment:
    return estimate_blocks(x, y, k, **kwargs).z
