"""Graph domain types and the matrix utilities shared by every other module."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import AllZeroMatrix, DimensionMismatch, ValidationError

_SYM_ATOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Symmetric, hollow n x n edge-weight matrix.

    Binary graphs simply use weights in {0, 1}.  ``labels`` optionally names
    the vertices (used by the edge-list readers and writers).
    """

    w: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DimensionMismatch(f"adjacency must be square, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValidationError("adjacency contains non-finite entries")
        if not np.allclose(w, w.T, rtol=0.0, atol=_SYM_ATOL):
            raise ValidationError("adjacency matrix is not symmetric")
        if np.any(np.diag(w) != 0):
            raise ValidationError("adjacency matrix has nonzero diagonal (self-loops)")
        object.__setattr__(self, "w", _frozen(w))
        if self.labels is not None:
            labels = tuple(str(v) for v in self.labels)
            if len(labels) != w.shape[0]:
                raise DimensionMismatch(f"{len(labels)} labels for {w.shape[0]} vertices")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.w == 0) | (self.w == 1)))

    def binarize(self) -> "AdjacencyMatrix":
        return AdjacencyMatrix((self.w > 0).astype(float), self.labels)


@dataclass(frozen=True)
class CommunityAssignment:
    """Vertex to block map.

    Labels are stored canonicalised to ``0..k-1`` (order of the original label
    values is kept), so every block referenced is nonempty by construction.
    """

    z: np.ndarray
    k: int = field(init=False)

    def __post_init__(self):
        raw = np.asarray(self.z)
        if raw.ndim != 1 or raw.size == 0:
            raise ValidationError("community assignment must be a nonempty 1-d vector")
        _, inv = np.unique(raw, return_inverse=True)
        inv = inv.astype(np.intp).reshape(-1)
        inv.setflags(write=False)
        object.__setattr__(self, "z", inv)
        object.__setattr__(self, "k", int(inv.max()) + 1)

    @property
    def n(self) -> int:
        return self.z.shape[0]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.z, minlength=self.k)

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "CommunityAssignment":
        return cls(np.repeat(np.arange(len(sizes)), sizes))


def as_array(x) -> np.ndarray:
    """Weights of an ``AdjacencyMatrix`` or any square array-like."""
    if isinstance(x, AdjacencyMatrix):
        return x.w
    return np.asarray(x, dtype=float)


def as_assignment(z) -> CommunityAssignment:
    return z if isinstance(z, CommunityAssignment) else CommunityAssignment(z)


def kernel_to_distance(x) -> np.ndarray:
    """Kernel-induced distance ``1 - x / max(x)`` with a zero diagonal.

    The adjacency matrix is read as a similarity kernel; max-normalisation
    makes the result invariant to positive rescaling of ``x``.
    """
    w = as_array(x)
    top = w.max()
    if not top > 0:
        raise AllZeroMatrix("kernel_to_distance needs a positive maximum edge weight")
    if np.any(np.diag(w) != 0):
        warnings.warn("adjacency diagonal is not zero; forcing zero self-distance", stacklevel=2)
    d = 1.0 - w / top
    np.fill_diagonal(d, 0.0)
    return d


def sort_vertices(x, z) -> tuple[AdjacencyMatrix, CommunityAssignment]:
    """Reorder vertices so block labels are nondecreasing (stable within blocks)."""
    z = as_assignment(z)
    w = as_array(x)
    if w.shape[0] != z.n:
        raise DimensionMismatch(f"graph has {w.shape[0]} vertices, assignment has {z.n}")
    order = np.argsort(z.z, kind="stable")
    labels = None
    if isinstance(x, AdjacencyMatrix) and x.labels is not None:
        labels = tuple(x.labels[i] for i in order)
    return AdjacencyMatrix(w[np.ix_(order, order)], labels), CommunityAssignment(z.z[order])


def symmetrize_directed(w_directed) -> AdjacencyMatrix:
    """Average the two directed weights of each vertex pair; drop self-loops."""
    w = np.asarray(w_directed, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {w.shape}")
    out = (w + w.T) / 2.0
    np.fill_diagonal(out, 0.0)
    return AdjacencyMatrix(out)


def vectorize_upper(x) -> np.ndarray:
    """Strict upper triangle, row-major: (0,1), (0,2), ..., (n-2,n-1)."""
    w = as_array(x)
    return w[np.triu_indices(w.shape[0], k=1)]


def from_upper(v, n: int) -> np.ndarray:
    """Inverse of :func:`vectorize_upper`: mirror and zero the diagonal."""
    v = np.asarray(v, dtype=float)
    if v.shape != (n * (n - 1) // 2,):
        raise DimensionMismatch(f"need {n * (n - 1) // 2} upper entries for n={n}, got {v.shape}")
    w = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    w[iu] = v
    return w + w.T
