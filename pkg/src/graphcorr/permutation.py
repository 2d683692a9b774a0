"""Block permutation of an adjacency matrix."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch
from .graph import AdjacencyMatrix, CommunityAssignment, as_array, as_assignment


class BlockPermuter:
    """Precomputed block layout for repeatedly permuting graphs under one assignment.

    Vertices are sorted by block (stable), and the strict upper triangle of
    the sorted matrix is split into groups: the upper triangle of each
    diagonal block and the full rectangle of each off-diagonal block above
    the diagonal.  Lower-triangle blocks are never touched; the final mirror
    overwrites them.
    """

    def __init__(self, z):
        self.z = as_assignment(z)
        self.order = np.argsort(self.z.z, kind="stable")
        zs = self.z.z[self.order]
        n = zs.size
        iu, ju = np.triu_indices(n, k=1)
        self._iu, self._ju = iu, ju
        key = zs[iu] * self.z.k + zs[ju]
        # stable so each group keeps row-major order
        self._perm = np.argsort(key, kind="stable")
        bounds = np.flatnonzero(np.diff(key[self._perm])) + 1
        self._groups = [g for g in np.split(self._perm, bounds) if g.size > 1]

    @property
    def n(self) -> int:
        return self.z.n

    def sort(self, w: np.ndarray) -> np.ndarray:
        return w[np.ix_(self.order, self.order)]

    def permute_sorted(self, ws: np.ndarray, rng) -> np.ndarray:
        """Permute an already vertex-sorted matrix."""
        vals = ws[self._iu, self._ju]
        out_vals = vals.copy()
        for g in self._groups:
            out_vals[g] = vals[g[rng.permutation(g.size)]]
        out = np.zeros_like(ws)
        out[self._iu, self._ju] = out_vals
        return out + out.T

    def __call__(self, x, rng) -> np.ndarray:
        w = as_array(x)
        if w.shape[0] != self.n:
            raise DimensionMismatch(f"graph has {w.shape[0]} vertices, assignment has {self.n}")
        return self.permute_sorted(self.sort(w), rng)


def block_permute(x, z, rng) -> AdjacencyMatrix:
    """Sort ``x`` by ``z`` and shuffle edge weights uniformly within every block.

    The result is in block-sorted vertex order; sort the companion graph with
    :func:`graphcorr.graph.sort_vertices` before comparing the two.
    """
    z = as_assignment(z)
    w = as_array(x)
    if w.shape[0] != z.n:
        raise DimensionMismatch(f"graph has {w.shape[0]} vertices, assignment has {z.n}")
    return AdjacencyMatrix(BlockPermuter(z)(w, rng))


def block_entries(w: np.ndarray, z: CommunityAssignment) -> dict:
    """Sorted entries of every upper block (i <= j), keyed by (i, j).

    Diagonal blocks contribute only their strict upper triangle.
    """
    z = as_assignment(z)
    w = as_array(w)
    iu, ju = np.triu_indices(w.shape[0], k=1)
    bi, bj = z.z[iu], z.z[ju]
    lo, hi = np.minimum(bi, bj), np.maximum(bi, bj)
    vals = w[iu, ju]
    out = {}
    for i in range(z.k):
        for j in range(i, z.k):
            out[(i, j)] = np.sort(vals[(lo == i) & (hi == j)])
    return out
