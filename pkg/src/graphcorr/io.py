"""Graph file formats.

* dense CSV: n rows of n comma-separated reals, no header.
* edge list CSV: header ``source,target,weight``; vertex names are strings
  and absent pairs have weight 0.  Rows are read as directed edges and the
  two orientations are averaged, so undirected graphs are written with both
  orientations listed.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ParseError, ValidationError
from .graph import AdjacencyMatrix, CommunityAssignment, symmetrize_directed

EDGE_HEADER = ["source", "target", "weight"]


def _fmt(v: float) -> str:
    return repr(float(v)) if v != int(v) else str(int(v))


def read_dense_csv(path) -> AdjacencyMatrix:
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise ParseError(f"{path}: non-numeric entry ({exc})", lineno) from None
    if not rows:
        raise ParseError(f"{path}: empty matrix file")
    if any(len(r) != len(rows) for r in rows):
        raise ParseError(f"{path}: expected a square {len(rows)}x{len(rows)} matrix")
    try:
        return AdjacencyMatrix(np.array(rows))
    except ValidationError as exc:
        raise ParseError(f"{path}: {exc}") from None


def write_dense_csv(path, x) -> None:
    w = x.w if isinstance(x, AdjacencyMatrix) else np.asarray(x, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in w:
            writer.writerow([_fmt(v) for v in row])


def read_edge_list_directed(path) -> tuple[list[str], np.ndarray]:
    """Vertex names (sorted) and the directed weight matrix; duplicate rows add up."""
    edges = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty edge list", 1) from None
        if [h.strip().lower() for h in header] != EDGE_HEADER:
            raise ParseError(f"{path}: header must be 'source,target,weight', got {','.join(header)!r}", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ParseError(f"{path}: expected 3 fields, got {len(row)}", lineno)
            src, dst, raw = (c.strip() for c in row)
            if not src or not dst:
                raise ParseError(f"{path}: empty vertex name", lineno)
            try:
                weight = float(raw)
            except ValueError:
                raise ParseError(f"{path}: weight {raw!r} is not a number", lineno) from None
            if not np.isfinite(weight):
                raise ParseError(f"{path}: weight must be finite", lineno)
            edges.append((src, dst, weight))
    names = sorted({e[0] for e in edges} | {e[1] for e in edges})
    index = {v: i for i, v in enumerate(names)}
    w = np.zeros((len(names), len(names)))
    for src, dst, weight in edges:
        w[index[src], index[dst]] += weight
    return names, w


def read_edge_list(path) -> AdjacencyMatrix:
    names, w = read_edge_list_directed(path)
    return AdjacencyMatrix(symmetrize_directed(w).w, names)


def write_edge_list(path, x) -> None:
    """Nonzero edges in both orientations, so that reading back is lossless.

    Isolated vertices get a zero-weight self row so the vertex set survives.
    """
    g = x if isinstance(x, AdjacencyMatrix) else AdjacencyMatrix(x)
    w = g.w
    names = g.labels if g.labels is not None else [str(i) for i in range(g.n)]
    isolated = ~np.any(w != 0, axis=1)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EDGE_HEADER)
        for i in range(g.n):
            if isolated[i]:
                writer.writerow([names[i], names[i], "0"])
                continue
            for j in np.flatnonzero(w[i]):
                writer.writerow([names[i], names[j], _fmt(w[i, j])])


def _is_edge_list(path) -> bool:
    with open(path, newline="") as fh:
        first = fh.readline()
    return first.strip().lower().replace(" ", "").startswith("source,target")


def read_graph(path) -> AdjacencyMatrix:
    """Read either format, telling them apart by the edge-list header."""
    return read_edge_list(path) if _is_edge_list(path) else read_dense_csv(path)


def write_graph(path, x, fmt: str = "dense") -> None:
    if fmt == "dense":
        write_dense_csv(path, x)
    elif fmt == "edgelist":
        write_edge_list(path, x)
    else:
        raise ValidationError(f"unknown graph format {fmt!r}")


def read_matrix_csv(path) -> np.ndarray:
    try:
        return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float, ndmin=2))
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None


def write_assignment(path, z: CommunityAssignment, labels: Optional[tuple] = None) -> None:
    """``vertex,label`` rows; labels are written 1-based."""
    names = labels if labels is not None else [str(i) for i in range(z.n)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["vertex", "label"])
        for name, lab in zip(names, z.z):
            writer.writerow([name, int(lab) + 1])


def write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    return v


def write_sidecar(csv_path, seed, flags: dict) -> Path:
    """Metadata JSON next to a CSV output; no timestamps so reruns are byte-identical."""
    from . import __version__

    path = Path(str(csv_path) + ".json")
    meta = {"seed": seed, "version": __version__, "flags": flags}
    path.write_text(json.dumps(meta, sort_keys=True, indent=2, default=str) + "\n")
    return path


def ensure_dir(path) -> Path:
    p = Path(path)
    os.makedirs(p, exist_ok=True)
    return p
