"""Experiment drivers behind the CLI: statistic sweeps, power curves, ingestion, k-sweeps."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EmptyIntersection
from .graph import AdjacencyMatrix, symmetrize_directed
from .inference import NAIVE, pvalue_test, replicate_rng, simulate_power
from .io import ensure_dir, read_edge_list_directed, write_rows, write_sidecar
from .samplers import sample_bernoulli_upper, sample_gaussian_upper
from .settings import FIG1, FIG3, FIG4, SbmSetting
from .statistics import gcorr

DEFAULT_N_GRID = tuple(range(10, 101, 10))
POWER_RHOS = (0.0, 0.1, -0.1)
PERMUTATION_METHODS = ("pearson", "dcorr", "mgc")


def rho_grid(setting: SbmSetting, points: int = 9) -> np.ndarray:
    """Evenly spaced rho over the setting's admissible range, always including 0."""
    lo, hi = setting.rho_range()
    grid = np.linspace(lo, hi, points)
    return np.unique(np.concatenate([grid, [0.0]]))


def statistic_sweep(
    setting: SbmSetting,
    rhos: Iterable[float],
    n: int = 100,
    replicates: int = 500,
    methods: Sequence[str] = ("pearson", "dcorr"),
    seed: int = 0,
) -> list[dict]:
    """Mean and SD of each statistic over independent draws at each rho (community assignment given)."""
    rows = []
    for ri, rho in enumerate(rhos):
        params = setting.params(n, float(rho))
        iu = np.triu_indices(n, k=1)
        values = {m: np.empty(replicates) for m in methods}
        for i in range(replicates):
            rng = replicate_rng(seed, ri, i)
            if setting.model == "gaussian":
                xu, yu = sample_gaussian_upper(params, rng)
            else:
                xu, yu = sample_bernoulli_upper(params, rng)
            x = np.zeros((n, n))
            y = np.zeros((n, n))
            x[iu], y[iu] = xu, yu
            x += x.T
            y += y.T
            for m in methods:
                values[m][i] = gcorr(x, y, m).value
        for m in methods:
            v = values[m]
            rows.append(
                {
                    "setting": setting.name,
                    "rho": float(rho),
                    "method": m,
                    "mean_stat": float(v.mean()),
                    "sd_stat": float(v.std(ddof=1)),
                    "replicates": replicates,
                }
            )
    return rows


def reproduce_fig1(
    outdir,
    seed: int = 0,
    n: int = 100,
    replicates: int = 500,
    points: int = 9,
    methods: Sequence[str] = ("pearson", "dcorr"),
) -> Path:
    out = ensure_dir(outdir)
    rows = []
    for key, setting in FIG1.items():
        for row in statistic_sweep(setting, rho_grid(setting, points), n, replicates, methods, seed):
            rows.append({"panel": key, **row})
    header = ["panel", "setting", "rho", "method", "mean_stat", "sd_stat", "replicates"]
    path = out / "fig1.csv"
    write_rows(path, header, [[r[h] for h in header] for r in rows])
    write_sidecar(path, seed, {"n": n, "replicates": replicates, "points": points, "methods": list(methods)})
    return path


def power_rows(
    settings: dict,
    rhos: Sequence[float] = POWER_RHOS,
    n_grid: Sequence[int] = DEFAULT_N_GRID,
    replicates: int = 500,
    naive_replicates: int = 5000,
    alpha: float = 0.05,
    methods: Sequence[str] = PERMUTATION_METHODS,
    seed: int = 0,
    threads: int = 1,
    include_naive: bool = True,
) -> list[dict]:
    rows = []
    for row_key, setting in settings.items():
        for ri, rho in enumerate(rhos):
            for n in n_grid:
                # one seed per (row, rho, n) cell keeps cells independent and reproducible
                cell_seed = int(np.random.SeedSequence([seed, hash_key(row_key), ri, n]).generate_state(1)[0])
                results = dict(simulate_power(setting, rho, n, methods, replicates, alpha, cell_seed, threads))
                if include_naive:
                    results.update(simulate_power(setting, rho, n, (NAIVE,), naive_replicates, alpha, cell_seed, threads))
                for m, res in results.items():
                    rows.append(
                        {
                            "row": row_key,
                            "setting": setting.name,
                            "rho": float(rho),
                            "n": n,
                            "method": m,
                            "power": res.power,
                            "mc_error": res.mc_error,
                            "replicates": res.replicates,
                        }
                    )
    return rows


def hash_key(key) -> int:
    """Stable small integer for a settings-table key (Python's hash() is salted for str)."""
    return int.from_bytes(str(key).encode(), "little") % (2**31 - 1)


POWER_HEADER = ["row", "setting", "rho", "n", "method", "power", "mc_error", "replicates"]


def reproduce_power(
    figure: int,
    outdir,
    seed: int = 0,
    n_grid: Sequence[int] = DEFAULT_N_GRID,
    replicates: int = 500,
    naive_replicates: Optional[int] = None,
    alpha: float = 0.05,
    threads: int = 1,
    rows_subset: Optional[Sequence[int]] = None,
) -> Path:
    table = {3: FIG3, 4: FIG4}[figure]
    if rows_subset:
        table = {k: v for k, v in table.items() if k in set(rows_subset)}
    if naive_replicates is None:
        naive_replicates = 5000 if figure == 3 else replicates
    rows = power_rows(
        table, POWER_RHOS, n_grid, replicates, naive_replicates, alpha, PERMUTATION_METHODS, seed, threads
    )
    out = ensure_dir(outdir)
    path = out / f"fig{figure}.csv"
    write_rows(path, POWER_HEADER, [[r[h] for h in POWER_HEADER] for r in rows])
    write_sidecar(
        path,
        seed,
        {
            "figure": figure,
            "n_grid": list(n_grid),
            "replicates": replicates,
            "naive_replicates": naive_replicates,
            "alpha": alpha,
            "rows": sorted(table),
        },
    )
    return path


def ingest_connectome(edge_list_a, edge_list_b, binarize: bool = False) -> tuple[AdjacencyMatrix, AdjacencyMatrix]:
    """Read two directed edge lists, keep the shared vertices, and symmetrize.

    Both outputs list the shared vertices in lexicographic order.
    """
    names_a, wa = read_edge_list_directed(edge_list_a)
    names_b, wb = read_edge_list_directed(edge_list_b)
    shared = sorted(set(names_a) & set(names_b))
    if not shared:
        raise EmptyIntersection(f"{edge_list_a} and {edge_list_b} share no vertices")
    ia = _indexer(names_a, shared)
    ib = _indexer(names_b, shared)
    a = symmetrize_directed(wa[np.ix_(ia, ia)]).w
    b = symmetrize_directed(wb[np.ix_(ib, ib)]).w
    ga, gb = AdjacencyMatrix(a, shared), AdjacencyMatrix(b, shared)
    if binarize:
        ga, gb = ga.binarize(), gb.binarize()
    return ga, gb


def _indexer(names, wanted):
    pos = {v: i for i, v in enumerate(names)}
    return [pos[v] for v in wanted]


KSWEEP_HEADER = ["k", "method", "observed", "null_mean", "null_sd", "pvalue", "k_used", "replicates"]


def k_sweep_test(
    graph_a,
    graph_b,
    k_list: Sequence[int],
    r: int = 500,
    methods: Sequence[str] = PERMUTATION_METHODS,
    seed: int = 0,
) -> list[dict]:
    """Observed statistic against its block-permutation null for each number of blocks."""
    rows = []
    for k in k_list:
        for m in methods:
            res = pvalue_test(graph_a, graph_b, k=int(k), r=r, method=m, seed=seed)
            rows.append(
                {
                    "k": int(k),
                    "method": m,
                    "observed": res.observed,
                    "null_mean": float(np.mean(res.null_stats)),
                    "null_sd": float(np.std(res.null_stats, ddof=1)),
                    "pvalue": res.pvalue,
                    "k_used": res.k_used,
                    "replicates": r,
                }
            )
    return rows
