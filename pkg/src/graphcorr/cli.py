"""Command-line interface.

Exit codes: 0 success, 2 validation error (bad input, unreadable files),
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .community import estimate_blocks
from .errors import NumericalError, ValidationError
from .experiments import (
    DEFAULT_N_GRID,
    KSWEEP_HEADER,
    PERMUTATION_METHODS,
    POWER_HEADER,
    k_sweep_test,
    ingest_connectome,
    power_rows,
    reproduce_fig1,
    reproduce_power,
)
from .inference import NAIVE, pvalue_test, replicate_rng
from .io import (
    ensure_dir,
    read_graph,
    read_matrix_csv,
    write_assignment,
    write_graph,
    write_rows,
    write_sidecar,
)
from .samplers import sample_pair
from .settings import SbmSetting
from .statistics import METHODS, gcorr


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _emit(payload: dict, out):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _flags(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


# ---------------------------------------------------------------- commands


def cmd_sample(args):
    if args.setting:
        setting = SbmSetting.from_dict(json.loads(Path(args.setting).read_text()))
    else:
        if not (args.bx and args.by):
            raise ValidationError("sample needs --setting or both --bx and --by")
        bx, by = read_matrix_csv(args.bx), read_matrix_csv(args.by)
        props = _floats(args.proportions) if args.proportions else [1.0] * bx.shape[0]
        extra = {}
        if args.model == "gaussian":
            extra = {
                "sigx": read_matrix_csv(args.sigx) if args.sigx else np.ones_like(bx),
                "sigy": read_matrix_csv(args.sigy) if args.sigy else np.ones_like(by),
            }
        setting = SbmSetting("cli", args.model, bx, by, tuple(props), **extra)
    params = setting.params(args.n, args.rho)
    x, y = sample_pair(params, replicate_rng(args.seed, 0))
    out = ensure_dir(args.out)
    write_graph(out / f"x.{args.format}.csv", x, args.format)
    write_graph(out / f"y.{args.format}.csv", y, args.format)
    write_assignment(out / "assignment.csv", params.z)
    write_sidecar(out / "assignment.csv", args.seed, _flags(args))


def cmd_stat(args):
    x, y = read_graph(args.x), read_graph(args.y)
    _emit(gcorr(x, y, args.method).to_dict(), args.out)


def cmd_embed(args):
    x, y = read_graph(args.x), read_graph(args.y)
    est = estimate_blocks(x, y, k=args.k, d=args.d, kmax=args.kmax, rng=replicate_rng(args.seed, 0))
    out = ensure_dir(args.out)
    write_assignment(out / "assignment.csv", est.z, x.labels)
    write_sidecar(out / "assignment.csv", args.seed, _flags(args))
    report = {"d": est.d, "k_hat": est.k, "method": est.method, "bic": {str(k): v for k, v in est.bic.items()}}
    _emit(report, out / "report.json")


def cmd_test(args):
    x, y = read_graph(args.x), read_graph(args.y)
    res = pvalue_test(x, y, k=args.k, r=args.replicates, method=args.method, seed=args.seed, kmax=args.kmax)
    _emit(res.to_dict(), args.out)


def cmd_power(args):
    setting = SbmSetting.from_dict(json.loads(Path(args.model).read_text()))
    methods = [m for m in args.methods.split(",") if m]
    perm = tuple(m for m in methods if m != NAIVE)
    rows = power_rows(
        {setting.name: setting},
        _floats(args.rho),
        _ints(args.n),
        args.replicates,
        args.naive_replicates or args.replicates,
        args.alpha,
        perm,
        args.seed,
        args.threads,
        include_naive=NAIVE in methods,
    )
    path = Path(args.out) if args.out.endswith(".csv") else ensure_dir(args.out) / "power.csv"
    write_rows(path, POWER_HEADER, [[r[h] for h in POWER_HEADER] for r in rows])
    write_sidecar(path, args.seed, _flags(args))


def cmd_reproduce(args):
    if args.figure == "fig1":
        reproduce_fig1(args.out, args.seed, n=args.n_max, replicates=args.replicates)
    else:
        grid = _ints(args.n_grid) if args.n_grid else DEFAULT_N_GRID
        rows = _ints(args.rows) if args.rows else None
        reproduce_power(
            int(args.figure[-1]), args.out, args.seed, grid, args.replicates, args.naive_replicates,
            args.alpha, args.threads, rows,
        )


def cmd_ingest(args):
    a, b = ingest_connectome(args.a, args.b, binarize=args.binarize)
    out = ensure_dir(args.out)
    write_graph(out / "graph_a.csv", a, args.format)
    write_graph(out / "graph_b.csv", b, args.format)
    (out / "vertices.txt").write_text("\n".join(a.labels) + "\n")
    _emit({"n": a.n, "binarized": args.binarize, "vertices": "vertices.txt"}, out / "ingest.json")


def cmd_ksweep(args):
    a, b = read_graph(args.a), read_graph(args.b)
    rows = k_sweep_test(a, b, _ints(args.k_list), args.replicates, args.methods.split(","), args.seed)
    path = Path(args.out) if args.out.endswith(".csv") else ensure_dir(args.out) / "ksweep.csv"
    write_rows(path, KSWEEP_HEADER, [[r[h] for h in KSWEEP_HEADER] for r in rows])
    write_sidecar(path, args.seed, _flags(args))


# ---------------------------------------------------------------- parser


def _global_flags(p, out_default=None):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=out_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphcorr", description="Conditional independence tests for pairs of vertex-matched graphs.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a rho-correlated graph pair")
    p.add_argument("--model", choices=["bernoulli", "gaussian"], default="bernoulli")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--bx", help="k x k CSV of block probabilities (bernoulli) or means (gaussian)")
    p.add_argument("--by")
    p.add_argument("--sigx")
    p.add_argument("--sigy")
    p.add_argument("--proportions", help="comma-separated block proportions")
    p.add_argument("--setting", help="JSON setting file instead of --bx/--by")
    p.add_argument("--format", choices=["dense", "edgelist"], default="dense")
    _global_flags(p, ".")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("stat", help="graph correlation statistic")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--method", choices=METHODS, default="dcorr")
    _global_flags(p)
    p.set_defaults(func=cmd_stat)

    p = sub.add_parser("embed", help="joint community estimation")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--d", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--kmax", type=int)
    _global_flags(p, ".")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("test", help="block-permutation p-value")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--method", choices=METHODS, default="dcorr")
    p.add_argument("--k", type=int)
    p.add_argument("--kmax", type=int)
    p.add_argument("--replicates", type=int, default=500)
    _global_flags(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("power", help="Monte Carlo power over rho and n grids")
    p.add_argument("--model", required=True, help="JSON setting file")
    p.add_argument("--rho", default="0,0.1,-0.1")
    p.add_argument("--n", default=",".join(map(str, DEFAULT_N_GRID)))
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--naive-replicates", type=int)
    p.add_argument("--methods", default=",".join(PERMUTATION_METHODS + (NAIVE,)))
    _global_flags(p, ".")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("reproduce", help="regenerate a simulation figure as CSV")
    p.add_argument("figure", choices=["fig1", "fig3", "fig4"])
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--naive-replicates", type=int)
    p.add_argument("--n-grid", help="comma-separated vertex counts (fig3/fig4)")
    p.add_argument("--n-max", type=int, default=100, help="vertex count for fig1")
    p.add_argument("--rows", help="comma-separated figure rows to run (fig3/fig4)")
    p.add_argument("--alpha", type=float, default=0.05)
    _global_flags(p, "results")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("ingest", help="match and symmetrize two edge lists")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--binarize", action="store_true")
    p.add_argument("--format", choices=["dense", "edgelist"], default="edgelist")
    _global_flags(p, ".")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("ksweep", help="observed vs null statistic across block counts")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--k-list", default="2,4,8,16,32,64,128,256")
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--methods", default=",".join(PERMUTATION_METHODS))
    _global_flags(p, ".")
    p.set_defaults(func=cmd_ksweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
