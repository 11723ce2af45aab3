"""Command-line interface.

Subcommands: factorize (build and save a transform), eval (metrics of a
saved transform against its graph), filter (run a graph filter over a
signal file), bench (emit an experiment grid as CSV).

Graphs come either from a file (--graph) or a generator spec
(--gen family:n=...,key=value,...). The environment variable
FGFT_MAX_DENSE_N (default 2048) caps the size at which dense-oracle
metrics (exact eigendecompositions) are attempted.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np
import scipy.sparse

from fgft import bench as bench_mod
from fgft.diagonalize import exact_eigh
from fgft.filtering import (
    FilterSpec,
    apply_poly,
    filter_exact,
    filter_fgft,
    filter_op_error,
    fit_poly,
)
from fgft.graphs import GraphFormatError, laplacian, load_graph
from fgft.metrics import err_c, err_d, err_s
from fgft.transform import (
    align_signs,
    build_fgft,
    dense_basis,
    load_fgft,
    rcg,
    save_fgft,
)

DEFAULT_MAX_DENSE_N = 2048


def max_dense_n() -> int:
    raw = os.environ.get("FGFT_MAX_DENSE_N")
    if raw is None:
        return DEFAULT_MAX_DENSE_N
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: FGFT_MAX_DENSE_N must be an integer, "
                         f"got {raw!r}")


def _coerce(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_gen(spec: str):
    """Parse 'family:n=256,p=0.1' into (family, n, params)."""
    family, _, rest = spec.partition(":")
    family = family.strip()
    if not family:
        raise SystemExit(f"error: empty generator family in {spec!r}")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise SystemExit(
                    f"error: generator parameter {item!r} is not key=value")
            params[key.strip()] = _coerce(val.strip())
    n = params.pop("n", None)
    if not isinstance(n, int) or n <= 0:
        raise SystemExit(
            f"error: generator spec {spec!r} needs an integer n, "
            f"e.g. {family}:n=256")
    return family, n, params


def parse_seeds(text: str) -> list:
    """Parse '0..9', '3', or '1,4,7' into a list of ints."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            a, b = int(lo), int(hi)
        except ValueError:
            raise SystemExit(f"error: bad seed range {text!r}")
        if b < a:
            raise SystemExit(f"error: empty seed range {text!r}")
        return list(range(a, b + 1))
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise SystemExit(f"error: bad seed list {text!r}")


def _graph_from_args(args, seed: int):
    if getattr(args, "graph", None):
        if not os.path.exists(args.graph):
            print(f"error: graph file not found: {args.graph}",
                  file=sys.stderr)
            raise SystemExit(2)
        try:
            return load_graph(args.graph)
        except GraphFormatError as exc:
            print(f"error: {exc}", file=sys.stderr)
            raise SystemExit(1)
    family, n, params = parse_gen(args.gen)
    try:
        return bench_mod.gen_graph(family, n, seed, params)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(1)


def _budget_from_args(args, n: int) -> int:
    if args.givens is not None:
        return bench_mod.givens_budget(n, givens=args.givens)
    if args.rcg is not None:
        return bench_mod.givens_budget(n, rcg_target=args.rcg)
    return bench_mod.default_budget(n)


def _add_graph_opts(p: argparse.ArgumentParser, required: bool = True):
    grp = p.add_mutually_exclusive_group(required=required)
    grp.add_argument("--graph", metavar="PATH",
                     help="graph file (edge list or Matrix Market)")
    grp.add_argument("--gen", metavar="SPEC",
                     help="generator spec, e.g. sensor:n=256 or "
                          "sbm:n=1000,q=20,avg_degree=8,eps_frac=0.5")


def _add_budget_opts(p: argparse.ArgumentParser):
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--givens", type=int, metavar="J",
                     help="rotation budget (default 2 n log2 n)")
    grp.add_argument("--rcg", type=float, metavar="R",
                     help="complexity-gain target; J = round(n^2 / (4 R))")


def cmd_factorize(args) -> int:
    g = _graph_from_args(args, args.seed)
    l = laplacian(g)
    j = _budget_from_args(args, g.n)
    t0 = time.perf_counter()
    f = build_fgft(l, j, engine=args.engine)
    wall = time.perf_counter() - t0
    save_fgft(f, args.out)
    sidecar = {
        "n": g.n,
        "engine": args.engine,
        "givens_requested": j,
        "rotations_used": f.diag.chain.rotation_count,
        "rcg": rcg(f),
        "err_d": err_d(f, l),
        "err_s": None,
        "wall_time_s": wall,
        "build": bench_mod.build_id(),
        "config": bench_mod.config_hash({
            "cmd": "factorize", "engine": args.engine, "givens": j,
            "graph": args.graph or args.gen, "seed": args.seed,
        }),
    }
    if g.n <= max_dense_n():
        lam = np.linalg.eigvalsh(l)
        sidecar["err_s"] = err_s(f.lambda_hat, lam)
    with open(args.out + ".json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {args.out} ({f.diag.chain.rotation_count} rotations, "
          f"rcg {sidecar['rcg']:.2f}, err_d {sidecar['err_d']:.4f})")
    return 0


def cmd_eval(args) -> int:
    if not os.path.exists(args.fgft):
        print(f"error: transform file not found: {args.fgft}",
              file=sys.stderr)
        return 2
    f = load_fgft(args.fgft)
    g = _graph_from_args(args, args.seed)
    if g.n != f.n:
        print(f"error: transform is {f.n}x{f.n} but the graph has "
              f"{g.n} nodes", file=sys.stderr)
        return 1
    l = laplacian(g)
    report = {
        "n": f.n,
        "engine": f.engine,
        "rotations_used": f.diag.chain.rotation_count,
        "rcg": rcg(f),
        "err_d": err_d(f, l),
        "err_s": None,
        "err_c": None,
    }
    if f.n <= max_dense_n():
        lam, u = exact_eigh(l)
        report["err_s"] = err_s(f.lambda_hat, lam)
        report["err_c"] = err_c(dense_basis(align_signs(f, u)), u)
    out = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return 0


def _parse_filter_spec(text: str, n: int) -> FilterSpec:
    kind, _, rest = text.partition(":")
    if kind == "lowpass":
        try:
            return FilterSpec.ideal_lowpass(int(rest))
        except ValueError:
            raise SystemExit(f"error: lowpass needs an integer cut, "
                             f"got {text!r}")
    if kind == "exp":
        rate = 1.0
        if rest:
            try:
                rate = float(rest)
            except ValueError:
                raise SystemExit(f"error: bad exponential rate {rest!r}")
        return FilterSpec.exponential(rate)
    if kind == "allpass":
        return FilterSpec.tabulated(np.ones(n))
    if kind == "tab":
        if not os.path.exists(rest):
            print(f"error: gain file not found: {rest}", file=sys.stderr)
            raise SystemExit(2)
        return FilterSpec.tabulated(np.loadtxt(rest))
    raise SystemExit(f"error: unknown filter spec {text!r}; use "
                     f"lowpass:<r>, exp[:<rate>], allpass, or tab:<file>")


def cmd_filter(args) -> int:
    g = _graph_from_args(args, args.seed)
    l = laplacian(g)
    spec = _parse_filter_spec(args.filter, g.n)
    if not os.path.exists(args.signal):
        print(f"error: signal file not found: {args.signal}",
              file=sys.stderr)
        return 2
    x = np.loadtxt(args.signal)
    if x.ndim != 1 or x.shape[0] != g.n:
        print(f"error: signal must hold {g.n} values, one per line",
              file=sys.stderr)
        return 1
    oracle_ok = g.n <= max_dense_n()
    eig = exact_eigh(l) if oracle_ok else None

    method, _, detail = args.method.partition(":")
    stats = {"method": args.method, "n": g.n, "op_error": None}
    if method == "exact":
        if not oracle_ok:
            print(f"error: exact filtering needs n <= {max_dense_n()} "
                  f"(set FGFT_MAX_DENSE_N to raise)", file=sys.stderr)
            return 1
        y = filter_exact(l, spec, x, eig=eig)
        stats["op_error"] = 0.0
    elif method == "fgft":
        if not os.path.exists(detail):
            print(f"error: transform file not found: {detail}",
                  file=sys.stderr)
            return 2
        f = load_fgft(detail)
        if f.n != g.n:
            print(f"error: transform is {f.n}x{f.n} but the graph has "
                  f"{g.n} nodes", file=sys.stderr)
            return 1
        y = filter_fgft(f, spec, x)
        if oracle_ok:
            stats["op_error"] = filter_op_error(
                lambda block: filter_fgft(f, spec, block), l, spec, eig=eig)
    elif method == "poly":
        try:
            degree = int(detail)
        except ValueError:
            raise SystemExit(f"error: poly needs a degree, got "
                             f"{args.method!r}")
        if oracle_ok:
            lam = eig[0]
            lam_max = float(lam[-1])
        else:
            lam = None
            lam_max = 2.0 * float(np.max(g.degrees()))
        if spec.kind != "exponential" and lam is None:
            print("error: rank-indexed filters need the dense oracle for "
                  "polynomial fitting", file=sys.stderr)
            return 1
        h = spec.response(lam if lam is not None else np.zeros(g.n))
        pf = fit_poly(h, degree, lam_max)
        op = scipy.sparse.csr_array(l)
        y = apply_poly(op, pf, x)
        if oracle_ok:
            stats["op_error"] = filter_op_error(
                lambda block: apply_poly(op, pf, block), l, spec, eig=eig)
        stats["fit_residual"] = pf.fit_residual
    else:
        raise SystemExit(f"error: unknown method {args.method!r}; use "
                         f"exact, fgft:<file>, or poly:<degree>")

    if args.out:
        np.savetxt(args.out, y, fmt="%.17g")
    else:
        for v in y:
            print(f"{v:.17g}")
    print(json.dumps(stats, sort_keys=True), file=sys.stderr)
    return 0


def _emit_csv(header, rows, out: str | None) -> None:
    if out:
        bench_mod.write_csv(out, header, rows)
        print(f"wrote {out} ({len(rows)} rows)")
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)


def _parse_int_list(text: str) -> list:
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise SystemExit(f"error: bad integer list {text!r}")


def _parse_float_list(text: str) -> list:
    try:
        return [float(tok) for tok in text.split(",")]
    except ValueError:
        raise SystemExit(f"error: bad number list {text!r}")


def cmd_bench(args) -> int:
    seeds = parse_seeds(args.seeds)
    if args.table == "table4":
        sizes = (_parse_int_list(args.sizes) if args.sizes
                 else bench_mod.TABLE4_SIZES)
        header, rows = bench_mod.bench_table4(sizes, seeds, jobs=args.jobs)
    elif args.table == "table3":
        degrees = (_parse_int_list(args.degrees) if args.degrees
                   else bench_mod.SBM_DEGREES)
        fracs = (_parse_float_list(args.eps_fracs) if args.eps_fracs
                 else bench_mod.SBM_EPS_FRACS)
        header, rows = bench_mod.bench_table3(degrees, fracs, seeds,
                                              jobs=args.jobs)
    elif args.table == "table2":
        families = (args.families.split(",") if args.families
                    else bench_mod.TABLE2_FAMILIES)
        sizes = (_parse_int_list(args.sizes) if args.sizes
                 else bench_mod.TABLE2_SIZES)
        engines = (args.engines.split(",") if args.engines
                   else ("sequential-efficient", "parallel"))
        header, rows = bench_mod.bench_table2(families, sizes, seeds,
                                              engines, jobs=args.jobs)
    else:
        g = _graph_from_args(args, seeds[0])
        if g.n > max_dense_n():
            print(f"error: band-energy curves need n <= {max_dense_n()} "
                  f"(set FGFT_MAX_DENSE_N to raise)", file=sys.stderr)
            return 1
        j_list = _parse_int_list(args.givens_list) if args.givens_list \
            else None
        header, rows = bench_mod.bench_eband(laplacian(g), j_list,
                                             seed=seeds[0])
    _emit_csv(header, rows, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fgft",
        description="Approximate fast graph Fourier transforms by "
                    "truncated Givens diagonalization.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fact = sub.add_parser("factorize",
                            help="build a transform and save it")
    _add_graph_opts(p_fact)
    _add_budget_opts(p_fact)
    p_fact.add_argument("--engine", default="parallel",
                        choices=("sequential", "sequential-efficient",
                                 "parallel"))
    p_fact.add_argument("--seed", type=int, default=0)
    p_fact.add_argument("--out", required=True,
                        help="output transform file; a .json sidecar with "
                             "metrics is written next to it")
    p_fact.set_defaults(func=cmd_factorize)

    p_eval = sub.add_parser("eval",
                            help="metrics of a saved transform")
    _add_graph_opts(p_eval)
    p_eval.add_argument("--fgft", required=True, metavar="FILE")
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--out", help="write the JSON report here")
    p_eval.set_defaults(func=cmd_eval)

    p_filt = sub.add_parser("filter", help="filter a graph signal")
    _add_graph_opts(p_filt)
    p_filt.add_argument("--filter", required=True,
                        help="lowpass:<r> | exp[:<rate>] | allpass | "
                             "tab:<gain file>")
    p_filt.add_argument("--method", required=True,
                        help="exact | fgft:<file> | poly:<degree>")
    p_filt.add_argument("--signal", required=True,
                        help="input signal, one value per line")
    p_filt.add_argument("--seed", type=int, default=0)
    p_filt.add_argument("--out", help="output signal path (default stdout)")
    p_filt.set_defaults(func=cmd_filter)

    p_bench = sub.add_parser("bench", help="run an experiment grid")
    p_bench.add_argument("table",
                         choices=("table2", "table3", "table4", "eband"))
    _add_graph_opts(p_bench, required=False)
    p_bench.add_argument("--sizes", help="comma-separated n list")
    p_bench.add_argument("--families", help="comma-separated family list")
    p_bench.add_argument("--engines", help="comma-separated engine list")
    p_bench.add_argument("--degrees", help="SBM average degrees")
    p_bench.add_argument("--eps-fracs", dest="eps_fracs",
                         help="SBM eps as fractions of the threshold")
    p_bench.add_argument("--givens-list", dest="givens_list",
                         help="rotation budgets for the band-energy curves")
    p_bench.add_argument("--seeds", default="0..9",
                         help="'a..b' inclusive, or comma-separated")
    p_bench.add_argument("--jobs", type=int, default=1,
                         help="worker processes")
    p_bench.add_argument("--out", help="output CSV path (default stdout)")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "bench" and args.table == "eband" \
            and not (args.graph or args.gen):
        print("error: bench eband needs --graph or --gen", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
