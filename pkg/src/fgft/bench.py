"""Benchmark harness: synthetic experiment grids emitted as CSV rows.

Each row carries (seed, build, config) where build is the git describe of
the working tree (or the package version when git is unavailable) and
config is a short hash of the cell's parameters; reruns of the same
triple reproduce every non-timing column bit for bit. Wall-clock columns
are reported for information only and are inherently machine-bound.

CSV schema: header row, comma separated, '.' decimal point, UTF-8.
"""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import hashlib
import json
import math
import pathlib
import subprocess
import time

import numpy as np

from fgft.diagonalize import exact_eigh
from fgft.graphs import (
    Graph,
    gen_community,
    gen_erdos_renyi,
    gen_ring,
    gen_sbm,
    gen_sensor,
    laplacian,
    sbm_epsilon_c,
)
from fgft.metrics import band_energy, err_c, err_d, err_s
from fgft.transform import align_signs, build_fgft, dense_basis

__all__ = [
    "ExperimentConfig",
    "givens_budget",
    "default_budget",
    "gen_graph",
    "build_id",
    "config_hash",
    "bench_table4",
    "bench_table3",
    "bench_table2",
    "bench_eband",
    "write_csv",
    "TABLE4_SIZES",
    "TABLE2_SIZES",
    "TABLE2_RCG",
    "TABLE2_FAMILIES",
]

TABLE4_SIZES = (64, 128, 256, 512, 1024)
TABLE2_SIZES = (128, 256, 512, 1024)
TABLE2_FAMILIES = ("erdos-renyi", "community", "sensor", "ring")
# per-size complexity-gain targets for the four-family comparison grid
TABLE2_RCG = {128: 3.9, 256: 7.1, 512: 13.1, 1024: 24.4}

GRAPH_FAMILIES = ("erdos-renyi", "ring", "sensor", "community", "sbm")


def givens_budget(n: int, givens: int | None = None,
                  rcg_target: float | None = None) -> int:
    """Resolve a rotation budget from either an explicit J or an RCG target.

    Exactly one of the two must be given; an RCG target converts through
    J = round(n^2 / (4 RCG)).
    """
    if (givens is None) == (rcg_target is None):
        raise ValueError("specify exactly one of givens and rcg_target")
    if givens is not None:
        j = int(givens)
    else:
        if rcg_target <= 0:
            raise ValueError("RCG target must be positive")
        j = int(round(n * n / (4.0 * rcg_target)))
    if j < 0:
        raise ValueError("rotation budget must be non-negative")
    return j


def default_budget(n: int, scale: float = 2.0) -> int:
    """The n log n budget J = scale * n * log2(n) used throughout."""
    if n < 2:
        return 0
    return int(round(scale * n * math.log2(n)))


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    """One factorization task: which graph, which engine, how many rotations."""

    family: str
    n: int
    params: dict = dataclasses.field(default_factory=dict)
    engine: str = "parallel"
    givens: int | None = None
    rcg_target: float | None = None
    seeds: tuple = (0,)
    out: str | None = None

    def budget(self) -> int:
        if self.givens is None and self.rcg_target is None:
            return default_budget(self.n)
        return givens_budget(self.n, self.givens, self.rcg_target)


def gen_graph(family: str, n: int, seed: int,
              params: dict | None = None) -> Graph:
    """Dispatch to a graph generator by family name.

    Families: erdos-renyi (param p, default 0.1), ring, sensor (param
    threshold), community, sbm (params avg_degree, q, and either eps or
    eps_frac as a fraction of the detectability threshold).
    """
    p = dict(params or {})
    if family in ("erdos-renyi", "er"):
        return gen_erdos_renyi(n, p.pop("p", 0.1), seed, **p)
    if family == "ring":
        if p:
            raise ValueError(f"ring takes no parameters, got {sorted(p)}")
        return gen_ring(n)
    if family == "sensor":
        return gen_sensor(n, seed=seed, **p)
    if family == "community":
        return gen_community(n, seed, **p)
    if family == "sbm":
        q = int(p.pop("q", 20))
        avg_degree = float(p.pop("avg_degree", 8.0))
        if "eps" in p and "eps_frac" in p:
            raise ValueError("give eps or eps_frac, not both")
        if "eps_frac" in p:
            eps = float(p.pop("eps_frac")) * sbm_epsilon_c(avg_degree, q)
        else:
            eps = float(p.pop("eps", 0.0))
        return gen_sbm(n, q, avg_degree, eps, seed, **p)
    raise ValueError(
        f"unknown graph family {family!r}; known: {', '.join(GRAPH_FAMILIES)}"
    )


def build_id() -> str:
    """git describe of the enclosing repository, or the package version."""
    here = pathlib.Path(__file__).resolve()
    for parent in here.parents:
        if (parent / ".git").exists():
            try:
                out = subprocess.run(
                    ["git", "-C", str(parent), "describe", "--always",
                     "--dirty"],
                    capture_output=True, text=True, timeout=10,
                )
            except OSError:
                break
            if out.returncode == 0 and out.stdout.strip():
                return out.stdout.strip()
            break
    from fgft import __version__

    return f"v{__version__}"


def config_hash(config: dict) -> str:
    """Short stable hash of a configuration mapping."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"),
                      default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value: float, digits: int = 6) -> str:
    return f"{value:.{digits}f}"


def _run_jobs(worker, cells, jobs: int):
    if jobs <= 1:
        return [worker(c) for c in cells]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, cells))


# ---------------------------------------------------------------------------
# sensor-size sweep: err_d stability at the n log n budget

def _table4_cell(cell):
    n, seed = cell
    g = gen_sensor(n, seed=seed)
    l = laplacian(g)
    j = default_budget(n)
    t0 = time.perf_counter()
    f = build_fgft(l, j, engine="parallel")
    dt = time.perf_counter() - t0
    return n, seed, err_d(f, l), dt


def bench_table4(sizes=TABLE4_SIZES, seeds=range(10), jobs: int = 1):
    """Sensor graphs at J = 2 n log2 n, parallel engine.

    Returns (header, rows); per-seed rows followed by one seed="mean" row
    per size.
    """
    build = build_id()
    cells = [(n, s) for n in sizes for s in seeds]
    results = _run_jobs(_table4_cell, cells, jobs)
    header = ["seed", "build", "config", "family", "n", "givens", "rcg",
              "err_d", "build_time_s"]
    rows = []
    for n in sizes:
        j = default_budget(n)
        conf = config_hash({"table": 4, "family": "sensor", "n": n,
                            "givens": j, "engine": "parallel"})
        got = sorted(r for r in results if r[0] == n)
        for _, seed, ed, dt in got:
            rows.append([str(seed), build, conf, "sensor", str(n), str(j),
                         f"{rcg_for(n, j):.2f}", _fmt(ed), _fmt(dt, 3)])
        mean_ed = float(np.mean([r[2] for r in got]))
        mean_dt = float(np.mean([r[3] for r in got]))
        rows.append(["mean", build, conf, "sensor", str(n), str(j),
                     f"{rcg_for(n, j):.2f}", _fmt(mean_ed), _fmt(mean_dt, 3)])
    return header, rows


def rcg_for(n: int, givens: int) -> float:
    """Complexity gain n^2 / (4 J) of a J-rotation transform on n nodes."""
    if givens <= 0:
        return math.inf
    return n * n / (4.0 * givens)


# ---------------------------------------------------------------------------
# SBM structure sweep: err_d / err_s against the detectability threshold

SBM_N = 1000
SBM_Q = 20
SBM_RCG = 10.0
SBM_DEGREES = (4, 8, 16, 32)
SBM_EPS_FRACS = (0.01, 0.04, 0.1, 0.5)


def _table3_cell(cell):
    avg_degree, eps_frac, seed = cell
    eps = eps_frac * sbm_epsilon_c(avg_degree, SBM_Q)
    g = gen_sbm(SBM_N, SBM_Q, avg_degree, eps, seed)
    l = laplacian(g)
    j = givens_budget(SBM_N, rcg_target=SBM_RCG)
    t0 = time.perf_counter()
    f = build_fgft(l, j, engine="parallel")
    dt = time.perf_counter() - t0
    lam = np.linalg.eigvalsh(l)
    return (avg_degree, eps_frac, seed, err_d(f, l),
            err_s(f.lambda_hat, lam), dt)


def bench_table3(avg_degrees=SBM_DEGREES, eps_fracs=SBM_EPS_FRACS,
                 seeds=range(10), jobs: int = 1):
    """SBM n=1000, q=20 communities, RCG=10, parallel engine."""
    build = build_id()
    cells = [(d, f, s) for d in avg_degrees for f in eps_fracs
             for s in seeds]
    results = _run_jobs(_table3_cell, cells, jobs)
    j = givens_budget(SBM_N, rcg_target=SBM_RCG)
    header = ["seed", "build", "config", "family", "n", "avg_degree",
              "eps_frac", "eps", "givens", "rcg", "err_d", "err_s",
              "build_time_s"]
    rows = []
    for d in avg_degrees:
        for frac in eps_fracs:
            eps = frac * sbm_epsilon_c(d, SBM_Q)
            conf = config_hash({"table": 3, "family": "sbm", "n": SBM_N,
                                "q": SBM_Q, "avg_degree": d,
                                "eps_frac": frac, "givens": j,
                                "engine": "parallel"})
            got = sorted(r for r in results if r[0] == d and r[1] == frac)
            for _, _, seed, ed, es, dt in got:
                rows.append([str(seed), build, conf, "sbm", str(SBM_N),
                             str(d), str(frac), _fmt(eps), str(j),
                             f"{rcg_for(SBM_N, j):.2f}", _fmt(ed), _fmt(es),
                             _fmt(dt, 3)])
            mean_ed = float(np.mean([r[3] for r in got]))
            mean_es = float(np.mean([r[4] for r in got]))
            mean_dt = float(np.mean([r[5] for r in got]))
            rows.append(["mean", build, conf, "sbm", str(SBM_N), str(d),
                         str(frac), _fmt(eps), str(j),
                         f"{rcg_for(SBM_N, j):.2f}", _fmt(mean_ed),
                         _fmt(mean_es), _fmt(mean_dt, 3)])
    return header, rows


# ---------------------------------------------------------------------------
# family comparison grid: sequential vs parallel at matched budgets

def _table2_cell(cell):
    family, n, seed, engines = cell
    g = gen_graph(family, n, seed)
    l = laplacian(g)
    j = givens_budget(n, rcg_target=TABLE2_RCG[n])
    lam, u = exact_eigh(l)
    out = []
    for engine in engines:
        t0 = time.perf_counter()
        f = build_fgft(l, j, engine=engine)
        dt = time.perf_counter() - t0
        f = align_signs(f, u)
        out.append((family, n, engine, seed, err_c(dense_basis(f), u),
                    err_d(f, l), dt))
    return out


def bench_table2(families=TABLE2_FAMILIES, sizes=TABLE2_SIZES,
                 seeds=range(10),
                 engines=("sequential-efficient", "parallel"),
                 jobs: int = 1):
    """Four graph families at the complexity-gain targets of the
    comparison grid, both engines, err_c and err_d per cell."""
    for n in sizes:
        if n not in TABLE2_RCG:
            raise ValueError(f"no RCG target on record for n={n}")
    build = build_id()
    cells = [(fam, n, s, tuple(engines)) for fam in families for n in sizes
             for s in seeds]
    nested = _run_jobs(_table2_cell, cells, jobs)
    results = [r for group in nested for r in group]
    header = ["seed", "build", "config", "family", "n", "engine", "givens",
              "rcg", "err_c", "err_d", "build_time_s"]
    rows = []
    for fam in families:
        for n in sizes:
            j = givens_budget(n, rcg_target=TABLE2_RCG[n])
            for engine in engines:
                conf = config_hash({"table": 2, "family": fam, "n": n,
                                    "engine": engine, "givens": j})
                got = sorted(
                    r for r in results
                    if r[0] == fam and r[1] == n and r[2] == engine
                )
                for _, _, _, seed, ec, ed, dt in got:
                    rows.append([str(seed), build, conf, fam, str(n), engine,
                                 str(j), f"{rcg_for(n, j):.2f}", _fmt(ec),
                                 _fmt(ed), _fmt(dt, 3)])
                mean_ec = float(np.mean([r[4] for r in got]))
                mean_ed = float(np.mean([r[5] for r in got]))
                mean_dt = float(np.mean([r[6] for r in got]))
                rows.append(["mean", build, conf, fam, str(n), engine,
                             str(j), f"{rcg_for(n, j):.2f}", _fmt(mean_ec),
                             _fmt(mean_ed), _fmt(mean_dt, 3)])
    return header, rows


# ---------------------------------------------------------------------------
# band-energy curves: spectral localization against the budget

EBAND_FRACS = tuple(round(0.01 * k, 2) for k in range(26))


def bench_eband(l: np.ndarray, j_list=None, alpha_fracs=EBAND_FRACS,
                seed: int = 0):
    """Band-energy curves E_alpha(alpha/n) for several rotation budgets.

    ``l`` is a Laplacian (or any symmetric matrix) small enough for the
    exact oracle. Budgets default to {1, 2, 6} * n log2 n.
    """
    l = np.asarray(l, dtype=np.float64)
    n = l.shape[0]
    if j_list is None:
        j_list = [default_budget(n, c) for c in (1.0, 2.0, 6.0)]
    build = build_id()
    _, u = exact_eigh(l)
    header = ["seed", "build", "config", "n", "givens", "rcg", "alpha_frac",
              "alpha", "e_alpha"]
    rows = []
    for j in j_list:
        f = build_fgft(l, j, engine="parallel")
        basis = dense_basis(f)
        conf = config_hash({"bench": "eband", "n": n, "givens": j,
                            "engine": "parallel"})
        for frac in alpha_fracs:
            alpha = int(round(frac * n))
            e = band_energy(basis, u, alpha)
            rows.append([str(seed), build, conf, str(n), str(j),
                         f"{rcg_for(n, j):.2f}", f"{frac:.2f}", str(alpha),
                         _fmt(e)])
    return header, rows
