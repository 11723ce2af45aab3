"""Approximate fast graph Fourier transforms.

Greedy truncated Jacobi diagonalization of graph Laplacians: the exact
eigenbasis is replaced by a short product of Givens rotations that is
cheap to store and apply, together with the estimated spectrum. The
package provides graph generators and file IO, the diagonalization
engines (sequential, sequential-efficient, parallel), the resulting fast
transform with save/load, accuracy metrics, graph filtering, and a
benchmark CLI.
"""

from fgft.bench import (
    EBAND_FRACS,
    SBM_DEGREES,
    SBM_EPS_FRACS,
    TABLE2_FAMILIES,
    TABLE2_RCG,
    TABLE2_SIZES,
    TABLE4_SIZES,
    ExperimentConfig,
    bench_eband,
    bench_table2,
    bench_table3,
    bench_table4,
    build_id,
    config_hash,
    default_budget,
    gen_graph,
    givens_budget,
    rcg_for,
    write_csv,
)
from fgft.diagonalize import (
    AlreadyDiagonal,
    ApproxDiagonalization,
    best_rotation,
    exact_eigh,
    offdiag_sq,
    parallel_truncated_jacobi,
    truncated_jacobi,
    truncated_jacobi_efficient,
)
from fgft.filtering import (
    FilterSpec,
    PolyFilter,
    apply_poly,
    denoise_experiment,
    filter_exact,
    filter_fgft,
    filter_op_error,
    fit_poly,
    poly_rcg,
)
from fgft.givens import (
    GivensRotation,
    ParallelFactor,
    RotationChain,
    chain_nnz,
    conjugate_symmetric,
    rotate_vector,
    to_dense,
)
from fgft.graphs import (
    Graph,
    GraphFormatError,
    community_sizes,
    gen_community,
    gen_erdos_renyi,
    gen_ring,
    gen_sbm,
    gen_sensor,
    laplacian,
    load_graph,
    save_graph,
    sbm_epsilon_c,
)
from fgft.metrics import band_energy, err_c, err_d, err_s, snr_db
from fgft.transform import (
    ENGINES,
    FGFT,
    FgftFileError,
    align_signs,
    build_fgft,
    dense_basis,
    forward,
    inverse,
    laplacian_hash,
    load_fgft,
    rcg,
    save_fgft,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "EBAND_FRACS",
    "SBM_DEGREES",
    "SBM_EPS_FRACS",
    "TABLE2_FAMILIES",
    "TABLE2_RCG",
    "TABLE2_SIZES",
    "TABLE4_SIZES",
    "ExperimentConfig",
    "bench_eband",
    "bench_table2",
    "bench_table3",
    "bench_table4",
    "build_id",
    "config_hash",
    "default_budget",
    "gen_graph",
    "givens_budget",
    "rcg_for",
    "write_csv",
    "AlreadyDiagonal",
    "ApproxDiagonalization",
    "best_rotation",
    "exact_eigh",
    "offdiag_sq",
    "parallel_truncated_jacobi",
    "truncated_jacobi",
    "truncated_jacobi_efficient",
    "FilterSpec",
    "PolyFilter",
    "apply_poly",
    "denoise_experiment",
    "filter_exact",
    "filter_fgft",
    "filter_op_error",
    "fit_poly",
    "poly_rcg",
    "GivensRotation",
    "ParallelFactor",
    "RotationChain",
    "chain_nnz",
    "conjugate_symmetric",
    "rotate_vector",
    "to_dense",
    "Graph",
    "GraphFormatError",
    "community_sizes",
    "gen_community",
    "gen_erdos_renyi",
    "gen_ring",
    "gen_sbm",
    "gen_sensor",
    "laplacian",
    "load_graph",
    "save_graph",
    "sbm_epsilon_c",
    "band_energy",
    "err_c",
    "err_d",
    "err_s",
    "snr_db",
    "ENGINES",
    "FGFT",
    "FgftFileError",
    "align_signs",
    "build_fgft",
    "dense_basis",
    "forward",
    "inverse",
    "laplacian_hash",
    "load_fgft",
    "rcg",
    "save_fgft",
]
