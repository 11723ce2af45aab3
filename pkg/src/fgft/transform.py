"""Approximate fast graph Fourier transform objects and their file format.

An FGFT wraps the output of a diagonalization engine. Its effective basis
is the rotation-chain product with columns reordered so eigenvalue
estimates ascend, and optionally sign-flipped per column:

    U_hat[:, k] = signs[k] * (F_1 ... F_K)[:, perm[k]]

The forward transform is U_hat^T x, applied as chain transpose, gather by
``perm``, then sign scaling; the inverse is the adjoint sequence. Both
cost four multiplications per rotation. The relative complexity gain of
an FGFT is n^2 / (4 J) for J stored rotations, the ratio of dense-basis
non-zeros to factored non-zeros.

Binary file format (little endian), version 1:

    offset  size  field
    0       4     magic "FGFT"
    4       2     version (u16)
    6       1     layout: 0 sequential, 1 parallel (u8)
    7       1     engine code (u8)
    8       4     n (u32)
    12      8     total rotation count (u64)
    20      8     factor count (u64)
    28      8     requested rotation budget (u64)
    36      8     residual squared off-diagonal mass (f64)
    44      32    source Laplacian digest (sha-256)
    76      ...   parallel layout only: factor sizes (u32 each)
    ...     20*R  rotation records (p u16, q u16, c f64, s f64)
    ...     4*n   perm (u32 each)
    ...     8*n   lambda_hat (f64 each)
    ...     1*n   signs (i8 each)
    end     4     crc32 of all preceding bytes (u32)

c and s are stored as raw 64-bit floats, so save/load round-trips are
bit-identical. Rotation indices are 16-bit: files cap n at 65535, far
above the dense-oracle guard.
"""

from __future__ import annotations

import hashlib
import math
import struct
import zlib
from dataclasses import dataclass, replace

import numpy as np

from fgft.diagonalize import (
    ApproxDiagonalization,
    parallel_truncated_jacobi,
    truncated_jacobi,
    truncated_jacobi_efficient,
)
from fgft.givens import (
    GivensRotation,
    ParallelFactor,
    RotationChain,
    chain_nnz,
    rotate_vector,
    to_dense,
)

__all__ = [
    "FGFT",
    "FgftFileError",
    "ENGINES",
    "laplacian_hash",
    "build_fgft",
    "forward",
    "inverse",
    "rcg",
    "align_signs",
    "dense_basis",
    "save_fgft",
    "load_fgft",
]

_MAGIC = b"FGFT"
_VERSION = 1
_HEADER = struct.Struct("<4sHBBIQQQd32s")
_RECORD_DTYPE = np.dtype([("p", "<u2"), ("q", "<u2"), ("c", "<f8"), ("s", "<f8")])
_MAX_FILE_N = 65535

ENGINES = {
    "sequential": truncated_jacobi,
    "sequential-efficient": truncated_jacobi_efficient,
    "parallel": parallel_truncated_jacobi,
}
_ENGINE_CODES = {"sequential": 0, "sequential-efficient": 1, "parallel": 2}
_ENGINE_NAMES = {v: k for k, v in _ENGINE_CODES.items()}
_UNKNOWN_ENGINE = 255


class FgftFileError(ValueError):
    """Transform file is missing, corrupt, or from an unsupported version."""


@dataclass(frozen=True, eq=False)
class FGFT:
    """Factored approximate graph Fourier transform.

    ``diag`` carries the rotation chain, sorted eigenvalue estimates and
    the sorting permutation; ``signs`` holds one +-1 per column of the
    effective basis; ``source_hash`` is the sha-256 digest of the
    Laplacian the transform was built from.
    """

    diag: ApproxDiagonalization
    source_hash: bytes
    engine: str
    givens_requested: int
    signs: np.ndarray

    def __post_init__(self):
        signs = np.asarray(self.signs, dtype=np.int8)
        if signs.shape != (self.n,):
            raise ValueError("signs must have length n")
        if not np.all(np.abs(signs) == 1):
            raise ValueError("signs must be +1 or -1")
        if len(self.source_hash) != 32:
            raise ValueError("source_hash must be a 32-byte digest")
        signs.setflags(write=False)
        object.__setattr__(self, "signs", signs)

    @property
    def n(self) -> int:
        return self.diag.chain.n

    @property
    def lambda_hat(self) -> np.ndarray:
        return self.diag.lambda_hat


def laplacian_hash(l: np.ndarray) -> bytes:
    """sha-256 digest of a dense matrix (shape header plus raw entries)."""
    a = np.ascontiguousarray(l, dtype=np.float64)
    h = hashlib.sha256()
    h.update(struct.pack("<QQ", *a.shape))
    h.update(a.tobytes())
    return h.digest()


def build_fgft(l: np.ndarray, givens: int, engine: str = "parallel") -> FGFT:
    """Run a diagonalization engine on l and wrap the result."""
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {sorted(ENGINES)}")
    diag = ENGINES[engine](l, givens)
    return FGFT(
        diag=diag,
        source_hash=laplacian_hash(l),
        engine=engine,
        givens_requested=int(givens),
        signs=np.ones(diag.chain.n, dtype=np.int8),
    )


def forward(f: FGFT, x) -> np.ndarray:
    """Analysis transform U_hat^T x (an isometry).

    Accepts a vector of length n or an (n, m) array of column vectors.
    """
    y = rotate_vector(f.diag.chain, x, transpose=True)
    y = y[f.diag.perm]
    return y * (f.signs if y.ndim == 1 else f.signs[:, None])


def inverse(f: FGFT, y) -> np.ndarray:
    """Synthesis transform U_hat y, the exact inverse of ``forward``."""
    y = np.array(y, dtype=np.float64, copy=True)
    if y.shape[0] != f.n:
        raise ValueError(f"expected leading dimension {f.n}, got {y.shape[0]}")
    y = y * (f.signs if y.ndim == 1 else f.signs[:, None])
    z = np.empty_like(y)
    z[f.diag.perm] = y
    return rotate_vector(f.diag.chain, z, transpose=False)


def rcg(f: FGFT) -> float:
    """Relative complexity gain n^2 / (4 J); infinite for an empty chain."""
    nnz = chain_nnz(f.diag.chain)
    if nnz == 0:
        return math.inf
    return f.n * f.n / nnz


def dense_basis(f: FGFT) -> np.ndarray:
    """Materialize the effective basis U_hat (test and oracle use only)."""
    return to_dense(f.diag.chain)[:, f.diag.perm] * f.signs[None, :]


def align_signs(f: FGFT, u_ref: np.ndarray) -> FGFT:
    """Flip basis columns so each has non-negative inner product with u_ref.

    Returns a new FGFT whose column signs satisfy
    <U_hat[:, k], u_ref[:, k]> >= 0. Sign flips never change subspaces,
    diagonalization residuals, or round-trip exactness; they only remove
    the per-column sign ambiguity before basis-to-basis comparisons.
    """
    u_ref = np.asarray(u_ref, dtype=np.float64)
    if u_ref.shape != (f.n, f.n):
        raise ValueError("reference basis must be n x n")
    v = rotate_vector(f.diag.chain, u_ref, transpose=True)
    dots = v[f.diag.perm, np.arange(f.n)]
    eff = f.signs * dots
    new_signs = np.where(eff < 0, -f.signs, f.signs).astype(np.int8)
    return replace(f, signs=new_signs)


def save_fgft(f: FGFT, path) -> None:
    """Serialize to the version-1 binary format documented above."""
    n = f.n
    if n > _MAX_FILE_N:
        raise FgftFileError(f"n={n} exceeds file-format limit {_MAX_FILE_N}")
    chain = f.diag.chain
    parallel = chain.kind == "parallel"
    rotations = list(chain.iter_rotations())
    records = np.zeros(len(rotations), dtype=_RECORD_DTYPE)
    for k, g in enumerate(rotations):
        records[k] = (g.p, g.q, g.c, g.s)
    engine_code = _ENGINE_CODES.get(f.engine, _UNKNOWN_ENGINE)
    header = _HEADER.pack(
        _MAGIC,
        _VERSION,
        1 if parallel else 0,
        engine_code,
        n,
        len(rotations),
        len(chain.factors),
        f.givens_requested,
        f.diag.residual_offdiag_sq,
        f.source_hash,
    )
    parts = [header]
    if parallel:
        sizes = np.array([len(fac) for fac in chain.factors], dtype="<u4")
        parts.append(sizes.tobytes())
    parts.append(records.tobytes())
    parts.append(np.asarray(f.diag.perm, dtype="<u4").tobytes())
    parts.append(np.asarray(f.diag.lambda_hat, dtype="<f8").tobytes())
    parts.append(np.asarray(f.signs, dtype="i1").tobytes())
    payload = b"".join(parts)
    crc = zlib.crc32(payload) & 0xFFFFFFFF
    with open(path, "wb") as fh:
        fh.write(payload)
        fh.write(struct.pack("<I", crc))


def load_fgft(path) -> FGFT:
    """Read a transform saved by ``save_fgft``; the round trip is exact."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size + 4:
        raise FgftFileError(f"{path}: file too short")
    if blob[:4] != _MAGIC:
        raise FgftFileError(f"{path}: not an FGFT file (bad magic)")
    (
        _,
        version,
        layout,
        engine_code,
        n,
        total,
        n_factors,
        requested,
        residual,
        source_hash,
    ) = _HEADER.unpack_from(blob, 0)
    # version gates everything else: later versions may move the checksum
    if version != _VERSION:
        raise FgftFileError(f"{path}: unsupported format version {version}")
    payload, (crc_stored,) = blob[:-4], struct.unpack("<I", blob[-4:])
    if zlib.crc32(payload) & 0xFFFFFFFF != crc_stored:
        raise FgftFileError(f"{path}: checksum mismatch, file is corrupt")
    if layout not in (0, 1):
        raise FgftFileError(f"{path}: unknown layout byte {layout}")
    cursor = [_HEADER.size]

    def read(count, dtype):
        dtype = np.dtype(dtype)
        start = cursor[0]
        end = start + count * dtype.itemsize
        if end > len(payload):
            raise FgftFileError(f"{path}: truncated payload")
        arr = np.frombuffer(payload, dtype=dtype, count=count, offset=start)
        cursor[0] = end
        return arr

    sizes = None
    if layout == 1:
        sizes = read(n_factors, "<u4").astype(np.int64)
        if int(sizes.sum()) != total:
            raise FgftFileError(f"{path}: factor sizes do not match rotation count")
    records = read(total, _RECORD_DTYPE)
    perm = read(n, "<u4").astype(np.intp)
    lam = read(n, "<f8").astype(np.float64)
    signs = read(n, "i1").astype(np.int8)
    if cursor[0] != len(payload):
        raise FgftFileError(f"{path}: trailing bytes in payload")

    try:
        rotations = [
            GivensRotation(int(r["p"]), int(r["q"]), float(r["c"]), float(r["s"]))
            for r in records
        ]
        if layout == 1:
            factors = []
            pos = 0
            for size in sizes:
                factors.append(ParallelFactor(tuple(rotations[pos : pos + size])))
                pos += int(size)
            chain = RotationChain(n, tuple(factors))
        else:
            if n_factors != total:
                raise FgftFileError(
                    f"{path}: sequential layout with factor count != rotations"
                )
            chain = RotationChain(n, tuple(rotations))
        diag = ApproxDiagonalization(
            chain=chain,
            lambda_hat=lam,
            perm=perm,
            residual_offdiag_sq=float(residual),
        )
        return FGFT(
            diag=diag,
            source_hash=source_hash,
            engine=_ENGINE_NAMES.get(engine_code, "unknown"),
            givens_requested=int(requested),
            signs=signs,
        )
    except FgftFileError:
        raise
    except (ValueError, TypeError) as exc:
        raise FgftFileError(f"{path}: invalid transform data ({exc})") from exc
