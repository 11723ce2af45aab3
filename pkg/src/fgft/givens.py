"""Elementary Givens rotations, disjoint parallel factors, rotation chains.

A rotation acting on the coordinate pair (p, q) with angle theta is stored
through its cosine c and sine s. As a dense matrix it is the identity
except for rows and columns p and q, where it holds the 2x2 block

    [[c, -s],
     [s,  c]]

with c at (p, p) and (q, q), s at (q, p), and -s at (p, q). Every rotation
counts as four non-zero entries in complexity accounting, regardless of
the matrix size it acts on.

A chain represents the ordered product F_1 F_2 ... F_K of its factors,
where each factor is either a single rotation or a parallel factor made of
rotations with pairwise disjoint index pairs (those commute, so each
parallel factor is itself a well-defined orthogonal matrix).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NNZ_PER_ROTATION",
    "DENSE_LIMIT",
    "GivensRotation",
    "ParallelFactor",
    "RotationChain",
    "rotate_vector",
    "conjugate_symmetric",
    "to_dense",
    "chain_nnz",
]

NNZ_PER_ROTATION = 4
# dense materialization guard; keeps accidental O(n^2) blowups out of library code
DENSE_LIMIT = 4096


@dataclass(frozen=True)
class GivensRotation:
    """One plane rotation: indices 0 <= p < q and unit-norm (c, s)."""

    p: int
    q: int
    c: float
    s: float

    def __post_init__(self):
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "s", float(self.s))
        if not 0 <= self.p < self.q:
            raise ValueError(f"need 0 <= p < q, got ({self.p}, {self.q})")
        if abs(self.c * self.c + self.s * self.s - 1.0) > 1e-14:
            raise ValueError("(c, s) must lie on the unit circle")

    @classmethod
    def from_angle(cls, p: int, q: int, theta: float) -> "GivensRotation":
        return cls(p, q, math.cos(theta), math.sin(theta))

    @property
    def theta(self) -> float:
        return math.atan2(self.s, self.c)


@dataclass(frozen=True)
class ParallelFactor:
    """Rotations with pairwise disjoint supports, applied as one factor."""

    rotations: tuple

    def __post_init__(self):
        rots = tuple(self.rotations)
        if not rots:
            raise ValueError("a parallel factor needs at least one rotation")
        if not all(isinstance(g, GivensRotation) for g in rots):
            raise TypeError("rotations must be GivensRotation instances")
        support = [i for g in rots for i in (g.p, g.q)]
        if len(set(support)) != len(support):
            raise ValueError("rotation supports must be pairwise disjoint")
        object.__setattr__(self, "rotations", rots)
        # cached index/coefficient arrays for vectorized application
        object.__setattr__(self, "_ps", np.array([g.p for g in rots], dtype=np.intp))
        object.__setattr__(self, "_qs", np.array([g.q for g in rots], dtype=np.intp))
        object.__setattr__(self, "_cs", np.array([g.c for g in rots]))
        object.__setattr__(self, "_ss", np.array([g.s for g in rots]))

    def __len__(self):
        return len(self.rotations)


@dataclass(frozen=True)
class RotationChain:
    """Ordered factors acting on vectors of length n.

    Factors are homogeneous: all single rotations (sequential chain) or all
    parallel factors (parallel chain). A parallel factor may hold at most
    floor(n / 2) rotations.
    """

    n: int
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "n", int(self.n))
        factors = tuple(self.factors)
        object.__setattr__(self, "factors", factors)
        if self.n < 0:
            raise ValueError("n must be non-negative")
        kinds = {type(f) for f in factors}
        if not kinds <= {GivensRotation, ParallelFactor}:
            raise TypeError("factors must be rotations or parallel factors")
        if len(kinds) > 1:
            raise TypeError("chain factors must all have the same kind")
        for f in factors:
            rots = (f,) if isinstance(f, GivensRotation) else f.rotations
            if isinstance(f, ParallelFactor) and len(rots) > self.n // 2:
                raise ValueError("parallel factor larger than floor(n / 2)")
            for g in rots:
                if g.q >= self.n:
                    raise ValueError("rotation index out of range")

    @property
    def kind(self) -> str:
        if self.factors and isinstance(self.factors[0], ParallelFactor):
            return "parallel"
        return "sequential"

    @property
    def rotation_count(self) -> int:
        return sum(
            1 if isinstance(f, GivensRotation) else len(f) for f in self.factors
        )

    def iter_rotations(self):
        for f in self.factors:
            if isinstance(f, GivensRotation):
                yield f
            else:
                yield from f.rotations


def _apply_single(y, g, transpose):
    c, s = g.c, g.s
    p, q = g.p, g.q
    if transpose:
        tp = c * y[p] + s * y[q]
        tq = c * y[q] - s * y[p]
    else:
        tp = c * y[p] - s * y[q]
        tq = s * y[p] + c * y[q]
    y[p] = tp
    y[q] = tq


def _apply_parallel(y, f, transpose):
    ps, qs = f._ps, f._qs
    cs, ss = f._cs, f._ss
    if y.ndim == 2:
        cs = cs[:, None]
        ss = ss[:, None]
    yp = y[ps]
    yq = y[qs]
    if transpose:
        y[ps] = cs * yp + ss * yq
        y[qs] = cs * yq - ss * yp
    else:
        y[ps] = cs * yp - ss * yq
        y[qs] = ss * yp + cs * yq


def rotate_vector(chain: RotationChain, x, transpose: bool = False) -> np.ndarray:
    """Apply the chain product (or its transpose) to x.

    x may be a vector of length n or an (n, m) array whose columns are
    each transformed. Without ``transpose`` the result is F_1 ... F_K x,
    so the last factor acts first; with it, F_K^T ... F_1^T x.
    """
    y = np.array(x, dtype=np.float64, copy=True)
    if y.shape[0] != chain.n:
        raise ValueError(f"expected leading dimension {chain.n}, got {y.shape[0]}")
    factors = chain.factors if transpose else chain.factors[::-1]
    for f in factors:
        if isinstance(f, GivensRotation):
            _apply_single(y, f, transpose)
        else:
            _apply_parallel(y, f, transpose)
    return y


def conjugate_symmetric(a: np.ndarray, g: GivensRotation) -> np.ndarray:
    """In-place two-sided update a <- G^T a G for symmetric a.

    Both triangles are written from one computation, so exact symmetry is
    preserved. Only rows and columns p and q change; when (c, s) comes
    from the optimal angle for the (p, q) pair, the update zeroes a[p, q]
    and removes exactly 2 a[p, q]^2 of squared off-diagonal mass.
    """
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    p, q = g.p, g.q
    if q >= n:
        raise ValueError("rotation index out of range")
    c, s = g.c, g.s
    app, aqq, apq = a[p, p], a[q, q], a[p, q]
    row_p = c * a[p, :] + s * a[q, :]
    row_q = c * a[q, :] - s * a[p, :]
    a[p, :] = row_p
    a[:, p] = row_p
    a[q, :] = row_q
    a[:, q] = row_q
    new_pp = c * c * app + 2.0 * c * s * apq + s * s * aqq
    new_qq = s * s * app - 2.0 * c * s * apq + c * c * aqq
    new_pq = c * s * (aqq - app) + (c * c - s * s) * apq
    a[p, p] = new_pp
    a[q, q] = new_qq
    a[p, q] = new_pq
    a[q, p] = new_pq
    return a


def to_dense(chain: RotationChain, limit: int = DENSE_LIMIT) -> np.ndarray:
    """Materialize the chain product as a dense orthogonal matrix."""
    if chain.n > limit:
        raise ValueError(f"n={chain.n} exceeds dense materialization limit {limit}")
    return rotate_vector(chain, np.eye(chain.n))


def chain_nnz(chain: RotationChain) -> int:
    """Non-zero count of the factored form: four entries per rotation."""
    return NNZ_PER_ROTATION * chain.rotation_count
