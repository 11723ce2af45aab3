"""Shared fixtures and brute-force oracles.

The oracles here deliberately avoid the library's own fast paths: dense
rotation matrices are built entry by entry and chains are multiplied out
as explicit matrix products, so the optimized in-place kernels are always
checked against independent arithmetic.
"""

import numpy as np
import pytest

import fgft


def dense_rotation(n, p, q, c, s):
    """Dense coordinate-pair rotation: identity except rows/cols p and q.

    Convention: the 2x2 block restricted to (p, q) is [[c, -s], [s, c]].
    """
    g = np.eye(n)
    g[p, p] = c
    g[q, q] = c
    g[q, p] = s
    g[p, q] = -s
    return g


def chain_product(chain):
    """Multiply a rotation chain into a dense matrix, first factor leftmost."""
    out = np.eye(chain.n)
    for g in chain.iter_rotations():
        out = out @ dense_rotation(chain.n, g.p, g.q, g.c, g.s)
    return out


def ring_eigenvalues(n):
    """Analytic cycle-graph Laplacian spectrum 2 - 2 cos(2 pi k / n)."""
    k = np.arange(n)
    return np.sort(2.0 - 2.0 * np.cos(2.0 * np.pi * k / n))


def random_symmetric(n, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) * scale
    return (a + a.T) / 2.0


@pytest.fixture(scope="session")
def community_2048():
    """Community graph n=2048 with its exact eigendecomposition.

    Expensive (one dense 2048x2048 eigendecomposition); shared by the
    filtering tests and the acceptance gate.
    """
    g = fgft.gen_community(2048, seed=0)
    l = fgft.laplacian(g)
    lam, u = fgft.exact_eigh(l)
    return g, l, (lam, u)
