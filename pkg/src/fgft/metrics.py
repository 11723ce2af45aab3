"""Accuracy metrics for approximate eigenbases and spectra.

All errors are dimensionless ratios:

* err_c: relative basis error ||U - U_hat||_F / ||U||_F (sign-align first).
* err_d: relative off-diagonal residual ||U_hat^T L U_hat||_offdiag / ||L||_F.
* err_s: relative eigenvalue error ||lam - lam_hat|| / ||lam||, rank-paired.
* band_energy: fraction of U_hat^T U mass within |i - j| <= alpha.
* snr_db: 10 log10(||x_hat||^2 / ||x - x_hat||^2).
"""

from __future__ import annotations

import math

import numpy as np

from fgft.diagonalize import offdiag_sq
from fgft.givens import conjugate_symmetric
from fgft.transform import FGFT

__all__ = ["err_c", "err_d", "err_s", "band_energy", "snr_db"]


def err_c(u_hat: np.ndarray, u: np.ndarray) -> float:
    """Relative Frobenius distance between two bases, column-paired."""
    u_hat = np.asarray(u_hat, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if u_hat.shape != u.shape:
        raise ValueError("bases must have identical shapes")
    denom = float(np.linalg.norm(u))
    if denom == 0.0:
        raise ValueError("reference basis has zero norm")
    return float(np.linalg.norm(u_hat - u)) / denom


def err_d(u_hat, l: np.ndarray) -> float:
    """Relative off-diagonal mass of L conjugated into the basis u_hat.

    ``u_hat`` is either a dense orthonormal matrix or an FGFT; for an FGFT
    the conjugation runs through the rotation chain without materializing
    the basis (column permutations and sign flips cannot change
    off-diagonal magnitudes, so the chain alone suffices).
    """
    l = np.asarray(l, dtype=np.float64)
    denom = float(np.linalg.norm(l))
    if denom == 0.0:
        raise ValueError("reference matrix has zero norm")
    if isinstance(u_hat, FGFT):
        work = np.array(l, dtype=np.float64, copy=True)
        if work.shape != (u_hat.n, u_hat.n):
            raise ValueError("matrix size does not match the transform")
        for g in u_hat.diag.chain.iter_rotations():
            conjugate_symmetric(work, g)
        return math.sqrt(offdiag_sq(work)) / denom
    u_hat = np.asarray(u_hat, dtype=np.float64)
    m = u_hat.T @ l @ u_hat
    return math.sqrt(offdiag_sq(m)) / denom


def err_s(lam_hat, lam, denominator: str = "vector") -> float:
    """Relative eigenvalue error with rank pairing.

    Both inputs must be sorted ascending. ``denominator`` selects the
    normalization: "vector" (Euclidean norm of lam, the default) or "max"
    (largest magnitude, i.e. the spectral radius).
    """
    lam_hat = np.asarray(lam_hat, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    if lam_hat.shape != lam.shape:
        raise ValueError("spectra must have identical lengths")
    for v in (lam_hat, lam):
        if np.any(np.diff(v) < 0):
            raise ValueError("spectra must be sorted ascending")
    if denominator == "vector":
        denom = float(np.linalg.norm(lam))
    elif denominator == "max":
        denom = float(np.max(np.abs(lam))) if lam.size else 0.0
    else:
        raise ValueError("denominator must be 'vector' or 'max'")
    if denom == 0.0:
        raise ValueError("reference spectrum has zero norm")
    return float(np.linalg.norm(lam_hat - lam)) / denom


def band_energy(u_hat: np.ndarray, u: np.ndarray, alpha: int) -> float:
    """Average energy of U_hat^T U concentrated on the |i - j| <= alpha band.

    Equals 1 for any alpha when the bases agree column-for-column, and
    grows monotonically to 1 as alpha reaches n - 1 for any pair of
    orthonormal bases.
    """
    u_hat = np.asarray(u_hat, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    n = u.shape[0]
    if u.shape != (n, n) or u_hat.shape != (n, n):
        raise ValueError("bases must be square with matching sizes")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    m = u_hat.T @ u
    idx = np.arange(n)
    band = np.abs(idx[:, None] - idx[None, :]) <= alpha
    return float(np.sum((m * band) ** 2)) / n


def snr_db(x_hat, x) -> float:
    """Signal-to-noise ratio 10 log10(||x_hat||^2 / ||x - x_hat||^2) in dB.

    Returns +inf when the estimate matches the signal exactly and -inf
    for a zero estimate with non-zero error.
    """
    x_hat = np.asarray(x_hat, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x_hat.shape != x.shape:
        raise ValueError("signals must have identical shapes")
    err = float(np.sum((x - x_hat) ** 2))
    num = float(np.sum(x_hat**2))
    if err == 0.0:
        return math.inf
    if num == 0.0:
        return -math.inf
    return 10.0 * math.log10(num / err)
