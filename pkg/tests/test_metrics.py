import math

import numpy as np
import pytest

import fgft

from conftest import random_symmetric


def test_err_c_basic():
    u = np.linalg.qr(np.random.default_rng(0).standard_normal((6, 6)))[0]
    assert fgft.err_c(u, u) == 0.0
    # hand value: perturb one column of an orthonormal basis by delta
    delta = 1e-3
    v = u.copy()
    v[:, 0] = v[:, 0] + delta * u[:, 1]
    # ||U - V||_F = delta, ||U||_F = sqrt(6)
    assert fgft.err_c(v, u) == pytest.approx(delta / math.sqrt(6), rel=1e-10)
    with pytest.raises(ValueError):
        fgft.err_c(u, u[:, :3])


def test_err_d_dense_and_chain_agree():
    l = fgft.laplacian(fgft.gen_sensor(24, seed=1))
    f = fgft.build_fgft(l, 60, engine="parallel")
    through_chain = fgft.err_d(f, l)
    through_dense = fgft.err_d(fgft.dense_basis(f), l)
    assert through_chain == pytest.approx(through_dense, rel=1e-12)


def test_err_d_zero_budget_is_relative_offdiag_mass():
    l = fgft.laplacian(fgft.gen_ring(10))
    f = fgft.build_fgft(l, 0, engine="sequential")
    off = l - np.diag(np.diag(l))
    assert fgft.err_d(f, l) == pytest.approx(
        np.linalg.norm(off) / np.linalg.norm(l), rel=1e-13)


def test_err_d_identity_basis_on_diagonal_matrix():
    d = np.diag([1.0, 2.0, 3.0])
    assert fgft.err_d(np.eye(3), d) == 0.0


def test_err_s_hand_value():
    lam = np.array([0.0, 1.0, 2.0, 3.0])
    lam_hat = np.array([0.0, 1.0, 2.0, 4.0])
    # ||diff||_2 = 1, ||lam||_2 = sqrt(14)
    assert fgft.err_s(lam_hat, lam) == pytest.approx(1.0 / math.sqrt(14),
                                                     rel=1e-14)
    assert fgft.err_s(lam, lam) == 0.0
    assert fgft.err_s(lam_hat, lam, denominator="max") == pytest.approx(
        1.0 / 3.0, rel=1e-14)


def test_err_s_validation():
    lam = np.array([0.0, 1.0])
    with pytest.raises(ValueError):
        fgft.err_s(np.array([1.0, 0.0]), lam)  # not ascending
    with pytest.raises(ValueError):
        fgft.err_s(lam, np.array([0.0, 1.0, 2.0]))
    with pytest.raises(ValueError):
        fgft.err_s(lam, lam, denominator="spectral-ish")
    with pytest.raises(ValueError):
        fgft.err_s(np.zeros(3), np.zeros(3))


def test_band_energy_identity_and_completeness():
    rng = np.random.default_rng(3)
    u = np.linalg.qr(rng.standard_normal((12, 12)))[0]
    v = np.linalg.qr(rng.standard_normal((12, 12)))[0]
    for alpha in (0, 3, 11):
        assert fgft.band_energy(u, u, alpha) == pytest.approx(1.0, abs=1e-12)
    # any orthonormal pair: full band holds all the energy
    assert fgft.band_energy(v, u, 11) == pytest.approx(1.0, abs=1e-12)
    vals = [fgft.band_energy(v, u, a) for a in range(12)]
    assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))
    # alpha = 0 keeps only the diagonal of V^T U
    m = v.T @ u
    assert vals[0] == pytest.approx(float(np.sum(np.diag(m) ** 2)) / 12,
                                    rel=1e-12)


def test_band_energy_validation():
    u = np.eye(4)
    with pytest.raises(ValueError):
        fgft.band_energy(u, u, -1)
    with pytest.raises(ValueError):
        fgft.band_energy(u[:, :2], u, 1)


def test_snr_db_values():
    x = np.array([10.0, 0.0])
    x_hat = np.array([10.0, 1.0])
    # 10 log10(101 / 1)
    assert fgft.snr_db(x_hat, x) == pytest.approx(10 * math.log10(101),
                                                  rel=1e-12)
    assert fgft.snr_db(x, x) == math.inf
    assert fgft.snr_db(np.zeros(2), x) == -math.inf
    with pytest.raises(ValueError):
        fgft.snr_db(x, np.zeros(3))


def test_metrics_on_exact_eigh_are_tiny():
    a = random_symmetric(10, seed=8)
    lam, u = fgft.exact_eigh(a)
    assert fgft.err_d(u, a) < 1e-14
    assert fgft.err_s(lam, lam) == 0.0
    assert fgft.err_c(u, u) == 0.0
