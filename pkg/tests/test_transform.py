import dataclasses
import struct

import numpy as np
import pytest

import fgft
from fgft.givens import RotationChain
from fgft.transform import FgftFileError, laplacian_hash

from conftest import chain_product, random_symmetric


@pytest.fixture(scope="module")
def sensor32():
    g = fgft.gen_sensor(32, seed=0)
    return fgft.laplacian(g)


def test_build_fgft_engine_dispatch(sensor32):
    for engine in fgft.ENGINES:
        f = fgft.build_fgft(sensor32, 60, engine=engine)
        assert f.engine == engine
        assert f.givens_requested == 60
        assert f.n == 32
    with pytest.raises(ValueError):
        fgft.build_fgft(sensor32, 60, engine="bogus")


def test_forward_is_transposed_basis(sensor32):
    f = fgft.build_fgft(sensor32, 80, engine="parallel")
    u = fgft.dense_basis(f)
    rng = np.random.default_rng(5)
    x = rng.standard_normal(32)
    assert np.allclose(fgft.forward(f, x), u.T @ x, atol=1e-12)
    y = rng.standard_normal(32)
    assert np.allclose(fgft.inverse(f, y), u @ y, atol=1e-12)
    blk = rng.standard_normal((32, 3))
    assert np.allclose(fgft.forward(f, blk), u.T @ blk, atol=1e-12)


def test_roundtrip_identity(sensor32):
    for engine in fgft.ENGINES:
        f = fgft.build_fgft(sensor32, 100, engine=engine)
        x = np.random.default_rng(9).standard_normal((32, 20))
        rt = fgft.inverse(f, fgft.forward(f, x))
        rel = np.linalg.norm(rt - x) / np.linalg.norm(x)
        assert rel < 1e-12


def test_dense_basis_columns_follow_sorted_spectrum(sensor32):
    f = fgft.build_fgft(sensor32, 3000, engine="sequential-efficient")
    u = fgft.dense_basis(f)
    lam, u_ref = fgft.exact_eigh(sensor32)
    # converged: each column is an eigenvector for the matching eigenvalue
    assert np.allclose(sensor32 @ u, u * f.lambda_hat[None, :], atol=1e-7)
    assert np.allclose(f.lambda_hat, lam, atol=1e-9)


def test_rcg_values(sensor32):
    f = fgft.build_fgft(sensor32, 64, engine="sequential")
    assert fgft.rcg(f) == pytest.approx(32 * 32 / (4.0 * 64), rel=1e-15)
    empty = fgft.build_fgft(np.diag(np.arange(5.0)), 0, engine="sequential")
    assert fgft.rcg(empty) == np.inf


def test_align_signs_makes_products_nonnegative(sensor32):
    lam, u_ref = fgft.exact_eigh(sensor32)
    f = fgft.build_fgft(sensor32, 500, engine="parallel")
    fa = fgft.align_signs(f, u_ref)
    dots = np.sum(fgft.dense_basis(fa) * u_ref, axis=0)
    assert np.all(dots >= 0)
    # aligning never hurts the basis error
    e_before = np.linalg.norm(fgft.dense_basis(f) - u_ref)
    e_after = np.linalg.norm(fgft.dense_basis(fa) - u_ref)
    assert e_after <= e_before + 1e-12
    fb = fgft.align_signs(fa, u_ref)
    assert np.array_equal(fa.signs, fb.signs)


def test_source_hash_matches_input(sensor32):
    f = fgft.build_fgft(sensor32, 10, engine="sequential")
    assert f.source_hash == laplacian_hash(sensor32)
    assert laplacian_hash(sensor32) != laplacian_hash(sensor32 * 2.0)
    assert len(laplacian_hash(sensor32)) == 32


def _assert_same_fgft(a, b):
    assert a.n == b.n
    assert a.engine == b.engine
    assert a.givens_requested == b.givens_requested
    assert a.source_hash == b.source_hash
    assert np.array_equal(a.signs, b.signs)
    assert np.array_equal(a.diag.perm, b.diag.perm)
    assert np.array_equal(a.diag.lambda_hat, b.diag.lambda_hat)
    assert a.diag.residual_offdiag_sq == b.diag.residual_offdiag_sq
    ra = list(a.diag.chain.iter_rotations())
    rb = list(b.diag.chain.iter_rotations())
    assert len(ra) == len(rb)
    for ga, gb in zip(ra, rb):
        assert (ga.p, ga.q, ga.c, ga.s) == (gb.p, gb.q, gb.c, gb.s)


def test_save_load_roundtrip_bit_exact(sensor32, tmp_path):
    for engine in ("sequential", "parallel"):
        f = fgft.build_fgft(sensor32, 75, engine=engine)
        path = tmp_path / f"{engine}.fgft"
        fgft.save_fgft(f, path)
        f2 = fgft.load_fgft(path)
        _assert_same_fgft(f, f2)
        if engine == "parallel":
            assert [len(fa) for fa in f.diag.chain.factors] == \
                [len(fa) for fa in f2.diag.chain.factors]


def test_file_size_formula(sensor32, tmp_path):
    # header 76 B, 20 B per rotation, u32 per parallel factor,
    # u32 perm + f64 spectrum + i8 signs per node, u32 checksum
    f = fgft.build_fgft(sensor32, 64, engine="parallel")
    path = tmp_path / "t.fgft"
    fgft.save_fgft(f, path)
    n = 32
    total = f.diag.chain.rotation_count
    nf = len(f.diag.chain.factors)
    expect = 76 + 4 * nf + 20 * total + 4 * n + 8 * n + n + 4
    assert path.stat().st_size == expect
    fs = fgft.build_fgft(sensor32, 64, engine="sequential")
    fgft.save_fgft(fs, path)
    assert path.stat().st_size == 76 + 20 * 64 + 4 * n + 8 * n + n + 4


def test_load_rejects_corruption(sensor32, tmp_path):
    f = fgft.build_fgft(sensor32, 40, engine="parallel")
    path = tmp_path / "good.fgft"
    fgft.save_fgft(f, path)
    blob = bytearray(path.read_bytes())

    bad = tmp_path / "bad.fgft"

    bad.write_bytes(b"NOPE" + bytes(blob[4:]))
    with pytest.raises(FgftFileError, match="magic"):
        fgft.load_fgft(bad)

    flipped = bytearray(blob)
    flipped[200] ^= 0xFF  # payload corruption must fail the checksum
    bad.write_bytes(bytes(flipped))
    with pytest.raises(FgftFileError, match="checksum"):
        fgft.load_fgft(bad)

    bad.write_bytes(bytes(blob[:60]))
    with pytest.raises(FgftFileError):
        fgft.load_fgft(bad)

    versioned = bytearray(blob)
    versioned[4:6] = struct.pack("<H", 99)
    bad.write_bytes(bytes(versioned))
    with pytest.raises(FgftFileError, match="version"):
        fgft.load_fgft(bad)


def test_save_rejects_oversized_index_space(tmp_path):
    n = 70000
    lam = np.zeros(n)
    diag = fgft.ApproxDiagonalization(
        chain=RotationChain(n, ()),
        lambda_hat=lam,
        perm=np.arange(n, dtype=np.int64),
        residual_offdiag_sq=0.0,
    )
    f = fgft.FGFT(diag=diag, source_hash=bytes(32), engine="sequential",
                  givens_requested=0, signs=np.ones(n, dtype=np.int8))
    with pytest.raises(FgftFileError, match="65535"):
        fgft.save_fgft(f, tmp_path / "huge.fgft")


def test_forward_rejects_wrong_length(sensor32):
    f = fgft.build_fgft(sensor32, 10, engine="sequential")
    with pytest.raises(ValueError):
        fgft.forward(f, np.zeros(31))
    with pytest.raises(ValueError):
        fgft.inverse(f, np.zeros((31, 2)))


def test_signs_validation(sensor32):
    f = fgft.build_fgft(sensor32, 10, engine="sequential")
    with pytest.raises(ValueError):
        dataclasses.replace(f, signs=np.zeros(32, dtype=np.int8))


def test_fgft_on_diagonal_matrix_is_pure_permutation():
    l = np.diag([3.0, 1.0, 2.0])
    f = fgft.build_fgft(l, 0, engine="sequential")
    assert f.lambda_hat.tolist() == [1.0, 2.0, 3.0]
    x = np.array([10.0, 20.0, 30.0])
    # forward reorders coordinates into ascending-eigenvalue order
    assert np.allclose(np.sort(fgft.forward(f, x)), np.sort(x))
    assert np.allclose(fgft.inverse(f, fgft.forward(f, x)), x)


def test_dense_basis_matches_chain_times_perm_signs(sensor32):
    f = fgft.build_fgft(sensor32, 90, engine="parallel")
    dense = chain_product(f.diag.chain)
    expect = dense[:, f.diag.perm] * f.signs[None, :]
    assert np.allclose(fgft.dense_basis(f), expect, atol=1e-12)
