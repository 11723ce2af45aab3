"""End-to-end command-line tests, driven through main(argv)."""

import json
import os

import numpy as np
import pytest

import fgft
from fgft.cli import main, max_dense_n, parse_gen, parse_seeds


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_gen():
    assert parse_gen("ring:n=8") == ("ring", 8, {})
    assert parse_gen("er:n=16,p=0.2") == ("er", 16, {"p": 0.2})
    family, n, params = parse_gen("sbm:n=1000,q=20,avg_degree=8,eps_frac=0.5")
    assert (family, n) == ("sbm", 1000)
    assert params == {"q": 20, "avg_degree": 8, "eps_frac": 0.5}


def test_parse_gen_errors():
    with pytest.raises(SystemExit):
        parse_gen("ring")  # no n
    with pytest.raises(SystemExit):
        parse_gen("ring:n=0")
    with pytest.raises(SystemExit):
        parse_gen("ring:n=8,oops")
    with pytest.raises(SystemExit):
        parse_gen(":n=8")


def test_parse_seeds():
    assert parse_seeds("0..3") == [0, 1, 2, 3]
    assert parse_seeds("7") == [7]
    assert parse_seeds("1,5,9") == [1, 5, 9]
    with pytest.raises(SystemExit):
        parse_seeds("5..1")
    with pytest.raises(SystemExit):
        parse_seeds("a,b")


def test_max_dense_n_env(monkeypatch):
    assert max_dense_n() == 2048
    monkeypatch.setenv("FGFT_MAX_DENSE_N", "17")
    assert max_dense_n() == 17
    monkeypatch.setenv("FGFT_MAX_DENSE_N", "lots")
    with pytest.raises(SystemExit):
        max_dense_n()


def test_factorize_writes_transform_and_sidecar(tmp_path, capsys):
    out = str(tmp_path / "ring8.fgft")
    code, stdout, _ = run(capsys, "factorize", "--gen", "ring:n=8",
                          "--engine", "parallel", "--givens", "48",
                          "--out", out)
    assert code == 0
    assert "wrote" in stdout
    assert os.path.exists(out)
    with open(out + ".json") as fh:
        sidecar = json.load(fh)
    assert sidecar["n"] == 8
    assert sidecar["engine"] == "parallel"
    assert sidecar["givens_requested"] == 48
    # the budget is an upper bound; tiny rings converge before it runs out
    assert 0 < sidecar["rotations_used"] <= 48
    # the ring family is the hard one; a 48-rotation budget still gets close
    assert sidecar["err_d"] <= 0.15
    assert isinstance(sidecar["err_s"], float)
    assert sidecar["wall_time_s"] > 0
    assert sidecar["build"] and sidecar["config"]


def test_factorize_zero_budget(tmp_path, capsys):
    # J=0 is a legal request: the transform is a bare permutation and the
    # residual is all of the Laplacian's off-diagonal mass
    out = str(tmp_path / "zero.fgft")
    code, _, _ = run(capsys, "factorize", "--gen", "ring:n=8",
                     "--givens", "0", "--out", out)
    assert code == 0
    f = fgft.load_fgft(out)
    assert f.diag.chain.rotation_count == 0
    l = fgft.laplacian(fgft.gen_ring(8))
    off = l - np.diag(np.diag(l))
    with open(out + ".json") as fh:
        sidecar = json.load(fh)
    assert sidecar["err_d"] == pytest.approx(
        np.linalg.norm(off) / np.linalg.norm(l), rel=1e-12)


def test_eval_reports_oracle_metrics(tmp_path, capsys):
    out = str(tmp_path / "sensor.fgft")
    code, _, _ = run(capsys, "factorize", "--gen", "sensor:n=32",
                     "--seed", "3", "--out", out)
    assert code == 0
    report_path = str(tmp_path / "report.json")
    code, _, _ = run(capsys, "eval", "--fgft", out, "--gen", "sensor:n=32",
                     "--seed", "3", "--out", report_path)
    assert code == 0
    with open(report_path) as fh:
        report = json.load(fh)
    assert report["n"] == 32
    assert 0 < report["err_d"] < 1
    assert 0 <= report["err_s"] < 1
    assert 0 < report["err_c"] < 1.5
    assert report["rcg"] == pytest.approx(32 * 32 / (4 * report["rotations_used"]))


def test_eval_size_mismatch(tmp_path, capsys):
    out = str(tmp_path / "a.fgft")
    run(capsys, "factorize", "--gen", "ring:n=8", "--out", out)
    code, _, err = run(capsys, "eval", "--fgft", out, "--gen", "ring:n=16")
    assert code == 1
    assert "8x8" in err


def test_missing_graph_file_exit_code(tmp_path, capsys):
    missing = str(tmp_path / "nope.graph")
    with pytest.raises(SystemExit) as exc:
        main(["factorize", "--graph", missing,
              "--out", str(tmp_path / "x.fgft")])
    assert exc.value.code == 2
    assert missing in capsys.readouterr().err


def test_eval_missing_transform(tmp_path, capsys):
    code, _, err = run(capsys, "eval", "--fgft", str(tmp_path / "no.fgft"),
                       "--gen", "ring:n=8")
    assert code == 2
    assert "not found" in err


def test_filter_exact_allpass_is_identity(tmp_path, capsys):
    sig = tmp_path / "x.txt"
    rng = np.random.default_rng(5)
    x = rng.standard_normal(8)
    np.savetxt(sig, x)
    out = tmp_path / "y.txt"
    code, _, err = run(capsys, "filter", "--gen", "ring:n=8",
                       "--filter", "allpass", "--method", "exact",
                       "--signal", str(sig), "--out", str(out))
    assert code == 0
    y = np.loadtxt(out)
    assert np.allclose(y, x, atol=1e-10)
    stats = json.loads(err.strip().splitlines()[-1])
    assert stats["op_error"] == 0.0


def test_filter_tabulated_gain_file(tmp_path, capsys):
    sig = tmp_path / "x.txt"
    x = np.arange(1.0, 9.0)
    np.savetxt(sig, x)
    gains = tmp_path / "h.txt"
    np.savetxt(gains, 2.0 * np.ones(8))
    # doubling every spectral gain doubles the signal
    code, stdout, _ = run(capsys, "filter", "--gen", "ring:n=8",
                          "--filter", f"tab:{gains}", "--method", "exact",
                          "--signal", str(sig))
    assert code == 0
    y = np.array([float(t) for t in stdout.strip().splitlines()])
    assert np.allclose(y, 2.0 * x, atol=1e-10)


def test_filter_fgft_and_poly_track_exact(tmp_path, capsys):
    sig = tmp_path / "x.txt"
    rng = np.random.default_rng(11)
    x = rng.standard_normal(32)
    np.savetxt(sig, x)
    gen = "sensor:n=32"

    ex = tmp_path / "exact.txt"
    code, _, _ = run(capsys, "filter", "--gen", gen, "--filter", "exp:0.5",
                     "--method", "exact", "--signal", str(sig),
                     "--out", str(ex))
    assert code == 0
    y_exact = np.loadtxt(ex)

    f = tmp_path / "s32.fgft"
    run(capsys, "factorize", "--gen", gen, "--givens", "4000",
        "--engine", "sequential-efficient", "--out", str(f))
    fg = tmp_path / "fgft.txt"
    code, _, err = run(capsys, "filter", "--gen", gen, "--filter", "exp:0.5",
                       "--method", f"fgft:{f}", "--signal", str(sig),
                       "--out", str(fg))
    assert code == 0
    # converged transform: pointwise agreement with the dense oracle
    assert np.max(np.abs(np.loadtxt(fg) - y_exact)) <= 1e-6
    stats = json.loads(err.strip().splitlines()[-1])
    assert stats["op_error"] < 1e-6

    po = tmp_path / "poly.txt"
    code, _, err = run(capsys, "filter", "--gen", gen, "--filter", "exp:0.5",
                       "--method", "poly:12", "--signal", str(sig),
                       "--out", str(po))
    assert code == 0
    assert np.allclose(np.loadtxt(po), y_exact, atol=1e-3)
    stats = json.loads(err.strip().splitlines()[-1])
    assert stats["fit_residual"] < 1e-3


def test_filter_signal_length_mismatch(tmp_path, capsys):
    sig = tmp_path / "x.txt"
    np.savetxt(sig, np.ones(5))
    code, _, err = run(capsys, "filter", "--gen", "ring:n=8",
                       "--filter", "allpass", "--method", "exact",
                       "--signal", str(sig))
    assert code == 1
    assert "8 values" in err


def test_filter_bad_specs(tmp_path, capsys):
    sig = tmp_path / "x.txt"
    np.savetxt(sig, np.ones(8))
    with pytest.raises(SystemExit):
        main(["filter", "--gen", "ring:n=8", "--filter", "bandstop:3",
              "--method", "exact", "--signal", str(sig)])
    with pytest.raises(SystemExit):
        main(["filter", "--gen", "ring:n=8", "--filter", "allpass",
              "--method", "magic", "--signal", str(sig)])
    with pytest.raises(SystemExit) as exc:
        main(["filter", "--gen", "ring:n=8", "--filter", "tab:/no/such",
              "--method", "exact", "--signal", str(sig)])
    assert exc.value.code == 2


def test_oracle_cutoff_disables_dense_metrics(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("FGFT_MAX_DENSE_N", "4")
    out = str(tmp_path / "r8.fgft")
    code, _, _ = run(capsys, "factorize", "--gen", "ring:n=8", "--out", out)
    assert code == 0
    with open(out + ".json") as fh:
        assert json.load(fh)["err_s"] is None

    code, stdout, _ = run(capsys, "eval", "--fgft", out, "--gen", "ring:n=8")
    assert code == 0
    report = json.loads(stdout)
    assert report["err_s"] is None and report["err_c"] is None

    sig = tmp_path / "x.txt"
    np.savetxt(sig, np.ones(8))
    code, _, err = run(capsys, "filter", "--gen", "ring:n=8",
                       "--filter", "allpass", "--method", "exact",
                       "--signal", str(sig))
    assert code == 1
    assert "FGFT_MAX_DENSE_N" in err


def test_bench_table4_cli(tmp_path, capsys):
    out = str(tmp_path / "t4.csv")
    code, stdout, _ = run(capsys, "bench", "table4", "--sizes", "64",
                          "--seeds", "0..1", "--out", out)
    assert code == 0
    assert "3 rows" in stdout
    lines = open(out).read().strip().splitlines()
    assert len(lines) == 4
    assert lines[0].startswith("seed,build,config,")


def test_bench_eband_cli(tmp_path, capsys):
    out = str(tmp_path / "eband.csv")
    code, _, _ = run(capsys, "bench", "eband", "--gen", "sensor:n=64",
                     "--givens-list", "100,300", "--seeds", "3",
                     "--out", out)
    assert code == 0
    lines = open(out).read().strip().splitlines()
    assert len(lines) == 1 + 2 * len(fgft.EBAND_FRACS)


def test_bench_eband_needs_a_graph(capsys):
    code, _, err = run(capsys, "bench", "eband")
    assert code == 2
    assert "--graph or --gen" in err


def test_entry_point_installed():
    import importlib.metadata

    eps = importlib.metadata.entry_points(group="console_scripts")
    ours = [e for e in eps if e.name == "fgft"]
    assert ours and ours[0].value == "fgft.cli:main"
