import io
import subprocess
import sys

import pytest

from modsym_growth.cli import RunConfig, read_config, run
from modsym_growth.growth import CSV_COLUMNS, fit_log_bound, read_csv


def call(*argv):
    out = io.StringIO()
    code = run([str(a) for a in argv], out=out)
    return code, out.getvalue()


@pytest.fixture
def zero_file(tmp_path):
    path = tmp_path / "zero.txt"
    path.write_text("1 2 3\n1 0\n2 0\n3 0\n")
    return path


def test_gens():
    code, text = call("gens", 11)
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "index 12"
    assert sum(line.startswith("coset ") for line in lines) == 12
    assert any(line.startswith("generators ") for line in lines)


def test_cusps():
    code, text = call("cusps", 11)
    assert code == 0
    assert text.splitlines() == ["oo width 1", "0/1 width 11"]


def test_decompose():
    assert call("decompose", 1, 0, 1, 1) == (0, "T S T\n")
    assert call("decompose", 1, 0, 0, 1) == (0, "1\n")


def test_symbol_zero_series(zero_file):
    assert call("symbol", 1, "--coeffs", zero_file, 1, 1, 0, 1) == (0, "0 0 0\n")


def test_symbol_builtin():
    code, text = call("symbol", 11, "--coeffs", "builtin:11", 4, -1, 33, -8)
    assert code == 0
    re, im, ab = map(float, text.split())
    assert ab == pytest.approx(abs(complex(re, im)))
    assert ab > 0.1


def test_reduce_output():
    code, text = call("reduce", 1, 1, 5, 0, 1)
    assert code == 0
    assert text.splitlines() == ["gamma_s (1 0; 0 1)", "parabolics 1", "dist_before 2.0951860253", "dist_after 0"]


def test_scan_csv(tmp_path):
    out = tmp_path / "g.csv"
    args = ("scan", 11, "--coeffs", "builtin:11", "--size", 100, "--max-len", 20, "--seed", 7, "--out", out)
    code, text = call(*args)
    assert code == 0 and "violations 0" in text
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 101
    records = read_csv(out)
    fit = fit_log_bound(records)
    assert all(r.abs_psi <= fit.A * r.log_norm + fit.B + 1e-9 for r in records)
    first = out.read_bytes()
    assert call(*args)[0] == 0
    assert out.read_bytes() == first


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# experiment\nsize = 4\nseed = 7\nmax-len = 20\n")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert call("scan", 11, "--config", cfg, "--out", out1)[0] == 0
    assert len(out1.read_text().splitlines()) == 5
    assert call("scan", 11, "--config", cfg, "--size", 2, "--out", out2)[0] == 0
    assert out2.read_text().splitlines() == out1.read_text().splitlines()[:3]
    assert read_config(cfg) == {"size": "4", "seed": "7", "max_len": "20"}


def test_constants():
    code, text = call("constants", 1, "--coeffs", "builtin:11")
    assert code == 1  # level 11 form does not live on Gamma0(1)
    code, text = call("constants", 11)
    assert code == 0
    keys = [line.split()[0] for line in text.splitlines()]
    assert keys == ["T", "R", "S", "r_lower", "C_S", "slope", "intercept"]


@pytest.mark.parametrize(
    "argv,code",
    [
        (("symbol", 11, 1, 1, 0, 1), 0),
        (("symbol", 11, 0, -1, 1, 0), 1),  # not in Gamma0(11)
        (("symbol", 11, 2, 0, 11, 1), 1),  # determinant 3
        (("symbol", 11, "--coeffs", "missing.txt", 1, 0, 11, 1), 1),
        (("symbol", 11, "--coeffs", "builtin:37", 1, 0, 11, 1), 1),
        (("symbol", 11, "--order", 5, "--tol", 1e-12, 1, 0, 11 * 7919, 1), 2),  # beyond precision
        (("gens", 11, "--bogus"), 1),
        (("reduce", 1, "--y", -1, 1, 0, 0, 1), 1),
        (("reduce", 1, "--y", 1, 1, 0, 0, 1), 1),  # i is an elliptic point
        (("gens", 10**7), 2),
    ],
)
def test_exit_codes(argv, code, capsys):
    assert call(*argv)[0] == code
    err = capsys.readouterr().err
    if code:
        lines = [line for line in err.splitlines() if line.startswith("error:")]
        assert len(lines) == 1


def test_bad_coefficient_file(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("11 2 2\n1 1\n3 1\n")
    assert call("symbol", 11, "--coeffs", bad, 1, 0, 11, 1)[0] == 1
    assert "line 3" in capsys.readouterr().err


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(level=11, y=0.0)
    with pytest.raises(ValueError):
        RunConfig(level=11, tol=2.0)
    with pytest.raises(ValueError):
        RunConfig(level=11, seed=None)


def test_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("MODSYM_CACHE_DIR", str(tmp_path / "cache"))
    first = call("gens", 12)
    assert (tmp_path / "cache" / "gamma0_12.msgt").exists()
    assert call("gens", 12) == first
    monkeypatch.delenv("MODSYM_CACHE_DIR")
    assert call("gens", 12) == first


def test_console_script(zero_file):
    proc = subprocess.run(
        [sys.executable, "-m", "modsym_growth", "symbol", "1", "--coeffs", str(zero_file), "1", "1", "0", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "0 0 0\n"
