import csv
import os
import subprocess
import sys

import pytest

from proxpoint import cli
from proxpoint import config as cfgmod
from proxpoint.exceptions import ConfigError

BOX_CFG = "operator = box:0 0:1 1\nu = const:2 -1\nx0 = 5 5\n"
QUAD_CFG = "operator = quadratic:1 0 0 1:1 1\nu = const:5 -5\n"
CONST_CFG = "operator = constant:1 0\ndivergence_threshold = 1e6\nmax_iter = 2000000\n"
NOISY_CFG = "operator = quadratic:2 0 0 1:1 1\nu = const:3 -2\nerror = bounded:0.5:9\nmax_iter = 300\n"


def write(tmp_path, text, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def proxpoint(*args, env=None, cwd=None):
    full_env = dict(os.environ)
    full_env.pop(cfgmod.SEED_ENV, None)
    full_env.update(env or {})
    return subprocess.run([sys.executable, "-m", "proxpoint", *map(str, args)], capture_output=True, text=True, env=full_env, cwd=cwd)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# -- end-to-end exit codes ----------------------------------------------------


def test_exit_0_converged(tmp_path):
    cfg = write(tmp_path, BOX_CFG)
    r = proxpoint("run", cfg)
    assert r.returncode == 0, r.stderr
    assert r.stdout.startswith("status=CONVERGED")
    rows = read_rows(tmp_path / "exp.csv")
    assert rows[0][:8] == ["n", "beta", "alpha", "unorm", "enorm", "xnorm", "residual", "dist_to_target"]
    assert rows[0][8:] == ["x0", "x1"]
    assert float(rows[-1][7]) <= 1e-6


@pytest.mark.xfail(strict=True, reason="||x_n - P_F u|| ~ ||u - b||/n under defaults; 1e-6 is out of reach in 1e4 steps")
def test_exit_0_quadratic_defaults(tmp_path):
    assert cli.main(["run", str(write(tmp_path, QUAD_CFG)), "--quiet"]) == 0


def test_exit_2_max_iter(tmp_path):
    cfg = write(tmp_path, QUAD_CFG + "max_iter = 100\n")
    r = proxpoint("run", cfg)
    assert r.returncode == 2
    assert "status=MAX_ITER iters=100" in r.stdout
    assert len(read_rows(tmp_path / "exp.csv")) == 1 + 101


@pytest.mark.slow
def test_exit_3_diverged(tmp_path):
    cfg = write(tmp_path, CONST_CFG)
    r = proxpoint("run", cfg, "--no-validate", "--quiet")
    assert r.returncode == 3
    assert r.stdout == ""
    last = read_rows(tmp_path / "exp.csv")[-1]
    assert float(last[5]) > 1e6


def test_exit_3_diverged_fast(tmp_path):
    cfg = write(tmp_path, "operator = constant:1 0\nvariant = ppa\nbeta = poly:1:1\ndivergence_threshold = 1e6\nmax_iter = 100000\n")
    r = proxpoint("run", cfg)
    assert r.returncode == 3, r.stderr
    assert "status=DIVERGED" in r.stdout


def test_exit_4_validation(tmp_path):
    cfg = write(tmp_path, "operator = identity\ndim = 2\nu = const:1 1\nbeta = const:1\n")
    r = proxpoint("run", cfg)
    assert r.returncode == 4
    assert "β_n → ∞" in r.stderr
    assert not (tmp_path / "exp.csv").exists()
    assert proxpoint("run", cfg, "--no-validate", "--quiet").returncode == 2


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("operator = box:0:1\nbogus = 1\n", 2),
        ("operator = box:0:1\nu = const:1 2\n", 2),
        ("operator = box:0:1\n\nbeta = poly:1\n", 3),
        ("operator = wat\n", 1),
        ("operator = box:0:1\noperator = box:0:1\n", 2),
        ("# nothing\noperator box\n", 2),
    ],
)
def test_exit_4_parse_errors(tmp_path, text, lineno):
    cfg = write(tmp_path, text)
    r = proxpoint("run", cfg)
    assert r.returncode == 4
    assert f"{cfg}:{lineno}:" in r.stderr


def test_exit_4_missing_file(tmp_path):
    assert proxpoint("run", tmp_path / "nope.cfg").returncode == 4


# -- determinism and seeds ----------------------------------------------------


def test_same_seed_byte_identical(tmp_path):
    cfg = write(tmp_path, NOISY_CFG)
    proxpoint("run", cfg, "-o", tmp_path / "a.csv", env={"PROXPOINT_SEED": "5"})
    proxpoint("run", cfg, "-o", tmp_path / "b.csv", env={"PROXPOINT_SEED": "5"})
    proxpoint("run", cfg, "-o", tmp_path / "c.csv", env={"PROXPOINT_SEED": "6"})
    a, b, c = ((tmp_path / f"{k}.csv").read_bytes() for k in "abc")
    assert a == b
    assert a != c


def test_env_seed_overrides_config(tmp_path, monkeypatch):
    monkeypatch.setenv(cfgmod.SEED_ENV, "77")
    cfg = cfgmod.parse(NOISY_CFG + "seed = 3\n")
    assert cfg.seed == 77 and cfg.schedules.error.seed == 77
    monkeypatch.setenv(cfgmod.SEED_ENV, "-1")
    with pytest.raises(ConfigError):
        cfgmod.parse(NOISY_CFG)


def test_row_count_matches_iterations(tmp_path):
    cfg = write(tmp_path, NOISY_CFG)
    r = proxpoint("run", cfg)
    iters = int(r.stdout.split("iters=")[1].split()[0])
    assert len(read_rows(tmp_path / "exp.csv")) == iters + 2


def test_observed_mode_reports_gap(tmp_path):
    cfg = write(tmp_path, "operator = identity\ndim = 2\nmode = observed\nu = const:1 1\nerror = bounded:0.1:3\nmax_iter = 1000\nstop_tol = 1e-9\n")
    r = proxpoint("run", cfg)
    gap = float(r.stdout.split("max_gap=")[1])
    assert gap <= 0.1


# -- sweep --------------------------------------------------------------------


def test_sweep_closer_anchor_is_not_slower(tmp_path, capsys):
    cfg = write(tmp_path, "operator = box:0 0:1 1\nx0 = 0.5 0.5\n")
    assert cli.main(["sweep", str(cfg), "--param", "u", "--values", "2 0, 1.1 0"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert [r["status"] for r in rows] == ["CONVERGED", "CONVERGED"]
    assert int(rows[1]["iters_to_tol"]) <= int(rows[0]["iters_to_tol"])


def test_sweep_beta_exponent(tmp_path, capsys):
    cfg = write(tmp_path, QUAD_CFG + "max_iter = 50\n")
    code = cli.main(["sweep", str(cfg), "--param", "beta.p", "--values", "0.5,1,2"])
    assert code == 2
    table = (tmp_path / "exp_summary.csv").read_text().splitlines()
    assert len(table) == 1 + 3
    for k in range(3):
        assert (tmp_path / f"exp_cell{k}.csv").exists()


def test_single_value_sweep_matches_run(tmp_path):
    cfg = write(tmp_path, NOISY_CFG)
    cli.main(["run", str(cfg), "--quiet", "-o", str(tmp_path / "run.csv")])
    cli.main(["sweep", str(cfg), "--param", "u", "--values", "3 -2", "--quiet"])
    assert (tmp_path / "run.csv").read_bytes() == (tmp_path / "exp_cell0.csv").read_bytes()


def test_sweep_cells_get_own_seeds_and_parallel_matches_serial(tmp_path):
    cfg = write(tmp_path, NOISY_CFG)
    cli.main(["sweep", str(cfg), "--param", "u", "--values", "3 -2,3 -2", "--quiet", "-o", str(tmp_path / "s.csv")])
    cli.main(["sweep", str(cfg), "--param", "u", "--values", "3 -2,3 -2", "--quiet", "--jobs", "2", "-o", str(tmp_path / "p.csv")])
    s0, s1 = (tmp_path / "s_cell0.csv").read_bytes(), (tmp_path / "s_cell1.csv").read_bytes()
    assert s0 != s1
    assert s0 == (tmp_path / "p_cell0.csv").read_bytes()
    assert s1 == (tmp_path / "p_cell1.csv").read_bytes()
    assert (tmp_path / "s_summary.csv").read_bytes() == (tmp_path / "p_summary.csv").read_bytes()


def test_sweep_errors(tmp_path):
    cfg = write(tmp_path, BOX_CFG)
    assert cli.main(["sweep", str(cfg), "--param", "u", "--values", ""]) == 4
    assert cli.main(["sweep", str(cfg), "--param", "u", "--values", " , "]) == 4
    assert cli.main(["sweep", str(cfg), "--param", "nonsense", "--values", "1"]) == 4
    assert cli.main(["sweep", str(cfg), "--param", "u", "--values", "1 2 3"]) == 4


# -- check / catalog ----------------------------------------------------------


def test_check_identity_passes(tmp_path):
    r = proxpoint("check", write(tmp_path, "operator = identity\ndim = 2\nu = const:1 1\n"))
    assert r.returncode == 0
    assert r.stdout.count("[PASS]") == 3


def test_check_empty_zero_set_is_skipped(tmp_path, capsys):
    code = cli.main(["check", str(write(tmp_path, "operator = constant:1 0\n")), "--format", "kv"])
    out = capsys.readouterr().out
    assert code == 0
    assert 'check=limit_curve status=skip detail="F empty: skipped"' in out
    assert "check=validator status=pass" in out


def test_check_alpha_const_fails(tmp_path, capsys):
    code = cli.main(["check", str(write(tmp_path, "operator = identity\ndim = 1\nalpha = const:1\n"))])
    assert code == 1
    assert "[FAIL] validator" in capsys.readouterr().out


def test_check_bad_config(tmp_path):
    assert cli.main(["check", str(write(tmp_path, "operator = nope\n"))]) == 4


def test_catalog_lists_everything(capsys):
    assert cli.main(["catalog"]) == 0
    out = capsys.readouterr().out
    for word in ("identity", "quadratic", "box", "ball", "skew", "constant", "smooth", "poly:a:p", "inv:a", "oneminus", "halpern", "bounded", "growing", "summable"):
        assert word in out
