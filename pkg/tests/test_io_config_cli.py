import os
import subprocess
import sys

import numpy as np
import pytest

from cosmotomo import io
from cosmotomo.cli import main
from cosmotomo.config import ConfigError, ExperimentConfig, dump_config, load_config, parse_config
from cosmotomo.grid import make_grid
from cosmotomo.model import ForwardModel
from cosmotomo.solvers.history import SolveHistory

DESK_CONFIG = """\
# small desk problem
n = 9
extent = 2
t_final = 1
n_slices = 6
detectors = full
phantom = dots
phantom_count = 5
phantom_box = -1,1,-1,1
noise_level = 0.01
"""


# ---- config ------------------------------------------------------------------

def test_defaults():
    cfg = parse_config("")
    assert cfg == ExperimentConfig()
    assert cfg.schedule() == pytest.approx([np.exp(k) for k in range(1, 6)])


def test_parse_and_aliases():
    cfg = parse_config("lambda = 0.5\nK = 3\nmethod = igmrf  # comment\nkeep_iterates = yes\n"
                       "lambda_schedule = 1, 2, 3\nphantom_box = -2,2,-1,1\n")
    assert cfg.lam == 0.5 and cfg.outer_iters == 3 and cfg.keep_iterates
    assert cfg.schedule() == [1.0, 2.0, 3.0]
    assert cfg.phantom_box == (-2.0, 2.0, -1.0, 1.0)


@pytest.mark.parametrize("text", ["bogus = 1", "n 51", "n = many", "method = magic",
                                  "beta = 0", "lambda_schedule = 1,2", "keep_iterates = maybe",
                                  "phantom_box = 1,2"])
def test_bad_config(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_dump_round_trip(tmp_path):
    cfg = parse_config(DESK_CONFIG + "lambda = 1.25e-4\nkeep_iterates = true\n")
    path = tmp_path / "c.cfg"
    path.write_text(dump_config(cfg))
    assert load_config(path) == cfg
    assert cfg.with_seed(9).noise_seed == 9


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")


# ---- io ----------------------------------------------------------------------

def test_image_and_vector_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    img = rng.standard_normal(25)
    io.write_image_csv(tmp_path / "f.csv", img, 5)
    np.testing.assert_array_equal(io.read_image_csv(tmp_path / "f.csv"), img)
    vec = rng.standard_normal(7) * 1e-300
    io.write_vector_csv(tmp_path / "b.csv", vec, "b")
    assert (tmp_path / "b.csv").read_text().startswith("b\n")
    np.testing.assert_array_equal(io.read_vector_csv(tmp_path / "b.csv"), vec)
    mask = rng.random(25) > 0.5
    io.write_mask_csv(tmp_path / "m.csv", mask, 5)
    np.testing.assert_array_equal(io.read_mask_csv(tmp_path / "m.csv"), mask)


def test_pgm(tmp_path):
    img = np.arange(9.0)
    io.write_pgm(tmp_path / "f.pgm", img, 3)
    lines = (tmp_path / "f.pgm").read_text().splitlines()
    assert lines[:3] == ["P2", "3 3", "255"]
    # top row of the file is the largest y
    assert lines[3].split() == ["191", "223", "255"]
    assert lines[-1].split() == ["0", "32", "64"]
    io.write_pgm(tmp_path / "flat.pgm", np.ones(4), 2)
    assert (tmp_path / "flat.pgm").read_text().splitlines()[3] == "0 0"


def test_history_round_trip(tmp_path):
    h = SolveHistory(final=np.zeros(2), residual_norms=[1.0, 0.5], error_norms=[0.8, 0.6])
    io.write_history_csv(tmp_path / "h.csv", h, {"best_index": 2, "final_err_rel": 0.6})
    it, res, err, footer = io.read_history_csv(tmp_path / "h.csv")
    assert (tmp_path / "h.csv").read_text().splitlines()[0] == "iter,res_rel,err_rel"
    np.testing.assert_array_equal(it, [1, 2])
    np.testing.assert_array_equal(res, [1.0, 0.5])
    np.testing.assert_array_equal(err, [0.8, 0.6])
    assert footer == {"best_index": "2", "final_err_rel": "0.59999999999999998"}
    io.write_history_csv(tmp_path / "h2.csv", SolveHistory(final=np.zeros(1), residual_norms=[1.0]))
    assert io.read_history_csv(tmp_path / "h2.csv")[2] is None


# ---- command line ------------------------------------------------------------

@pytest.fixture
def desk_cfg(tmp_path):
    path = tmp_path / "desk.cfg"
    path.write_text(DESK_CONFIG)
    return path


def run(*args):
    return main([str(a) for a in args])


def test_cli_pipeline(tmp_path, desk_cfg, capsys):
    out = tmp_path / "run"
    assert run("simulate", "--config", desk_cfg, "--out", out) == 0
    for name in ("f_true.csv", "f_true.pgm", "b.csv", "noise.csv"):
        assert (out / name).exists()
    b = io.read_vector_csv(out / "b.csv")
    noise = (out / "noise.csv").read_text().splitlines()
    m, level, enorm, cnorm = noise[1].split(",")
    assert int(m) == len(b) and float(enorm) / float(cnorm) == pytest.approx(0.01)

    for method in ("ls", "lsqr", "fista", "igmrf"):
        cfg = tmp_path / f"{method}.cfg"
        cfg.write_text(DESK_CONFIG + f"method = {method}\nmax_iters = 20\nkeep_iterates = true\n")
        dest = tmp_path / method
        assert run("reconstruct", out / "b.csv", "--config", cfg, "--ftrue", out / "f_true.csv",
                   "--out", dest) == 0
        _, res, err, footer = io.read_history_csv(dest / "history.csv")
        assert err is not None and footer["method"] == method
        assert float(footer["final_err_rel"]) == pytest.approx(err[-1])
        assert io.read_image_csv(dest / "fhat.csv").shape == (81,)

    assert run("spectrum", "--config", desk_cfg, "--out", out) == 0
    assert "kappa" in capsys.readouterr().out
    header, row = (out / "spectrum_summary.csv").read_text().splitlines()
    assert header == "m,n_unknowns,rank,kappa"
    assert run("picard", out / "b.csv", "--config", desk_cfg, "--out", out) == 0
    assert (out / "picard.csv").read_text().startswith("i,sigma,coef,solcoef\n")
    assert run("visible", "--config", desk_cfg, "--out", out) == 0
    assert io.read_mask_csv(out / "visible.csv").shape == (81,)


def test_noise_free_simulation_is_clean_data(tmp_path):
    cfg = tmp_path / "clean.cfg"
    cfg.write_text(DESK_CONFIG.replace("noise_level = 0.01", "noise_level = 0"))
    assert run("simulate", "--config", cfg, "--out", tmp_path) == 0
    model = ForwardModel.build(make_grid(9, 2, 1, 6), "full")
    f = io.read_image_csv(tmp_path / "f_true.csv")
    np.testing.assert_array_equal(io.read_vector_csv(tmp_path / "b.csv"), model.apply(f))


def test_seed_override(tmp_path, desk_cfg):
    run("simulate", "--config", desk_cfg, "--out", tmp_path / "s1", "--seed", 1)
    run("simulate", "--config", desk_cfg, "--out", tmp_path / "s2", "--seed", 2)
    run("simulate", "--config", desk_cfg, "--out", tmp_path / "s1b", "--seed", 1)
    b1 = (tmp_path / "s1" / "b.csv").read_bytes()
    assert b1 == (tmp_path / "s1b" / "b.csv").read_bytes()
    assert b1 != (tmp_path / "s2" / "b.csv").read_bytes()


def test_cli_config_errors(tmp_path, desk_cfg):
    bad = tmp_path / "bad.cfg"
    bad.write_text("n = 3\nextent = 1\nt_final = 1\nn_slices = 1\n")  # violates the CFL bound
    assert run("visible", "--config", bad, "--out", tmp_path) == 2
    assert run("visible", "--config", tmp_path / "missing.cfg") == 2
    (tmp_path / "b.csv").write_text("b\n1\n2\n")
    assert run("reconstruct", tmp_path / "b.csv", "--config", desk_cfg, "--out", tmp_path) == 2
    with pytest.raises(SystemExit):
        run("simulate")


def test_cli_numerical_failure(tmp_path, desk_cfg):
    out = tmp_path / "run"
    run("simulate", "--config", desk_cfg, "--out", out)
    b = io.read_vector_csv(out / "b.csv")
    b[0] = np.inf
    io.write_vector_csv(out / "b_bad.csv", b, "b")
    cfg = tmp_path / "lsqr.cfg"
    cfg.write_text(DESK_CONFIG + "method = lsqr\n")
    assert run("reconstruct", out / "b_bad.csv", "--config", cfg, "--out", out) == 3


def test_module_entry_point(tmp_path, desk_cfg):
    proc = subprocess.run([sys.executable, "-m", "cosmotomo", "visible", "--config", str(desk_cfg),
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "visible.csv").exists()


SCALE_CONFIG = """\
n = 25
detectors = 7x7
phantom = lines
phantom_count = 4
phantom_box = -7,7,-7,7
noise_level = 0.02
method = {method}
max_iters = 30
"""


def _run_all(workdir, threads):
    env = dict(os.environ, OPENBLAS_NUM_THREADS=str(threads), OMP_NUM_THREADS=str(threads),
               MKL_NUM_THREADS=str(threads))
    outputs = {}
    workdir.mkdir()
    for method in ("lsqr", "fista", "igmrf", "ls"):
        cfg = workdir / f"{method}.cfg"
        cfg.write_text(SCALE_CONFIG.format(method=method))
        out = workdir / method
        steps = [["simulate"], ["reconstruct", str(out / "b.csv"), "--ftrue", str(out / "f_true.csv")]]
        if method == "ls":
            steps += [["spectrum"], ["picard", str(out / "b.csv")], ["visible"]]
        for step in steps:
            cmd = [sys.executable, "-m", "cosmotomo", step[0], "--config", str(cfg), "--out", str(out)]
            proc = subprocess.run(cmd + step[1:], env=env, capture_output=True, text=True)
            assert proc.returncode == 0, proc.stderr
        for f in sorted(out.glob("*.csv")):
            outputs[f"{method}/{f.name}"] = f.read_bytes()
    return outputs


def test_outputs_are_byte_identical_across_runs_and_threads(tmp_path):
    a = _run_all(tmp_path / "a", 1)
    b = _run_all(tmp_path / "b", 1)
    c = _run_all(tmp_path / "c", 4)
    assert len(a) >= 15
    assert a == b
    assert a == c
