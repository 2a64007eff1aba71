"""Config parsing, the batch runner, and the `simulate` entry point."""

import subprocess
import sys

import numpy as np
import pytest

from kinfluid.cli import main
from kinfluid.config import RunConfig, parse_config
from kinfluid.errors import ConfigurationError, SolverError
from kinfluid.runner import OUTPUT_ENV, run, scenario_kwargs
from kinfluid.scenarios import default_decomposition

QUICK = """\
# two-wall vapor slab, a few steps only
scenario = evap_weak
nx = 8
nv = 16
dt = 0.0005
t_final = 0.002
"""


@pytest.fixture(autouse=True)
def isolated_output(monkeypatch, tmp_path):
    monkeypatch.delenv(OUTPUT_ENV, raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def cfg_file(tmp_path, text=QUICK, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


# ---------------------------------------------------------------------------
# parsing

def test_parse_types_comments_and_blanks():
    cfg = parse_config("""
        scenario = ghost2d   # trailing comment
        epsilon = 2e-2

        nv = 24
        deterministic = off
    """)
    assert cfg.scenario == "ghost2d"
    assert cfg.epsilon == 0.02 and cfg.nv == 24
    assert cfg.deterministic is False
    assert cfg.dt is None and cfg.eta0 is None


@pytest.mark.parametrize("text,msg", [
    ("scenario = evap_weak\nnx 8", "line 2: expected key=value"),
    ("scenario = evap_weak\ncolor = red", "line 2: unknown key 'color'"),
    ("scenario = evap_weak\nnx = 4\nnx = 8", "line 3: duplicate key"),
    ("scenario = evap_weak\nnx = four", "line 2: key 'nx' expects int"),
    ("scenario = evap_weak\nnx =", "line 2: empty value"),
    ("nx = 8", "must set scenario"),
])
def test_parse_errors_carry_line_numbers(text, msg):
    with pytest.raises(ConfigurationError, match=msg):
        parse_config(text)


def test_overrides_replace_file_values():
    cfg = parse_config("scenario = evap_weak\nnx = 40",
                       overrides=["nx=8", "epsilon = 5e-3"])
    assert cfg.nx == 8 and cfg.epsilon == 5e-3
    with pytest.raises(ConfigurationError, match="override 1: unknown key"):
        parse_config("scenario = evap_weak", overrides=["vmax=3"])


@pytest.mark.parametrize("text,msg", [
    ("scenario = vortex", "unknown name 'vortex'"),
    ("scenario = evap_weak\nmode = spectral", "not one of"),
    ("scenario = evap_weak\ndt = 0", "dt: must be positive"),
    ("scenario = evap_weak\norder = -1", "order: must be >= 0"),
    ("scenario = evap_weak\nny = 8", "only valid for 2D"),
    ("scenario = ghost2d\nnx = 8\nny = 12", "square meshes"),
])
def test_config_validation(text, msg):
    with pytest.raises(ConfigurationError, match=msg):
        parse_config(text)


# ---------------------------------------------------------------------------
# builder keyword mapping

def test_scenario_kwargs_mapping():
    cfg = RunConfig(scenario="riemann2d", nx=16, epsilon=5e-3, eta0=2e-4)
    kw = scenario_kwargs(cfg)
    assert kw["n"] == 16 and kw["eps"] == 5e-3
    assert kw["decomposition"].eta0 == 2e-4
    assert kw["decomposition"].forced_band == 0.1   # scenario default kept
    kw = scenario_kwargs(RunConfig(scenario="evap_weak", nx=8))
    assert kw["n_x"] == 8
    assert kw["decomposition"] == default_decomposition("evap_weak")


# ---------------------------------------------------------------------------
# the entry point

def test_quick_run_exits_zero(tmp_path, capsys):
    rc = main([str(cfg_file(tmp_path))])
    assert rc == 0
    assert "wrote 3 files" in capsys.readouterr().out
    names = sorted(p.name for p in tmp_path.glob("*.csv"))
    assert names == ["diagnostics.csv", "snapshot_0000.csv", "snapshot_0001.csv"]


def test_snapshot_interval_adds_files(tmp_path):
    rc = main([str(cfg_file(tmp_path)), "--override", "snapshot_interval=0.001"])
    assert rc == 0
    snaps = sorted(p.name for p in tmp_path.glob("snapshot_*.csv"))
    assert snaps == [f"snapshot_{i:04d}.csv" for i in range(3)]


def test_missing_config_exits_one(tmp_path, capsys):
    assert main([str(tmp_path / "nope.cfg")]) == 1
    assert "cannot read config" in capsys.readouterr().err


def test_config_error_exits_one(tmp_path, capsys):
    path = cfg_file(tmp_path, "scenario = evap_weak\nnx = 7\n")
    assert main([str(path)]) == 1
    assert "configuration error" in capsys.readouterr().err


def test_solver_failure_exits_two(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr("kinfluid.cli.run",
                        lambda config: (_ for _ in ()).throw(SolverError("blew up")))
    assert main([str(cfg_file(tmp_path))]) == 2
    assert "solver failure: blew up" in capsys.readouterr().err


def test_cfl_violations_refuse_before_stepping(tmp_path, capsys):
    path = cfg_file(tmp_path, QUICK.replace("dt = 0.0005", "dt = 0.5"))
    assert main([str(path)]) == 1
    assert "configuration error" in capsys.readouterr().err
    assert list(tmp_path.glob("*.csv")) == []


def test_module_invocation(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "kinfluid.cli", str(cfg_file(tmp_path))],
        capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 0, proc.stderr
    assert "wrote 3 files" in proc.stdout


# ---------------------------------------------------------------------------
# outputs

def read_snapshot(path):
    rows = [line.rstrip("\n").split(",") for line in path.read_text().splitlines()]
    header, body = rows[0], rows[1:]
    cols = {name: np.array([r[i] for r in body], dtype=object)
            for i, name in enumerate(header)}
    for name in header[:-1]:
        cols[name] = cols[name].astype(float)
    return header, cols


def test_snapshot_format_and_round_trip(tmp_path):
    assert main([str(cfg_file(tmp_path))]) == 0
    header, cols = read_snapshot(tmp_path / "snapshot_0001.csv")
    assert header == ["t", "x", "y", "rho", "u1", "u2", "T", "p", "region"]
    assert np.all(cols["t"] == 0.002)
    assert np.all(cols["y"] == 0.0) and np.all(cols["u2"] == 0.0)
    # repr round-trips doubles, so the parsed product is bitwise consistent
    assert np.array_equal(cols["p"], cols["rho"] * cols["T"])
    assert set(cols["region"]) <= {"K", "F"}
    assert np.all((cols["x"] >= 0.0) & (cols["x"] <= 1.0))


def test_kinetic_mode_never_labels_fluid(tmp_path):
    rc = main([str(cfg_file(tmp_path)), "--override", "mode=kinetic"])
    assert rc == 0
    _, cols = read_snapshot(tmp_path / "snapshot_0001.csv")
    assert set(cols["region"]) == {"K"}


def test_runs_are_byte_identical(tmp_path):
    cfg = parse_config(QUICK)
    a, b = tmp_path / "a", tmp_path / "b"
    for target in (a, b):
        run(parse_config(QUICK, overrides=[f"output_dir={target}"]))
    for name in ("snapshot_0000.csv", "snapshot_0001.csv", "diagnostics.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_environment_overrides_output_dir(tmp_path, monkeypatch):
    env_dir = tmp_path / "from_env"
    cfg_dir = tmp_path / "from_cfg"
    monkeypatch.setenv(OUTPUT_ENV, str(env_dir))
    run(parse_config(QUICK, overrides=[f"output_dir={cfg_dir}"]))
    assert (env_dir / "diagnostics.csv").exists()
    assert not cfg_dir.exists()


def test_diagnostics_track_every_step(tmp_path):
    run(parse_config(QUICK))
    lines = (tmp_path / "diagnostics.csv").read_text().splitlines()
    assert lines[0] == "t,mass,momentum_x,momentum_y,energy,kinetic_fraction"
    assert len(lines) == 6   # header + initial row + four steps
    t = np.array([float(l.split(",")[0]) for l in lines[1:]])
    assert np.allclose(t, [0.0, 5e-4, 1e-3, 1.5e-3, 2e-3], atol=0, rtol=1e-12)


def test_hybrid_warns_outside_hydro_regime(tmp_path):
    # the diffusive CFL bound shrinks with eps, so the step drops too
    text = QUICK.replace("dt = 0.0005", "dt = 5e-5")
    text = text.replace("t_final = 0.002", "t_final = 1e-4") + "epsilon = 0.5\n"
    with pytest.warns(UserWarning, match="outside the hydrodynamic regime"):
        run(parse_config(text))
