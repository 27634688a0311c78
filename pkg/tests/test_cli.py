import csv
import json

import numpy as np
import pytest

from weinorman import cli
from weinorman.config import ConfigError, ScenarioConfig, load_config, set_path

SPIN = """
N = 2
ordering = "zyz"
drift = [0.0, 0.0, 1.0]
horizon = 3.141592653589793
step = 1e-3
initial_state = [[1.0, 0.0], [0.0, 0.0]]

[policy]
mode = "reduced"

[output]
prefix = "spin"
"""

ZERO = """
N = 2
drift = [0.0, 0.0, 0.0]
horizon = 1.0
step = 0.05
initial_state = [[0.6, 0.0], [0.0, 0.8]]
"""


def write(tmp_path, text, name="scenario.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float) if len(rows) > 1 else np.empty((0, len(rows[0])))


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    d = tmp_path / "out"
    monkeypatch.setenv(cli.OUTPUT_ENV, str(d))
    return d


def random_su3_config(seed=7):
    rng = np.random.default_rng(seed)
    controls = []
    for ch in range(1, 9):
        bp = np.linspace(0.0, 1.0, 6)
        controls.append({"channel": ch, "kind": "linear", "breakpoints": bp.tolist(),
                         "values": rng.uniform(-0.5, 0.5, 6).tolist()})
    return ScenarioConfig.from_dict({
        "N": 3, "ordering": "canonical", "drift": rng.uniform(-0.5, 0.5, 8).tolist(),
        "horizon": 1.0, "step": 1e-3, "controls": controls,
        "initial_state": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
    })


# -- run ----------------------------------------------------------------------

def test_run_spin_half(tmp_path, outdir):
    assert cli.main(["run", str(write(tmp_path, SPIN))]) == 0
    report = json.loads((outdir / "spin_report.json").read_text())
    assert report["status"] == "ok"
    assert report["discrepancy_frobenius"] < 1e-8
    assert report["state_error"] < 1e-9
    header, data = read_csv(outdir / "spin_states.csv")
    assert header == ["t", "re(y_1)", "im(y_1)", "re(y_2)", "im(y_2)"]
    final = data[-1, 1::2] + 1j * data[-1, 2::2]
    assert abs(abs(final[0]) - 1.0) < 1e-12


def test_gamma_csv_header(tmp_path, outdir):
    cli.main(["run", str(write(tmp_path, SPIN))])
    header, data = read_csv(outdir / "spin_gamma.csv")
    assert header == ["t", "gamma_1", "gamma_2", "gamma_3", "det_xi"]
    assert data[0, 0] == 0.0 and abs(data[-1, 0] - np.pi) < 1e-12


def test_run_zero_config(tmp_path, outdir):
    assert cli.main(["run", str(write(tmp_path, ZERO))]) == 0
    _, gam = read_csv(outdir / "run_gamma.csv")
    np.testing.assert_array_equal(gam[:, 1:4], 0.0)
    _, st = read_csv(outdir / "run_states.csv")
    np.testing.assert_allclose(st[:, 1:], np.tile([0.6, 0.0, 0.0, 0.8], (len(st), 1)), atol=1e-15)


def test_run_random_su3(tmp_path):
    report = cli.run(random_su3_config(), tmp_path)
    assert report.status == "ok" and report.discrepancy < 1e-6


def test_report_discrepancy_recomputed(tmp_path):
    cfg = random_su3_config(3)
    report, (traj, oracle) = cli.simulate(cfg)
    from weinorman.propagator import product_of_exponentials
    seg = traj.final_segment
    u = product_of_exponentials(traj.basis, seg.order, traj.final_gamma) @ seg.anchor
    assert report.discrepancy == float(np.linalg.norm(u - oracle.final))


def test_gnuplot_script(tmp_path, outdir):
    cfg = write(tmp_path, ZERO + '\n[output]\ngnuplot = true\nprefix = "z"\n')
    cli.main(["run", str(cfg)])
    script = (outdir / "z_gamma.gp").read_text()
    assert "z_gamma.csv" in script and "gamma_3" in script


def test_env_overrides_config_directory(tmp_path, monkeypatch):
    cfg = write(tmp_path, ZERO + f'\n[output]\ndirectory = "{tmp_path / "cfgdir"}"\n')
    monkeypatch.delenv(cli.OUTPUT_ENV, raising=False)
    cli.main(["run", str(cfg)])
    assert (tmp_path / "cfgdir" / "run_report.json").exists()
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path / "envdir"))
    cli.main(["run", str(cfg)])
    assert (tmp_path / "envdir" / "run_report.json").exists()


def test_exit_code_singular(tmp_path, outdir, capsys):
    text = SPIN.replace('mode = "reduced"', 'mode = "strict"')
    assert cli.main(["run", str(write(tmp_path, text))]) == 2
    report = json.loads((outdir / "spin_report.json").read_text())
    assert report["status"] == "singular"
    assert report["error_t"] == 0.0 and report["error_gamma"] == [0.0, 0.0, 0.0]
    assert "t=0" in capsys.readouterr().err


@pytest.mark.parametrize("text", [
    "N = 2\ndrift = [0.0, 0.0]\nhorizon = 1.0\nstep = 0.1\n",
    "N = 2\ndrift = [0.0, 0.0, 0.0]\nhorizon = -1.0\nstep = 0.1\n",
    "N = 2\ndrift = [0.0, 0.0, 0.0]\nhorizon = 1.0\nstep = 0.1\nordering = [1, 2, 9]\n",
    "N = 2\ndrift = [0.0, 0.0, 0.0]\nhorizon = 1.0\nstep = 0.1\nbogus = 1\n",
    "N = 3\nordering = \"zyz\"\ndrift = [0.0, 0.0, 0.0, 0, 0, 0, 0, 0]\nhorizon = 1.0\nstep = 0.1\n",
    "N = 2\ndrift = [0.0, 0.0, 0.0]\nhorizon = 1.0\nstep = 0.1\n[policy]\nmode = \"x\"\n",
    "N = 2\ndrift = [0.0, 0.0, 0.0]\nhorizon = 1.0\nstep = 0.1\n"
    "[[controls]]\nchannel = 4\nbreakpoints = [0.0, 1.0]\nvalues = [1.0]\n",
    "N = 2\ndrift = [0.0, 0.0, 0.0]\nhorizon = 2.0\nstep = 0.1\n"
    "[[controls]]\nchannel = 1\nbreakpoints = [0.0, 1.0]\nvalues = [1.0]\n",
    "N = 2\ndrift = [0.0, 0.0, 0.0]\nhorizon = 1.0\nstep = 0.1\ninitial_state = [[0.0, 0.0], [0.0, 0.0]]\n",
    "N = 2\ndrift = [0.0, 0.0, 0.0\n",
])
def test_config_errors(tmp_path, text):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, text))
    assert cli.main(["run", str(write(tmp_path, text))]) == 1


def test_missing_file(tmp_path):
    assert cli.main(["run", str(tmp_path / "nope.toml")]) == 1


def test_round_trip(tmp_path):
    cfg = load_config(write(tmp_path, SPIN.replace("[output]", "[[controls]]\nchannel = 1\n"
                                                   "kind = \"constant\"\nbreakpoints = [0.0, 1.0, 4.0]\n"
                                                   "values = [0.2, -0.1]\n\n[output]")))
    again = load_config(write(tmp_path, cfg.dumps(), "again.toml"))
    assert again == cfg
    a = cli.run(cfg, tmp_path / "a")
    b = cli.run(again, tmp_path / "b")
    for name in ("spin_gamma.csv", "spin_states.csv", "spin_oracle_states.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    np.testing.assert_array_equal(a.u_gamma, b.u_gamma)


def test_set_path():
    data = {"a": {"b": 1}, "c": [{"d": 2}]}
    assert set_path(data, "a.b", 5) == {"a": {"b": 5}, "c": [{"d": 2}]}
    assert set_path(data, "c.0.d", 3)["c"][0]["d"] == 3
    assert data["a"]["b"] == 1
    with pytest.raises(ConfigError):
        set_path(data, "c.4.d", 1)


# -- analyze ------------------------------------------------------------------

def test_analyze_ground_state(tmp_path, outdir, capsys):
    assert cli.main(["analyze", str(write(tmp_path, SPIN)), "--universality", "--seed", "4",
                     "--samples", "20"]) == 0
    rep = json.loads((outdir / "spin_universality.json").read_text())
    assert rep["verdict"] == "inconclusive" and rep["seed"] == 4
    assert rep["members"] == 10 and len(rep["witnesses"]) == 10
    assert all(abs(abs(w[1]) - np.pi) < 1e-12 for w in rep["witnesses"])
    assert "inconclusive" in capsys.readouterr().out


def test_analyze_superposition(tmp_path, outdir):
    text = SPIN.replace("[[1.0, 0.0], [0.0, 0.0]]", "[[0.6, 0.0], [0.8, 0.0]]")
    cli.main(["analyze", str(write(tmp_path, text)), "--universality", "--samples", "12"])
    rep = json.loads((outdir / "spin_universality.json").read_text())
    assert rep["verdict"] == "inconclusive" and rep["witnesses"]


def test_analyze_degenerate_sampler(tmp_path, outdir):
    text = SPIN + '\n[universality]\nsampler = "fixed"\npoints = [[0.3, 0.0, -0.3], [1.0, 0.0, -1.0]]\n'
    cli.main(["analyze", str(write(tmp_path, text)), "--universality"])
    rep = json.loads((outdir / "spin_universality.json").read_text())
    assert rep["verdict"] == "universal" and rep["members"] == 2
    assert rep["classification_counts"]["identity"] == 2


def test_analyze_bad_sampler(tmp_path):
    text = SPIN + '\n[universality]\nsampler = "magic"\n'
    assert cli.main(["analyze", str(write(tmp_path, text))]) == 1


# -- sweep --------------------------------------------------------------------

SWEEP_BASE = """
N = 2
ordering = "canonical"
drift = [0.0, 0.0, 1.0]
horizon = 1.0
step = 1e-2

[[controls]]
channel = 2
breakpoints = [0.0, 1.0]
values = [0.1]
"""


def test_sweep_drive_amplitude(tmp_path, outdir):
    amps = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0"
    assert cli.main(["sweep", str(write(tmp_path, SWEEP_BASE)), "--param", "controls.0.values.0",
                     "--values", amps]) == 0
    with open(outdir / "run_sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0])[0] == "controls.0.values.0" and len(rows) == 10
    mins = np.array([float(r["min_abs_det"]) for r in rows])
    assert np.all(np.diff(mins) < 0)


def test_sweep_empty_grid(tmp_path, outdir):
    cfg = load_config(write(tmp_path, SWEEP_BASE))
    assert cli.sweep(cfg, [("step", [])]) == []
    assert cli.sweep(cfg, []) == []
    with open(outdir / "run_sweep.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 1


def test_sweep_step_order(tmp_path):
    cfg = random_su3_config(11)
    rows = cli.sweep(cfg, [("step", [1e-2, 1e-3])], tmp_path)
    d = np.array([r["discrepancy"] for r in rows])
    assert np.log10(d[0] / d[1]) >= 2 - 5e-4


def test_sweep_records_failures(tmp_path, outdir):
    cfg = load_config(write(tmp_path, SPIN))
    rows = cli.sweep(cfg, [("policy.mode", ["reduced", "strict", "nonsense"])])
    assert [r["status"] for r in rows] == ["ok", "singular", "config-error"]
    assert rows[1]["error"] and rows[2]["error"]


def test_sweep_two_params(tmp_path, outdir):
    assert cli.main(["sweep", str(write(tmp_path, ZERO)), "--param", "step", "--values", "0.1,0.05",
                     "--param", "horizon", "--values", "0.5,1"]) == 0
    with open(outdir / "run_sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4 and all(r["status"] == "ok" for r in rows)


def test_sweep_too_many_params(tmp_path):
    args = ["sweep", str(write(tmp_path, ZERO))]
    for p in ("step", "horizon", "drift.0"):
        args += ["--param", p, "--values", "0.1"]
    assert cli.main(args) == 1


def test_module_entry_point(tmp_path):
    import os
    import subprocess
    import sys

    env = dict(os.environ, **{cli.OUTPUT_ENV: str(tmp_path / "o")})
    proc = subprocess.run([sys.executable, "-m", "weinorman", "run", str(write(tmp_path, ZERO))],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stderr
    assert "discrepancy" in proc.stdout
    assert (tmp_path / "o" / "run_report.json").exists()
