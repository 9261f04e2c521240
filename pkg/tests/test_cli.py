import re

import pytest

from lambda_memory import cli
from lambda_memory.observables import StorageResult
from lambda_memory.sweep import AxisSpec, SweepTable


def test_simulate_long_pulse(tmp_path, capsys):
    cfg = tmp_path / "base.cfg"
    cfg.write_text("# matched rates\ngamma_eg=0.5\ngamma_es=0.5\ntopology=regular\n")
    rc = cli.main(["simulate", "--config", str(cfg), "--set", "tau_p=50", "--set", "statistics=fock"])
    assert rc == 0
    out = capsys.readouterr().out
    m = re.search(r"P_s=([0-9.]+)", out)
    assert float(m.group(1)) == pytest.approx(0.5, abs=0.01)


def test_simulate_trajectory_dump(tmp_path):
    traj = tmp_path / "traj.csv"
    assert cli.main(["simulate", "--set", "tau_p=0.5", "--trajectory", str(traj)]) == 0
    lines = traj.read_text().splitlines()
    assert "t,P_g,P_e,P_s,trace_dev,min_eig" in lines
    assert lines[0].startswith("# ")


def test_sweep_missing_bound_is_usage_error(capsys):
    rc = cli.main(["sweep", "--axis", "gamma_eg:0.05:0.95:60", "--axis", "tau_p:0.2::60"])
    assert rc == 1
    assert "usage:" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [[], ["bogus"], ["sweep"], ["simulate", "--set", "nokey"],
                                  ["simulate", "--set", "tau_p=-1"], ["figure", "99z", "--out", "x"],
                                  ["optimize", "--free", "gamma_es"]])
def test_usage_errors(argv, capsys):
    assert cli.main(argv) == 1
    assert "usage:" in capsys.readouterr().err


def test_sweep_output_byte_identical(tmp_path):
    args = ["sweep", "--axis", "omega:0:1.5:3", "--set", "gamma_eg=0.9", "--set", "gamma_es=0.1",
            "--workers", "1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert "# gamma_eg=0.9" in text and "# axis=omega:0.0:1.5:3" in text
    assert "omega,P_s,P_e_max,trace_dev,converged" in text.splitlines()


def test_figure_command(tmp_path):
    out = tmp_path / "fig8b"
    assert cli.main(["figure", "8b", "--out", str(out), "--points", "3"]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["fig8b_coherent.csv", "fig8b_fock.csv", "manifest.txt"]
    first = {p.name: p.read_bytes() for p in out.iterdir()}
    assert cli.main(["figure", "8b", "--out", str(out), "--points", "3"]) == 0
    assert {p.name: p.read_bytes() for p in out.iterdir()} == first


def test_optimize_command(tmp_path, capsys):
    log = tmp_path / "log.csv"
    rc = cli.main(["optimize", "--set", "gamma_eg=0.9", "--set", "gamma_es=0.1", "--set", "a=0.9",
                   "--set", "b=0.6", "--free", "omega:0:1.5", "--multistart", "2", "--max-evals", "60",
                   "--workers", "1", "--out", str(log)])
    assert rc == 0
    assert re.search(r"P_s=0\.\d+ omega=", capsys.readouterr().out)
    body = [ln for ln in log.read_text().splitlines() if not ln.startswith("#")]
    assert body[0] == "eval,omega,P_s,best_so_far"


def test_bad_cells_exit_code(monkeypatch, capsys):
    bad = StorageResult(0.1, 0.8, 0.2, False, 0.0, 0.0)
    good = StorageResult(0.1, 0.8, 0.2, True, 0.0, 0.0)

    def fake_sweep(params, axes, workers=None):
        ax = axes[0]
        return SweepTable(tuple(axes), (ax.values(),), [bad, good], params)

    monkeypatch.setattr(cli, "run_sweep", fake_sweep)
    assert cli.main(["sweep", "--axis", "omega:0:1:2"]) == 2
    assert cli.main(["sweep", "--axis", "omega:0:1:2", "--max-bad-cells", "1"]) == 0


def test_lm_workers_env(monkeypatch):
    from lambda_memory.sweep import default_workers

    monkeypatch.setenv("LM_WORKERS", "3")
    assert default_workers() == 3


def test_selftest_quick(capsys):
    assert cli.main(["selftest", "--quick"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") == 6
