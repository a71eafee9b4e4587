import json
import subprocess
import sys
from dataclasses import replace

import numpy as np
import pytest

from atcontrol import cli
from atcontrol.errors import IntegrationError, NotFoundError, ScenarioError
from atcontrol.harness import (
    PRESETS,
    ScenarioRunError,
    compare_models,
    dumps,
    load,
    loads,
    parse_tf_grid,
    preset,
    reproduce,
    run_scenario,
    sweep_tf,
)
from atcontrol.harness import presets as P

SCENARIO = """
[scenario]
units = ns^-1
model = 3
alpha_sq = 0.87
delta_so = 4.71
omega_p = 0.24
omega_c = 3.8
delta_c = 30
kind = arctan
a = 10
b = 20
c = 19.2
t_f = 2   # ns
cd = bare
cd_mask = 1-3, 2-1
t_f_grid = 0.5, 1, 2
"""


def test_scenario_file_round_trip():
    s = loads(SCENARIO)
    assert s.model == 3 and s.t_f == 2.0 and s.protocol.t_f == 2.0
    assert s.cd.mask == {(1, 2), (1, 3)}
    assert s.t_f_grid == (0.5, 1.0, 2.0)
    again = loads(dumps(s))
    assert again.params() == s.params()


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_round_trip(name):
    s = preset(name)
    assert loads(dumps(s)).params() == s.params()


def test_auto_bias_matches_crossing():
    s = loads(SCENARIO.replace("kind = arctan", "kind = roland_cerf").replace("cd = bare", "cd = none"))
    assert s.protocol.d == pytest.approx(4.603, abs=1e-3)


@pytest.mark.parametrize("edit,msg", [
    (("t_f = 2   # ns", ""), "t_f"),
    (("units = ns^-1", "units = GHz"), "units"),
    (("cd_mask = 1-3, 2-1", "cd_mask = 13"), "cd_mask"),
    (("model = 3", "model = 5"), "model"),
    (("cd_mask = 1-3, 2-1", "cd_mask = 1-4"), "exceeds"),
    (("alpha_sq = 0.87", "alpha_sq = 1.5"), "alpha_sq"),
    (("[scenario]", "[other]"), "section"),
])
def test_scenario_errors(edit, msg):
    with pytest.raises(ScenarioError, match=msg):
        loads(SCENARIO.replace(*edit))


def test_validity_flag():
    assert preset("at3-cd").valid
    assert not preset("rc3").valid  # 50 ns >= 1 / gamma_t


def test_no_pump_no_transfer():
    s = preset("at3")
    s = replace(s, drive=replace(s.drive, omega_p=0.0), t_f=5.0)
    assert run_scenario(s, n_out=2).fidelity == 0


def test_run_outputs(tmp_path):
    s = preset("at4-cd-dressed")
    res = run_scenario(s, out=tmp_path / "p.csv", summary=tmp_path / "s.json", n_out=11)
    summary = json.loads((tmp_path / "s.json").read_text())
    assert set(summary) == {"fidelity", "infidelity", "validity_flag", "params"}
    assert summary["fidelity"] == res.fidelity
    assert summary["params"]["cd"] == "dressed"
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert any(line.startswith("# validity_flag = True") for line in lines)
    assert "t,P_1,P_S,P_T,P_2,F" in lines
    # dressed runs are measured in the bare basis
    assert res.measured.labels == ("1", "S", "T", "2")
    assert res.trajectory.labels == ("1", "S", "+", "-")


def test_run_errors_carry_scenario_name(monkeypatch):
    import atcontrol.harness.runs as runs

    def broken(*a, **k):
        raise IntegrationError("norm drift 1e-3 exceeds 1e-9")

    monkeypatch.setattr(runs, "evolve", broken)
    with pytest.raises(ScenarioRunError, match=r"\[at3-cd\] IntegrationError"):
        run_scenario(preset("at3-cd"))
    res = sweep_tf(preset("at3-cd"), [0.5, 1.0], workers=1)
    assert np.all(np.isnan(res.fidelity)) and len(res.errors) == 2


def test_sweep_concurrent_equals_sequential():
    s = preset("at3-cd13")
    grid = [0.5, 1.5, 3.0]
    seq = sweep_tf(s, grid, workers=1)
    par = sweep_tf(s, grid, workers=2)
    np.testing.assert_array_equal(seq.fidelity, par.fidelity)
    np.testing.assert_array_equal(seq.t_f, grid)
    assert np.all((seq.fidelity >= 0) & (seq.fidelity <= 1))


def test_sweep_guards():
    with pytest.raises(ValueError):
        sweep_tf(preset("at3-cd"), [])
    one = sweep_tf(preset("at3-cd"), [1.0], workers=4)
    assert one.fidelity.shape == (1,)
    assert one.fidelity[0] == pytest.approx(run_scenario(preset("at3-cd"), n_out=2).fidelity,
                                            abs=0)


def test_workers_env(monkeypatch):
    from atcontrol.harness.runs import default_workers

    monkeypatch.setenv("ATCONTROL_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.delenv("ATCONTROL_WORKERS")
    assert default_workers() >= 1


def test_compare_models_without_control_laser():
    s = preset("at3")
    s = replace(s, drive=replace(s.drive, omega_c=0.0))
    cmp = compare_models(s, [2.0, 10.0], workers=1)
    assert cmp.max_abs_diff < 1e-8


def test_compare_models_improves_with_detuning():
    grid = [5.0, 20.0, 50.0]
    far = compare_models(P.three_level("arctan", delta_c=100.0), grid, workers=1).max_abs_diff
    near = compare_models(P.three_level("arctan", delta_c=30.0), grid, workers=1).max_abs_diff
    assert far < near


def test_parse_tf_grid():
    np.testing.assert_allclose(parse_tf_grid("0.5:5:10"), np.linspace(0.5, 5, 10))
    np.testing.assert_allclose(parse_tf_grid("1:1000:4log"), [1, 10, 100, 1000])
    for bad in ("1:2", "a:b:3", "0:10:3log", "1:2:0"):
        with pytest.raises(ValueError):
            parse_tf_grid(bad)


def _header(path):
    return dict(line[2:].split(" = ", 1) for line in path.read_text().splitlines()
                if line.startswith("# "))


def test_reproduce_flows(tmp_path):
    paths = reproduce("fig2", tmp_path, samples=201) + reproduce("fig3", tmp_path, samples=201)
    assert [p.name for p in paths] == [
        "fig2_linear.csv", "fig2_arctan.csv", "fig2_roland_cerf.csv",
        "fig3_linear.csv", "fig3_arctan.csv", "fig3_roland_cerf.csv"]
    head = _header(tmp_path / "fig2_roland_cerf.csv")
    assert head["d"] == "4.68" and head["delta_c"] == "100.0" and head["units"] == "ns^-1"
    assert "validity_flag" in head
    head = _header(tmp_path / "fig3_arctan.csv")
    assert (head["b"], head["c"], head["model"]) == ("10.0", "18.0", "4")


def test_reproduce_fig5_is_deterministic(tmp_path):
    a = reproduce("fig5", tmp_path / "a")
    b = reproduce("fig5", tmp_path / "b")
    assert len(a) == 3
    for x, y in zip(a, b):
        assert x.read_bytes() == y.read_bytes()
        assert "validity_flag" in _header(x)


def test_reproduce_fig4_small_grid(tmp_path):
    paths = reproduce("fig4", tmp_path, grid=[1.0, 3.0], population_t_f=5.0, workers=1)
    assert len(paths) == 6
    names = (tmp_path / "fig4_fidelity_arctan.csv").read_text().splitlines()
    assert "t_f,F3,F4,dF,valid" in names


def test_reproduce_fig6(tmp_path):
    paths = reproduce("fig6", tmp_path, grid=[0.5, 1.0], samples=101, workers=1)
    rows = (tmp_path / "fig6b_infidelity.csv").read_text().splitlines()
    assert "t_f,I_full,I_no23,I_only13" in rows
    assert (tmp_path / "fig6a_cd_pulses.csv").exists() and len(paths) == 2


def test_reproduce_unknown(tmp_path):
    with pytest.raises(NotFoundError):
        reproduce("fig9", tmp_path)


# --- command line -----------------------------------------------------------

def test_cli_evolve(tmp_path, capsys):
    scen = tmp_path / "s.ini"
    scen.write_text(SCENARIO)
    rc = cli.main(["evolve", str(scen), "--out", str(tmp_path / "o.csv"),
                   "--summary", str(tmp_path / "o.json"), "--n-out", "21"])
    assert rc == 0
    assert json.loads((tmp_path / "o.json").read_text())["params"]["cd_mask"] == "1-2, 1-3"
    assert load(scen).params() == loads(SCENARIO).params()


def test_cli_spectrum_and_sweep(tmp_path):
    assert cli.main(["spectrum", "at3", "--samples", "101", "--out", str(tmp_path / "f.csv")]) == 0
    assert (tmp_path / "f.csv").read_text().count("\n") > 101
    assert cli.main(["sweep", "at3-cd", "--tf-grid", "0.5:1:2", "--workers", "1",
                     "--out", str(tmp_path / "w.csv")]) == 0
    assert "t_f,F,I,valid" in (tmp_path / "w.csv").read_text()
    assert cli.main(["sweep", "at3", "--tf-grid", "1:2:2", "--compare", "--workers", "1",
                     "--out", str(tmp_path / "c.csv")]) == 0
    assert "max_abs_dF" in (tmp_path / "c.csv").read_text()


@pytest.mark.parametrize("argv,kind", [
    (["evolve", "nope"], "FileNotFoundError"),
    (["sweep", "at3-cd", "--tf-grid", "x"], "ValueError"),
])
def test_cli_errors(argv, kind, capsys):
    assert cli.main(argv) == 1
    err = capsys.readouterr().err.strip().splitlines()[-1]
    assert err.startswith("error: ")
    assert json.loads(err[len("error: "):])["error"] == kind


def test_cli_bad_scenario_file(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text(SCENARIO.replace("t_f = 2   # ns", ""))
    assert cli.main(["evolve", str(bad)]) == 1
    line = json.loads(capsys.readouterr().err.strip().split("error: ", 1)[1])
    assert line["error"] == "ScenarioError" and "t_f" in line["message"]


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "atcontrol", "reproduce", "fig5",
                          "--outdir", str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 0
    assert len(out.stdout.split()) == 3
    out = subprocess.run([sys.executable, "-m", "atcontrol", "reproduce", "fig7"],
                         capture_output=True, text=True)
    assert out.returncode != 0
