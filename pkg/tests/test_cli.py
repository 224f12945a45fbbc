import csv
import json

import pytest

from kcontact.cli import load_config, main, make_parser


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_verify_example3_reeb(tmp_path):
    assert run(tmp_path, "verify", "--model", "example3", "--set", "points=20") == 0
    reeb = rows(tmp_path / "reeb.csv")
    assert len(reeb) == 40
    names = [k for k in reeb[0] if k not in ("point", "alpha")]
    for r in reeb:
        # R_0 = d/ds, R_1 = d/dt in the example's (s, t) coordinates
        target = names[-2] if r["alpha"] == "0" else names[-1]
        assert all(abs(float(r[n]) - (n == target)) < 1e-10 for n in names)


def test_verify_canonical_n2_k3(tmp_path):
    assert run(tmp_path, "verify", "--model", "canonical", "--set", "n=2", "--set", "k=3") == 0
    report = rows(tmp_path / "report.csv")
    assert all(r["status"] == "pass" for r in report)


def test_verify_degenerate_names_condition_i(tmp_path, capsys):
    assert run(tmp_path, "verify", "--model", "degenerate-duplicate") == 1
    assert "condition(s): i" in capsys.readouterr().out
    status = {r["check"]: r["status"] for r in rows(tmp_path / "report.csv")}
    assert status["condition (i)"] == "fail"
    assert not (tmp_path / "reeb.csv").exists()


@pytest.mark.parametrize("args", [
    ("verify", "--model", "nope"),
    ("verify", "--set", "unknown_key=1"),
    ("verify", "--set", "no-equals-sign"),
    ("convergence", "--model", "coupled-strings"),
    ("symmetry", "--model", "burgers", "--set", "symmetry=boost"),
    ("frobnicate",),
])
def test_config_errors_exit_2(tmp_path, capsys, args):
    assert run(tmp_path, *args) == 2


def test_bad_config_file_exit_2(tmp_path):
    bad = tmp_path / "cfg.json"
    bad.write_text("[1, 2]")
    assert run(tmp_path, "verify", "--config", str(bad)) == 2
    bad.write_text("{not json")
    assert run(tmp_path, "verify", "--config", str(bad)) == 2


def test_flags_override_config_file(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"model": "burgers", "seed": 3, "N": 64}))
    args = make_parser().parse_args(["verify", "--config", str(cfg_file), "--seed", "7"])
    cfg = load_config(args)
    assert cfg["model"] == "burgers" and cfg["seed"] == 7 and cfg["N"] == 64


def test_env_out_overrides(tmp_path, monkeypatch):
    target = tmp_path / "env-out"
    monkeypatch.setenv("KCONTACT_OUT", str(target))
    assert main(["verify", "--model", "example3", "--out", str(tmp_path / "ignored")]) == 0
    assert (target / "report.csv").exists()
    assert not (tmp_path / "ignored").exists()


def test_simulate_string_columns(tmp_path):
    assert run(tmp_path, "simulate", "--set", "N=41", "--set", "t_end=0.2", "--set", "residual_scan=true") == 0
    with open(tmp_path / "section.csv") as fh:
        header = fh.readline().strip().split(",")
    assert header[:6] == ["t", "x", "u", "p_t", "p_x", "s_t"]
    assert (tmp_path / "residual.csv").exists()


def test_stability_violation_exit_1(tmp_path, capsys):
    assert run(tmp_path, "simulate", "--set", "N=41", "--set", "dt=0.1") == 1
    err = capsys.readouterr().err
    assert "CFL bound violated" in err and "0.0125" in err


@pytest.mark.parametrize("gamma", ["-10", "0"])
def test_simulate_burgers_and_heat(tmp_path, gamma):
    assert run(tmp_path, "simulate", "--model", "burgers", "--set", "N=64", "--set", "t_end=0.1",
               "--set", f"gamma={gamma}") == 0


def test_convergence_oscillator(tmp_path):
    assert run(tmp_path, "convergence", "--model", "oscillator") == 0
    orders = [float(r["order"]) for r in rows(tmp_path / "convergence.csv") if r["order"]]
    assert all(3.4 < o < 4.6 for o in orders)


def test_convergence_string(tmp_path):
    assert run(tmp_path, "convergence", "--set", "base_N=21", "--set", "t_end=0.5") == 0


@pytest.mark.parametrize("args", [
    ("--model", "damped-string", "--set", "N=41", "--set", "t_end=0.5"),
    ("--model", "coupled-strings", "--set", "N=41", "--set", "t_end=0.5"),
    ("--model", "oscillator"),
])
def test_dissipation_passes(tmp_path, args):
    assert run(tmp_path, "dissipation", *args) == 0


def test_symmetry_rotation_passes(tmp_path):
    assert run(tmp_path, "symmetry", "--model", "coupled-strings", "--set", "N=41", "--set", "t_end=0.3") == 0


def test_symmetry_burgers_shift_reports_classification(tmp_path, capsys):
    code = run(tmp_path, "symmetry", "--model", "burgers", "--set", "N=64", "--set", "t_end=0.2")
    out = capsys.readouterr().out
    assert "Hamiltonian check fails" in out
    assert code == 1
    assert run(tmp_path, "symmetry", "--model", "burgers", "--set", "N=64", "--set", "t_end=0.2",
               "--set", "symmetry=shift-v-compensated") == 0


def test_byte_identical_outputs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["verify", "--model", "coupled-strings", "--seed", "5", "--out", str(out)]) == 0
        assert main(["simulate", "--set", "N=21", "--set", "t_end=0.1", "--out", str(out)]) == 0
    for name in ("structure.csv", "reeb.csv", "section.csv", "report.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
