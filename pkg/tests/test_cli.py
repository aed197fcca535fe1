"""Command-line front end: scenario parsing, outputs, determinism."""

import json

import pytest

from helmshape.cli import main

FORWARD_TOML = """
wave_number = 2.0
obstacle_kind = "soft"

[geometry]
radius = 1.0
n_nodes = 64

[incident]
kind = "plane_wave"
direction = [1.0, 0.0]

[perturbation]
coeffs = [[3, 0.25, 0.0], [-3, 0.25, 0.0]]
epsilon = 1e-2
"""

CONVERGENCE_TOML = """
wave_number = 2.0
obstacle_kind = "soft"

[geometry]
radius = 1.0
n_nodes = 128

[incident]
kind = "plane_wave"
direction = [1.0, 0.0]

[perturbation]
coeffs = [[2, 0.5, 0.0], [-2, 0.5, 0.0]]
epsilon = 1e-2
epsilons = [2e-2, 1e-2, 5e-3]

[experiment]
test_order = 1
"""

DNO_TOML = """
wave_number = 2.0
obstacle_kind = "soft"

[geometry]
radius = 1.0
n_nodes = 128

[perturbation]
coeffs = [[5, 0.5, 0.0], [-5, 0.5, 0.0]]
epsilon = 1e-2
epsilons = [2e-2, 1e-2, 5e-3]

[experiment]
f_order = 2
g_order = 3
"""

RECONSTRUCT_TOML = """
wave_number = 1.0
obstacle_kind = "soft"

[geometry]
radius = 1.0
n_nodes = 64

[perturbation]
coeffs = [[3, 0.25, 0.0], [-3, 0.25, 0.0]]
epsilon = 1e-2

[experiment]
p_max = 4
"""


def _scenario(tmp_path, text, name="scenario.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_forward_outputs(tmp_path, capsys):
    scn = _scenario(tmp_path, FORWARD_TOML)
    out = tmp_path / "out"
    assert main(["forward", "--scenario", scn, "--out", str(out)]) == 0
    lines = (out / "traces.csv").read_text().strip().split("\n")
    assert lines[0].startswith("# helmshape")
    assert len(lines) == 2 + 64  # stamp + header + one row per node
    report = (out / "oracle_report.csv").read_text()
    for line in report.strip().split("\n")[2:]:
        assert float(line.split(",")[1]) < 1e-6


def test_nodes_override(tmp_path):
    scn = _scenario(tmp_path, FORWARD_TOML)
    out = tmp_path / "out"
    assert main(["forward", "--scenario", scn, "--out", str(out), "--nodes", "32"]) == 0
    lines = (out / "traces.csv").read_text().strip().split("\n")
    assert len(lines) == 2 + 32


def test_forward_deterministic(tmp_path):
    scn = _scenario(tmp_path, FORWARD_TOML)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["forward", "--scenario", scn, "--out", str(a)]) == 0
    assert main(["forward", "--scenario", scn, "--out", str(b)]) == 0
    assert (a / "traces.csv").read_bytes() == (b / "traces.csv").read_bytes()


def test_convergence_slope_and_exit(tmp_path, capsys):
    scn = _scenario(tmp_path, CONVERGENCE_TOML)
    out = tmp_path / "out"
    assert main(["convergence", "--scenario", scn, "--out", str(out)]) == 0
    lines = (out / "convergence.csv").read_text().strip().split("\n")
    assert len(lines) == 2 + 3
    slope = float(lines[-1].split(",")[-1])
    assert 1.8 < slope < 2.2
    assert "within" in capsys.readouterr().out


def test_dno_defect_table(tmp_path, capsys):
    scn = _scenario(tmp_path, DNO_TOML)
    out = tmp_path / "out"
    assert main(["dno", "--scenario", scn, "--out", str(out)]) == 0
    lines = (out / "dno_defect.csv").read_text().strip().split("\n")
    assert len(lines) == 2 + 3
    slope = float(lines[-1].split(",")[-1])
    assert slope > 1.8


def test_reconstruct_outputs(tmp_path):
    scn = _scenario(tmp_path, RECONSTRUCT_TOML)
    out = tmp_path / "out"
    assert main(["reconstruct", "--scenario", scn, "--out", str(out)]) == 0
    payload = json.loads((out / "reconstruction.json").read_text())
    by_p = {row["p"]: row for row in payload["coefficients"]}
    assert abs(by_p[3]["re"] - 0.25) < 0.025
    assert by_p[3]["rel_error"] < 0.1
    assert not payload["scaled_by_epsilon"]
    csv_lines = (out / "reconstruction.csv").read_text().strip().split("\n")
    assert len(csv_lines) == 2 + len(payload["coefficients"])


def test_malformed_toml_rejected(tmp_path, capsys):
    scn = _scenario(tmp_path, "wave_number = [unclosed")
    assert main(["forward", "--scenario", scn, "--out", str(tmp_path)]) == 2
    assert "malformed TOML" in capsys.readouterr().err


def test_missing_field_named(tmp_path, capsys):
    scn = _scenario(tmp_path, "[geometry]\nradius = 1.0\nn_nodes = 64\n")
    assert main(["forward", "--scenario", scn, "--out", str(tmp_path)]) == 2
    assert "wave_number" in capsys.readouterr().err


def test_resonant_wave_number_rejected_at_load(tmp_path, capsys):
    text = FORWARD_TOML.replace('obstacle_kind = "soft"', 'obstacle_kind = "hard"').replace(
        "wave_number = 2.0", "wave_number = 2.404825557695773"
    )
    scn = _scenario(tmp_path, text)
    assert main(["forward", "--scenario", scn, "--out", str(tmp_path)]) == 2
    assert "resonance" in capsys.readouterr().err.lower()


def test_missing_scenario_file(tmp_path, capsys):
    assert main(["forward", "--scenario", str(tmp_path / "nope.toml"), "--out", str(tmp_path)]) == 2


def test_unknown_subcommand_rejected():
    with pytest.raises(SystemExit):
        main(["frobnicate", "--scenario", "x"])
