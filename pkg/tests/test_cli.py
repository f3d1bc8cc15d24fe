import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from skewforce import SlotPathField
from skewforce.cli import run
from skewforce.io_ingest import read_field_csv, write_slot_path_csv


def _csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_skew_table(capsys):
    assert run(["skew-table", "--poles", "8", "--slots", "48", "--g-max", "2"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "theta_skew_deg=7.5 " in out[0]
    rows = list(csv.DictReader(out[1:]))
    assert {r["nu"] for r in rows} == {"1", "-5", "7", "-11", "13"}
    row7 = next(r for r in rows if r["nu"] == "7")
    assert math.isclose(float(row7["kappa_continuous"]), 0.96538191527306159, rel_tol=1e-14)
    assert "kappa_step_q3" in rows[0]


def test_skew_table_fractional_orders(capsys):
    assert run(["skew-table", "--poles", "10", "--slots", "12", "--g-max", "1", "--theta", "6"]) == 0
    out = capsys.readouterr().out
    assert "-1/5" in out and "11/5" in out


def test_usage_errors_exit_1(capsys):
    assert run([]) == 1
    assert run(["frobnicate"]) == 1
    assert run(["skew-table", "--poles", "8"]) == 1
    assert run(["torque", "--config", "demo:nope"]) == 1


def test_data_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[geometry]\npole_count = 7\n")
    assert run(["torque", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert run(["torque", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert run(["axial-force", "--torque", "1", "--diameter", "0.2", "--theta", "90"]) == 2
    assert "error" in capsys.readouterr().err


def test_axial_force(capsys):
    assert run(["axial-force", "--torque", "100", "--diameter", "0.2", "--theta", "7.5"]) == 0
    row = list(csv.DictReader(capsys.readouterr().out.splitlines()))[0]
    assert math.isclose(float(row["axial_force_N"]), 131.65249758739585, rel_tol=1e-14)


def test_compare_demo(tmp_path):
    assert run(["compare", "--reference", "demo:unskewed", "--skewed", "demo:step3", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "compare_summary.json").read_text())
    ratios = summary["suppression_ratio"]
    assert ratios["order48"] < 1e-10 and ratios["order96"] < 1e-10
    assert math.isclose(ratios["order24"], 2 / 3, rel_tol=1e-9)
    rows = _csv(tmp_path / "suppression_ratios.csv")
    for r in rows:
        assert abs(float(r["ratio"]) - float(r["discrete_skew_factor"])) < 1e-9
    assert summary["conventions"]["normalization"].startswith("one-sided")


def test_synth_and_torque(tmp_path):
    assert run(["synth", "--config", "demo:vee4", "--out", str(tmp_path)]) == 0
    f = read_field_csv(tmp_path / "field_map.csv")
    assert f.br.shape == (4, 128, 384)
    assert run(["torque", "--config", "demo:unskewed", "--out", str(tmp_path), "--set", "grid.time_samples=64"]) == 0
    data = json.loads((tmp_path / "torque_summary.json").read_text())
    assert set(data["amplitude"]) == {"order24", "order48", "order96"}
    assert data["mean_torque"] > 0
    assert len(_csv(tmp_path / "torque.csv")) == 64


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SKEWFORCE_OUTPUT_DIR", str(tmp_path / "envout"))
    assert run(["synth", "--config", "demo:unskewed", "--set", "grid.time_samples=64"]) == 0
    assert (tmp_path / "envout" / "field_map.csv").exists()


def test_tooth_forces_and_spectrum(tmp_path):
    args = ["--config", "demo:step3", "--out", str(tmp_path), "--set", "grid.time_samples=64"]
    assert run(["tooth-forces"] + args) == 0
    rows = _csv(tmp_path / "tooth_forces.csv")
    assert len(rows) == 48 * 64
    assert len(_csv(tmp_path / "tooth_forces_slices.csv")) == 3 * 48 * 64
    assert run(["spectrum2d", "--component", "tangential"] + args) == 0
    assert (tmp_path / "spectrum2d_tangential.csv").exists()
    assert run(["spectrum2d", "--mode", "tooth_average"] + args) == 0
    spec = _csv(tmp_path / "spectrum2d_radial.csv")
    assert {r["m"] for r in spec} == {"0"}


def test_three_section_cli(tmp_path):
    sp = SlotPathField.zeros(1, 48, 64, 4)
    write_slot_path_csv(sp, tmp_path / "slots.csv")
    args = ["--config", "demo:unskewed", "--set", "grid.time_samples=64", "--out"]
    assert run(["tooth-forces", *args, str(tmp_path / "one")]) == 0
    assert run(["tooth-forces", "--path", "three-section", *args, str(tmp_path / "three"),
                "--set", f"evaluation.slot_paths={tmp_path / 'slots.csv'}"]) == 0
    a = (tmp_path / "one" / "tooth_forces.csv").read_bytes()
    b = (tmp_path / "three" / "tooth_forces.csv").read_bytes()
    assert a == b
    # without slot data the three-section path is a data error
    assert run(["tooth-forces", "--path", "three-section", *args, str(tmp_path / "x")]) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "skewforce", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "0.1.0" in res.stdout
