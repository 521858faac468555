import json

import numpy as np
import pytest
import yaml

from tollopt.cli import main
from tollopt.simnet import config_to_dict, desk_preset


def run_cli(args):
    return main(args)


def test_simulate_is_byte_reproducible(tmp_path, capsys):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert run_cli(["simulate", "desk", "--seed", "7", "--out", str(out_a)]) == 0
    assert run_cli(["simulate", "desk", "--seed", "7", "--out", str(out_b)]) == 0
    assert (out_a / "timeseries.csv").read_bytes() == (out_b / "timeseries.csv").read_bytes()
    assert (out_a / "summary.json").read_bytes() == (out_b / "summary.json").read_bytes()


def test_simulate_zero_toll_reports_congested_intervals(tmp_path):
    out = tmp_path / "run"
    assert run_cli(["simulate", "desk", "--seed", "3", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    densities = [float(v) for v in summary["interval_density_vpkmpl"]]
    assert all(k > 25.0 for k in densities)


def test_missing_config_exits_2_with_path(capsys):
    assert run_cli(["simulate", "/no/such/file.yaml"]) == 2
    assert "/no/such/file.yaml" in capsys.readouterr().err


def test_malformed_config_names_offending_key(tmp_path, capsys):
    doc = config_to_dict(desk_preset())
    doc["network"]["choice"]["voodoo"] = 1.0
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(doc))
    assert run_cli(["simulate", str(path)]) == 2
    assert "network.choice.voodoo" in capsys.readouterr().err


def test_toll_argument_length_checked(capsys):
    assert run_cli(["simulate", "desk", "--toll", "0.5,0.5"]) == 2
    assert "8" in capsys.readouterr().err


def test_print_config_dumps_resolved_scenario(capsys):
    assert run_cli(["simulate", "desk", "--print-config"]) == 0
    doc = yaml.safe_load(capsys.readouterr().out)
    assert doc["network"]["control"]["k_cr_vpkmpl"] == 25.0
    assert doc["problem"]["tau_max"] == [1.0, 15.0]


def test_doe_export_shape_and_header(tmp_path):
    path = tmp_path / "plan.csv"
    assert run_cli(["doe", "desk", "--seed", "1", "--out", str(path)]) == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "v_1,v_2,v_3,v_4,w_1,w_2,w_3,w_4"
    assert len(lines) - 1 == 21


def test_envelope_single_run_and_determinism(tmp_path, capsys):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert run_cli(["envelope", "desk", "--runs", "1", "--seed", "5", "--out", str(out_a)]) == 0
    assert run_cli(["envelope", "desk", "--runs", "1", "--seed", "5", "--out", str(out_b)]) == 0
    frag_a = yaml.safe_load((out_a / "envelope.yaml").read_text())
    frag_b = yaml.safe_load((out_b / "envelope.yaml").read_text())
    assert frag_a == frag_b
    a, b, c = frag_a["network"]["control"]["envelope_abc"]
    env = lambda k: ((a * k + b) * k + c) * k
    assert env(40.0) > env(20.0) > 0.0      # envelope rises with accumulation


def test_optimize_budget_below_plan_reports_plan_size(capsys):
    assert run_cli(["optimize", "desk", "--budget", "10"]) == 1
    assert "21" in capsys.readouterr().err


def test_validate_insufficient_samples(tmp_path, capsys):
    run_dir = tmp_path / "tiny"
    run_dir.mkdir()
    doc = config_to_dict(desk_preset())
    doc["problem"] = {"tau_min": [0.0, 0.0], "tau_max": [1.0, 15.0],
                      "alpha": 1 / 3, "beta": 5.0, "replications": 1,
                      "budget": 30, "delta_max": None}
    (run_dir / "config.yaml").write_text(yaml.safe_dump(doc))
    header = ("index,origin," + ",".join(f"v_{h}_per_km" for h in range(1, 5)) + ","
              + ",".join(f"w_{h}_per_h" for h in range(1, 5))
              + ",objective_rep0_vpkmpl,objective_mean_vpkmpl"
              + ",constraint_rep0_vpkmpl,constraint_mean_vpkmpl,smoothing_feasible")
    rows = ["0,initial," + ",".join(["0.0"] * 8) + ",30.0,30.0,5.0,5.0,1",
            "1,initial," + ",".join(["0.5"] * 8) + ",12.0,12.0,7.0,7.0,1"]
    (run_dir / "samples.csv").write_text(header + "\n" + "\n".join(rows) + "\n")
    assert run_cli(["validate", str(run_dir)]) == 2
    assert "insufficient samples" in capsys.readouterr().err


def test_validate_missing_run_dir(capsys):
    assert run_cli(["validate", "/no/such/run"]) == 2
