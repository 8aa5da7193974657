from __future__ import annotations

import csv
import json

from infra.config import WORKERS_ENV
from ui.cli import EXIT_BAD_INPUT, EXIT_EXHAUSTED, EXIT_OK, _config, build_parser, main

EXAMPLE_ARGS = [
    "3839985129719",
    "--b1", "1594604", "--b2", "450302",
    "--x", "540525859015", "--y", "1621377667969",
    "--b", "3", "--form", "weierstrass", "--c", "3/4",
]


def test_version_and_usage_errors(capsys):
    assert main(["--version"]) == EXIT_OK
    assert "EC2 Factor Lab" in capsys.readouterr().out
    assert main([]) == EXIT_BAD_INPUT
    assert main(["bogus"]) == EXIT_BAD_INPUT


def test_demo(capsys):
    assert main(["demo"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "279936" in out
    assert "Example 1 reproduced" in out


def test_order_prints_common_order(capsys):
    assert main(["order", *EXAMPLE_ARGS]) == EXIT_OK
    assert "t_min=3 d=279936 (2^7 * 3^7)" in capsys.readouterr().out


def test_order_rejects_point_off_curve(capsys):
    args = list(EXAMPLE_ARGS)
    args[args.index("--y") + 1] = "1"
    assert main(["order", *args]) == EXIT_BAD_INPUT
    assert "not on the curve" in capsys.readouterr().err


def test_classify(capsys):
    assert main(["classify", *EXAMPLE_ARGS[:1], "--p", "1959583", "--q", "1959593", *EXAMPLE_ARGS[1:]]) == EXIT_OK
    out = capsys.readouterr().out
    assert "clause: ii" in out
    assert "trace_p: 32" in out


def test_factor_writes_json_lines(tmp_path, capsys):
    log = tmp_path / "run.jsonl"
    assert main(["factor", "2021027", "--seed", "1", "--json", str(log)]) == EXIT_OK
    assert capsys.readouterr().out.split() == ["1009", "2003"]
    records = [json.loads(line) for line in log.read_text(encoding="utf-8").splitlines()]
    assert records and records[-1]["factor"] in ("1009", "2003")
    assert set(records[0]) == {"trial", "b", "t_min", "outcome", "d", "factor", "ms", "additions", "triple"}


def test_factor_exhausted_and_bad_modulus(capsys):
    # B = 2 with one trial will not split a 40-bit modulus
    code = main(["factor", "3839985129719", "--b-max", "2", "--trials", "1", "--seed", "3"])
    assert code in (EXIT_OK, EXIT_EXHAUSTED)
    capsys.readouterr()
    assert main(["factor", "12"]) == EXIT_BAD_INPUT


def test_config_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "blue"}), encoding="utf-8")
    assert main(["--config", str(bad), "factor", "2021027"]) == EXIT_BAD_INPUT
    assert main(["--config", str(tmp_path / "missing.json"), "factor", "2021027"]) == EXIT_BAD_INPUT

    good = tmp_path / "good.json"
    good.write_text(json.dumps({"seed": 1, "b_schedule": [2000, 8000]}), encoding="utf-8")
    assert main(["--config", str(good), "factor", "2021027"]) == EXIT_OK
    capsys.readouterr()


def test_smooth_lab_csv(tmp_path, capsys):
    out = tmp_path / "table.csv"
    code = main(["smooth-lab", "--x", "10000", "--alpha", "0.7071", "--beta", "3/4",
                 "--theta-grid", "0,1", "--csv", str(out)])
    assert code == EXIT_OK
    assert "least theta" in capsys.readouterr().out
    with out.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["theta"] for r in rows] == ["0", "1"]


def test_factor_log_defaults_to_runs_folder(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("EC2FACTOR_HOME", str(tmp_path))
    assert main(["factor", "2021027", "--seed", "1"]) == EXIT_OK
    capsys.readouterr()
    log = tmp_path / "runs" / "factor_2021027_seed1.jsonl"
    assert json.loads(log.read_text(encoding="utf-8").splitlines()[-1])["factor"] in ("1009", "2003")


def test_smooth_lab_csv_defaults_to_runs_folder(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("EC2FACTOR_HOME", str(tmp_path))
    assert main(["smooth-lab", "--x", "10000", "--alpha", "0.7071", "--beta", "3/4"]) == EXIT_OK
    capsys.readouterr()
    assert (tmp_path / "runs" / "smooth_lab.csv").is_file()


def test_config_layers(tmp_path, monkeypatch):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"seed": 5, "trial_budget": 3}), encoding="utf-8")
    monkeypatch.setenv(WORKERS_ENV, "2")
    args = build_parser().parse_args(["--config", str(cfg_file), "factor", "2021027"])

    cfg = _config(args, seed=None, trial_budget=9)
    assert (cfg.workers, cfg.seed, cfg.trial_budget) == (2, 5, 9)

    cfg_file.write_text(json.dumps({"workers": 3}), encoding="utf-8")
    assert _config(args, workers=None).workers == 3
    assert _config(args, workers=1).workers == 1
