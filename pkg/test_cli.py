"""
CLI Tests
Every subcommand end to end through main(), with exit codes.

Run:
    pytest test_cli.py
"""

import json
from fractions import Fraction as F
from pathlib import Path

import pytest

from main import main
from models.result_models import DynamicsStep
from tools.record_tool import (
    CERTIFICATE_COLUMNS,
    CONSTRUCTION_COLUMNS,
    REPORT_COLUMNS,
    decode_models,
    decode_rows,
    parse_named_rationals,
)

INSTANCES = Path(__file__).parent / "data" / "instances"
MIXED = str(INSTANCES / "mixed_widths.json")
SHARED_PEAK = str(INSTANCES / "shared_peak.json")


# ── evaluate ──────────────────────────────────────────────────────────────────

def test_evaluate_table(capsys):
    assert main(["evaluate", "--config", MIXED]) == 0
    out = capsys.readouterr().out
    assert "2/5 (0.400000)" in out
    assert "1/5 (0.200000)" in out
    assert "3/10 (0.300000)" in out
    assert "Winners   : {1}" in out


def test_evaluate_records(capsys):
    assert main(["evaluate", "--config", MIXED, "--format", "records"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == ",".join(REPORT_COLUMNS)
    rows = decode_rows(out)
    assert [row["support"] for row in rows] == ["2/5", "1/5", "3/10"]
    assert [row["winner"] for row in rows] == ["true", "false", "false"]


def test_evaluate_with_profile_override(capsys):
    assert main(["evaluate", "--config", MIXED, "--profile", "1/5,9/20,4/5", "--format", "records"]) == 0
    rows = decode_rows(capsys.readouterr().out)
    assert rows[1]["support"] == "1/4"


def test_output_file(tmp_path, capsys):
    target = tmp_path / "report.csv"
    assert main(["evaluate", "--config", MIXED, "--format", "records", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert target.read_text().startswith("agent,location")


# ── verify ────────────────────────────────────────────────────────────────────

def test_verify_support_mode_is_refuted(capsys):
    assert main(["verify", "--config", MIXED]) == 3
    assert "agent 2" in capsys.readouterr().out


def test_verify_winner_mode_holds():
    assert main(["verify", "--config", MIXED, "--mode", "winner"]) == 0


def test_verify_grid_records(capsys):
    code = main(["verify", "--config", MIXED, "--method", "grid", "--grid-step", "1/20", "--format", "records"])
    assert code == 3
    out = capsys.readouterr().out
    assert out.splitlines()[0] == ",".join(CERTIFICATE_COLUMNS)
    row = decode_rows(out)[0]
    assert (row["method"], row["deviation_agent"], row["deviation_location"]) == ("grid", "1", "9/20")


def test_verify_with_tolerance():
    assert main(["verify", "--config", MIXED, "--epsilon", "1/20"]) == 0


# ── solve ─────────────────────────────────────────────────────────────────────

def test_solve_two_agent(capsys):
    assert main(["solve", "--config", SHARED_PEAK, "--method", "two-agent"]) == 0
    assert "TWO-AGENT" in capsys.readouterr().out


def test_solve_auto_on_width_one_half(capsys):
    assert main(["solve", "--config", str(INSTANCES / "uniform_four_half.json"), "--format", "records"]) == 0
    row = decode_rows(capsys.readouterr().out)[0]
    assert row["case"] == "A2-SPLIT"
    assert row["profile"] == "1/4;1/4;3/4;3/4"
    assert parse_named_rationals(row["intermediates"]) == {"u1": F(1, 2), "x1": F(1, 4)}


def test_solve_records_carry_the_construction_audit(capsys):
    assert main(["solve", "--config", SHARED_PEAK, "--method", "two-agent", "--format", "records"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == ",".join(CONSTRUCTION_COLUMNS)
    row = decode_rows(out)[0]
    assert (row["case"], row["prospective_rule"], row["degenerate"]) == ("TWO-AGENT", "f/(c+1)", "false")
    assert "inner_case" not in row
    assert parse_named_rationals(row["intermediates"]) == {"u1": F(1, 2), "x1": F(1, 5)}


def test_solve_dynamics_with_trace(tmp_path):
    trace_path = tmp_path / "trace.csv"
    assert main(["solve", "--config", MIXED, "--trace-out", str(trace_path)]) == 0
    steps = decode_models(trace_path.read_text(), DynamicsStep)
    assert [(s.agent, str(s.new_location)) for s in steps] == [(1, "9/20")]


def test_solve_rejects_inapplicable_method(capsys):
    assert main(["solve", "--config", MIXED, "--method", "alg1"]) == 2
    assert "applicable methods: dynamics" in capsys.readouterr().err


# ── analyze ───────────────────────────────────────────────────────────────────

def test_analyze_fairness_tight_profile(capsys):
    code = main(["analyze", "--config", str(INSTANCES / "fairness_tight.json"), "--format", "records"])
    assert code == 0
    row = decode_rows(capsys.readouterr().out)[0]
    assert (row["fairness"], row["fairness_bound"]) == ("1/2", "1/2")
    assert (row["welfare"], row["ratio"], row["bounds_ok"]) == ("1", "1", "true")


def test_analyze_refuses_non_equilibria():
    assert main(["analyze", "--config", MIXED]) == 3


def test_analyze_needs_support_mode():
    assert main(["analyze", "--config", SHARED_PEAK]) == 2


# ── reproduce ─────────────────────────────────────────────────────────────────

def test_reproduce_all(capsys):
    assert main(["reproduce", "all", "--n", "3"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert "checks passed" in out


def test_reproduce_accepts_numbered_target_names(capsys):
    assert main(["reproduce", "example2", "--format", "records"]) == 0
    rows = decode_rows(capsys.readouterr().out)
    assert rows and {row["target"] for row in rows} == {"mixed-widths"}
    assert main(["reproduce", "example4"]) == 0


def test_reproduce_records(capsys):
    assert main(["reproduce", "mixed-widths", "--format", "records"]) == 0
    rows = decode_rows(capsys.readouterr().out)
    assert rows and all(row["passed"] == "true" for row in rows)


# ── corpus ────────────────────────────────────────────────────────────────────

def test_corpus_records(capsys):
    code = main([
        "corpus", "--count", "2", "--n-min", "2", "--n-max", "2", "--widths", "1/4,1/3",
        "--pieces-max", "2", "--granularity", "1/10", "--starts", "1", "--format", "records",
    ])
    assert code == 0
    captured = capsys.readouterr()
    rows = decode_rows(captured.out)
    assert [row["seed"] for row in rows] == ["0", "1"]
    assert "Violations" in captured.err


def test_corpus_reads_instance_spec(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"n_min": 2, "n_max": 2, "widths": ["1/3"], "equal_widths": True, "pieces_max": 2}))
    code = main(["corpus", "--config", str(spec), "--count", "2", "--suite", "winner-construct"])
    assert code == 0
    assert "Certified : 2" in capsys.readouterr().out


# ── usage errors ──────────────────────────────────────────────────────────────

def test_missing_config(capsys):
    assert main(["evaluate"]) == 2
    assert "--config" in capsys.readouterr().err


def test_unreadable_config(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{ not json")
    assert main(["evaluate", "--config", str(broken)]) == 2
    assert main(["evaluate", "--config", str(tmp_path / "missing.json")]) == 2


def test_invalid_config_document(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"widths": ["3/2"]}))
    assert main(["evaluate", "--config", str(bad)]) == 2
    assert "widths" in capsys.readouterr().err


@pytest.mark.parametrize("profile", ["1/5,abc,4/5", "1/5,4/5", "1/5,1/10,4/5"])
def test_bad_profile_override(profile):
    assert main(["evaluate", "--config", MIXED, "--profile", profile]) == 2


def test_unknown_subcommand_exits_with_usage():
    with pytest.raises(SystemExit) as info:
        main(["launch"])
    assert info.value.code == 2
