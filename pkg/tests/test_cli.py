import json
import os

import pytest
from click.testing import CliRunner

from cli import EXIT_INPUT, cli
from utils import reports


@pytest.fixture
def run(tmp_path):
    """Invoke the CLI with --out pointed at a temp file; returns (exit_code, parsed output)."""
    runner = CliRunner()

    def _run(*args, fmt="json"):
        out = tmp_path / f"out.{fmt}"
        if out.exists():
            out.unlink()
        result = runner.invoke(cli, [*args, "--out", str(out)])
        if not out.exists():
            return result.exit_code, None
        with open(out, encoding="utf-8") as fh:
            return result.exit_code, json.load(fh) if fmt == "json" else reports.read_csv(fh)

    return _run


def test_analyze_resonant_spec(run, specs_dir):
    code, payload = run("analyze", "--spec", os.path.join(specs_dir, "resonant.json"))
    assert code == 0
    assert payload["resonance"]["d"] == 2
    assert payload["resonance"]["C_alpha"] == "3"
    assert payload["resonance"]["K"] == [["1", "1", "-1"]]


def test_analyze_periodic_vector(run):
    code, payload = run("analyze", "--vector", "half")
    assert code == 0
    assert payload["resonance"]["d"] == 1
    assert payload["resonance"]["Lambda"] == [["2", "1"]]


def test_malformed_spec_exits_with_input_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    result = CliRunner().invoke(cli, ["analyze", "--spec", str(bad)])
    assert result.exit_code == EXIT_INPUT
    assert "error:" in result.output


def test_vector_options_are_exclusive(specs_dir):
    result = CliRunner().invoke(cli, ["analyze", "--vector", "sqrt2", "--spec", os.path.join(specs_dir, "sqrt2.json")])
    assert result.exit_code == 2
    result = CliRunner().invoke(cli, ["analyze"])
    assert result.exit_code == 2


def test_psi_witness(run):
    code, payload = run("psi", "--vector", "sqrt2", "--Q", "5", "--Q", "16")
    assert code == 0
    assert payload["psi"][0]["witness"] == ["3", "-2"]
    assert payload["psi"][1]["witness"] == ["-7", "5"]


def test_psi_csv(run):
    code, rows = run("psi", "--vector", "sqrt2", "--Q", "5", "--format", "csv", fmt="csv")
    assert code == 0
    assert rows[0]["parameter"] == "Q=5"
    assert rows[0]["bound"] == "3;-2"


def test_psi_below_q_alpha_is_an_input_error(run):
    code, payload = run("psi", "--vector", "half", "--Q", "1")
    assert code == EXIT_INPUT
    assert payload is None


def test_approx(run):
    code, payload = run("approx", "--vector", "sqrt2", "--Q", "8")
    assert code == 0
    assert [p["q"] for p in payload["approximation"]["pairs"]] == ["2", "3"]
    assert payload["approximation"]["passed"]


def test_approx_below_threshold():
    result = CliRunner().invoke(cli, ["approx", "--vector", "sqrt2", "--Q", "3"])
    assert result.exit_code == EXIT_INPUT
    assert "proposition" in result.output


def test_ergodize_with_a_target(run):
    code, payload = run("ergodize", "--vector", "sqrt2", "--delta", "1/2", "--theta", "1/2,1/2")
    assert code == 0
    assert payload["hit"]["T_star"] == "5/2"
    assert payload["hit"]["within_delta"]


def test_ergodize_rejects_a_large_gamma(run):
    code, _ = run("ergodize", "--vector", "sqrt2", "--delta", "1", "--gamma", "1/2", "--tau", "1")
    assert code == EXIT_INPUT


def test_bad_rational_is_a_usage_error():
    result = CliRunner().invoke(cli, ["ergodize", "--vector", "sqrt2", "--delta", "half"])
    assert result.exit_code == 2
    assert "not a rational" in result.output


def test_circle_golden(run):
    code, payload = run("circle", "--alpha", "golden", "--delta", "1/4", "--gaps", "5", "--dirichlet", "8")
    assert code == 0
    assert payload["N"] == 2
    assert payload["pass"] is True
    assert payload["gap_profile"]["distinct_count"] <= 3
    assert (payload["dirichlet"]["q"], payload["dirichlet"]["p"]) == (5, 3)


def test_circle_rational(run):
    code, payload = run("circle", "--alpha", "1/3", "--delta", "1/4")
    assert code == 0
    assert payload["N"] is None
    assert payload["pass"] is None


def test_circle_mechanics_gap_does_not_fail_the_run(run):
    code, payload = run("circle", "--alpha", "sqrt3-1", "--delta", "1/16", "--mechanics")
    assert code == 0
    assert payload["pass"] is True
    assert payload["mechanics"]["q"] == 15
    assert payload["mechanics"]["rational_orbit_dense"] is False


def test_verify_theorem1_sweep(run, specs_dir):
    code, rows = run("verify", "--sweep", os.path.join(specs_dir, "theorem1_sqrt2.json"), fmt="csv")
    assert code == 0
    assert [r["status"] for r in rows] == ["pass"] * 3


def test_verify_rational_sweep_skips(run, specs_dir):
    code, rows = run("verify", "--sweep", os.path.join(specs_dir, "rational_theorem2.json"), fmt="csv")
    assert code == 0
    assert {r["status"] for r in rows} == {"skipped: hypothesis"}


def test_verify_json(run, specs_dir):
    code, payload = run("verify", "--sweep", os.path.join(specs_dir, "proposition_sqrt2.json"), "--format", "json")
    assert code == 0
    assert [r["parameter"] for r in payload] == ["Q=8", "Q=16"]
