"""Test cases for the command line interface."""

import json

import pytest
from click.testing import CliRunner

from am_operators.cli import EXIT_DESCRIPTION, EXIT_MODEL, EXIT_SUITE_FAILED, main

from ..conftest import DESCRIPTIONS_DIR, GOLDEN_DIR

EXAMPLES = sorted(path.stem for path in DESCRIPTIONS_DIR.iterdir() if path.suffix in {".json", ".yaml", ".yml"})

# Every setting that reaches a report.
REPORT_ENV = {
    "AM_TRUNCATION": "64",
    "AM_TOLERANCE": "1e-10",
    "AM_RANK_CUTOFF": "1e-10",
    "AM_PSD_SLACK": "1e-8",
    "AM_PROJECTOR_TOLERANCE": "1e-8",
    "AM_PARANORMAL_GRID": "64",
    "AM_PARANORMAL_TRIALS": "1000",
    "AM_DISCRETE_LIMIT": "50",
    "AM_SEED": "7",
    "AM_WORKERS": "1",
    "AM_INCLUDE_TIMING": "false",
}


@pytest.fixture
def runner():
    return CliRunner()


class TestListing:
    """Test cases for the listing commands."""

    def test_list_examples(self, runner):
        """Test listing the bundled descriptions."""
        result = runner.invoke(main, ["list-examples"])

        assert result.exit_code == 0
        assert "Available example descriptions:" in result.output
        assert "positive-below" in result.output

    def test_list_examples_empty(self, runner, tmp_path):
        """Test an empty descriptions directory."""
        result = runner.invoke(main, ["list-examples", "--descriptions-dir", str(tmp_path)])

        assert result.exit_code == 0
        assert "No descriptions found" in result.output

    def test_list_suites(self, runner):
        """Test listing the suites with their default trial counts."""
        result = runner.invoke(main, ["list-suites"])

        assert result.exit_code == 0
        assert "am-roundtrip (1000 trials)" in result.output
        assert "restriction (200 trials)" in result.output


class TestValidate:
    """Test cases for the validate command."""

    def test_all_valid(self, runner):
        """Test that every bundled description validates."""
        result = runner.invoke(main, ["validate"])

        assert result.exit_code == 0
        assert "OK   positive-below" in result.output
        assert "7/7 descriptions are valid" in result.output

    def test_single(self, runner):
        """Test validating one description by name."""
        result = runner.invoke(main, ["validate", "shifted"])

        assert result.exit_code == 0
        assert "1/1 descriptions are valid" in result.output

    def test_invalid(self, runner, tmp_path):
        """Test that a broken description fails validation."""
        (tmp_path / "broken.yaml").write_text("kind: positive-diagonal\n")
        result = runner.invoke(main, ["validate", "--descriptions-dir", str(tmp_path)])

        assert result.exit_code == EXIT_DESCRIPTION
        assert "FAIL broken" in result.output


class TestClassify:
    """Test cases for the classify command."""

    def test_example(self, runner):
        """Test classifying a bundled description."""
        result = runner.invoke(main, ["classify", "--example", "positive-below", "--truncation", "32"])

        assert result.exit_code == 0
        document = json.loads(result.output)
        assert document["am"]["verdict"] == "AM"
        assert document["truncation"]["n"] == 32

    def test_input_file(self, runner, tmp_path):
        """Test classifying a description file."""
        path = tmp_path / "op.yaml"
        path.write_text("kind: positive-diagonal\nname: op\ncells:\n  - value: 2\n    multiplicity: inf\n")
        result = runner.invoke(main, ["classify", "-i", str(path)])

        assert result.exit_code == 0
        assert '"verdict": "AM"' in result.output

    def test_emit_witness(self, runner):
        """Test that witnesses appear with --emit-witness."""
        result = runner.invoke(main, ["classify", "-e", "positive-above", "--emit-witness", "--truncation", "16"])

        assert result.exit_code == 0
        assert "counterexample_streams" in result.output

    def test_report_file(self, runner, tmp_path):
        """Test writing the report to a file."""
        report = tmp_path / "out" / "report.json"
        result = runner.invoke(main, ["classify", "-e", "truncated-shift", "-r", str(report)])

        assert result.exit_code == 0
        assert f"Report saved to {report}" in result.output
        assert json.loads(report.read_text())["matrix"]["numerical_rank"] == 2

    def test_missing_input(self, runner):
        """Test that classify needs an input."""
        result = runner.invoke(main, ["classify"])

        assert result.exit_code == EXIT_DESCRIPTION
        assert "Must provide either --input or --example" in result.output

    def test_unknown_example(self, runner):
        """Test an unknown example name."""
        result = runner.invoke(main, ["classify", "-e", "no-such-operator"])

        assert result.exit_code == EXIT_DESCRIPTION
        assert "not found" in result.output

    def test_syntax_error(self, runner, tmp_path):
        """Test that malformed documents exit with the description code."""
        path = tmp_path / "bad.json"
        path.write_text('{"kind": "positive-diagonal",')
        result = runner.invoke(main, ["classify", "-i", str(path)])

        assert result.exit_code == EXIT_DESCRIPTION
        assert "Invalid description" in result.output

    def test_invalid_operator(self, runner, tmp_path):
        """Test that model invariant violations exit with the model code."""
        path = tmp_path / "negative.json"
        path.write_text(
            json.dumps(
                {
                    "kind": "positive-diagonal",
                    "name": "negative",
                    "cells": [{"value": -1}],
                }
            )
        )
        result = runner.invoke(main, ["classify", "-i", str(path)])

        assert result.exit_code == EXIT_MODEL
        assert "Invalid operator" in result.output

    def test_descriptions_dir_option(self, runner):
        """Test reading examples from an explicit directory."""
        result = runner.invoke(
            main, ["classify", "-e", "direct-sum", "--descriptions-dir", str(DESCRIPTIONS_DIR), "--truncation", "16"]
        )

        assert result.exit_code == 0
        assert '"shifted_block_positive": true' in result.output


class TestSuite:
    """Test cases for the suite command."""

    def test_short_run(self, runner):
        """Test a short passing run."""
        result = runner.invoke(main, ["suite", "-n", "am-duality", "--trials", "2", "--seed", "5"])

        assert result.exit_code == 0
        assert "am-duality: 2/2 trials passed (seed 5)" in result.output

    def test_summary_file(self, runner, tmp_path):
        """Test writing the suite summary."""
        output = tmp_path / "summary.json"
        result = runner.invoke(main, ["suite", "-n", "restriction", "--trials", "1", "-o", str(output)])

        assert result.exit_code == 0
        assert json.loads(output.read_text())["passed"] is True

    def test_unknown_suite(self, runner):
        """Test that an unknown suite exits with the suite code."""
        result = runner.invoke(main, ["suite", "-n", "no-such-suite"])

        assert result.exit_code == EXIT_SUITE_FAILED
        assert "Unknown suite" in result.output


class TestGoldenReports:
    """Reports of the bundled descriptions are byte-stable and match ``tests/golden``.

    A missing golden is written on first run; ``pytest --update-golden`` rewrites them all.
    """

    @staticmethod
    def classify_to_file(runner, name, path):
        result = runner.invoke(main, ["classify", "--example", name, "--report", str(path)])
        assert result.exit_code == 0, result.output
        return path.read_bytes()

    @pytest.mark.parametrize("name", EXAMPLES)
    def test_report_matches_golden(self, runner, tmp_path, monkeypatch, update_golden, name):
        """Test that two runs write identical bytes and that they match the stored golden."""
        for key, value in REPORT_ENV.items():
            monkeypatch.setenv(key, value)

        first = self.classify_to_file(runner, name, tmp_path / "first.json")
        second = self.classify_to_file(runner, name, tmp_path / "second.json")
        assert first == second

        golden = GOLDEN_DIR / f"{name}.json"
        if update_golden or not golden.exists():
            golden.parent.mkdir(parents=True, exist_ok=True)
            golden.write_bytes(first)
            pytest.skip(f"wrote {golden.relative_to(GOLDEN_DIR.parent)}")

        assert first == golden.read_bytes()

    def test_every_example_is_covered(self):
        """Test that the golden set tracks the bundled descriptions."""
        assert len(EXAMPLES) == 7
        assert "truncated-shift" in EXAMPLES
