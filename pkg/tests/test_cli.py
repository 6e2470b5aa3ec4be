"""CLI exit codes, outputs, and the pegsim command."""

import json

from click.testing import CliRunner

from moneygraph.cli import main

from conftest import SCENARIO_DIR


def invoke(*args):
    return CliRunner().invoke(main, list(args))


class TestRunCommand:
    def test_bundled_scenario_exits_zero(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        result = invoke("run", str(SCENARIO_DIR / "endogenous.mgs"))
        assert result.exit_code == 0, result.output

    def test_missing_file(self):
        result = invoke("run", "missing.mgs")
        assert result.exit_code == 1
        assert "no such file" in result.output

    def test_bad_assert_reports_line(self, tmp_path):
        bad = tmp_path / "bad_assert.mgs"
        bad.write_text(
            "regime fiat\ncurrency DOM\n"
            "agent cb kind=central_bank issues=DOM\n"
            "agent b1 kind=bank\nagent h1 kind=nonbank\n"
            "op create_loan bank=b1 borrower=h1 amount=100\n"
            "assert broad_money == 99\n"
        )
        result = invoke("run", str(bad))
        assert result.exit_code == 1
        assert ":7:" in result.output or ":7" in result.output

    def test_parse_error_reports_position(self, tmp_path):
        bad = tmp_path / "bad.mgs"
        bad.write_text("regime fiat\nagent cb kind=queen\n")
        result = invoke("run", str(bad))
        assert result.exit_code == 1
        assert "2" in result.output and "queen" in result.output

    def test_outputs_written_and_deterministic(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        src = SCENARIO_DIR / "consolidation.mgs"
        for directory in ("one", "two"):
            out = tmp_path / directory
            out.mkdir()
            monkeypatch.chdir(out)
            result = invoke(
                "run", str(src),
                "--trace", "trace.jsonl", "--csv", "series.csv", "--dot", "final.dot",
            )
            assert result.exit_code == 0, result.output
        for name in ("trace.jsonl", "series.csv", "final.dot",
                     "before_consolidation.dot", "after_consolidation.dot"):
            a = (tmp_path / "one" / name).read_bytes()
            b = (tmp_path / "two" / name).read_bytes()
            assert a == b, name
        header = (tmp_path / "one" / "series.csv").read_text().splitlines()[0]
        assert header == "step,currency,base_money,broad_money,net_money"


class TestPegsimCommand:
    BASE = ["pegsim", "--reserves", "2", "--deltas", "+1:1/2,-1:1/2",
            "--horizon", "4", "--seed", "42"]

    def test_oracle_within_three_sigma(self):
        result = invoke(*self.BASE, "--trials", "20000", "--oracle")
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["exact"] == "3/8"
        assert payload["deviation"] <= 3 * (0.375 * 0.625 / 20000) ** 0.5

    def test_bad_distribution_exit_2(self):
        result = invoke("pegsim", "--reserves", "2", "--deltas", "+1:1/2,-1:1/4",
                        "--horizon", "4", "--trials", "10", "--seed", "1")
        assert result.exit_code == 2

    def test_zero_trials_exit_2(self):
        result = invoke(*self.BASE, "--trials", "0")
        assert result.exit_code == 2

    def test_per_trial_csv(self, tmp_path):
        out = tmp_path / "trials.csv"
        result = invoke(*self.BASE, "--trials", "50", "--per-trial-csv", str(out))
        assert result.exit_code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "trial,depletion_step"
        assert len(lines) == 51

    def test_deterministic_output(self):
        a = invoke(*self.BASE, "--trials", "5000")
        b = invoke(*self.BASE, "--trials", "5000")
        assert a.output == b.output
