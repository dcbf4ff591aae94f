# tests/integration/test_cli.py
import json
import math

import pytest
import yaml
from click.testing import CliRunner

from app.cli import cli


def _invoke(*args):
    return CliRunner().invoke(cli, ["--workers", "1", "--plain-logs", *args])


def _data(result):
    return json.loads(result.stdout)["data"]


def _errors(result):
    """Error envelope: the indented JSON object after any log lines on stderr"""
    lines = result.stderr.splitlines()
    start = max(i for i, line in enumerate(lines) if line == "{")
    return json.loads("\n".join(lines[start:]))["errors"]


class TestNormCommand:
    """Integration tests for `norm`"""

    def test_bell_output_golden(self):
        """Test beta_0 at mu = 1/2, lambda = 1/3"""
        # Act
        result = _invoke("norm", "--mu", "1/2", "--lambda", "1/3", "--p", "2", "--input", "bell0")

        # Assert
        assert result.exit_code == 0, result.stderr
        data = _data(result)
        assert data["spectrum"] == pytest.approx([2 / 3, 1 / 9, 1 / 9, 1 / 9], abs=1e-12)
        assert data["norm"] == pytest.approx(math.sqrt(39.0) / 9.0, abs=1e-12)
        assert data["p"] == "2"

    def test_mu_one_ignores_lambda(self):
        """Test every input is sent to the shift state at mu = 1"""
        result = _invoke("norm", "--mu", "1", "--p", "inf", "--input", "product00")

        assert result.exit_code == 0, result.stderr
        data = _data(result)
        assert data["norm"] == pytest.approx(1.0)
        assert data["renyi_entropy"] == pytest.approx(0.0, abs=1e-12)

    def test_identity_channel(self):
        result = _invoke("norm", "--mu", "0", "--lambda", "1", "--p", "3", "--input", "product-1")

        assert result.exit_code == 0, result.stderr
        assert _data(result)["norm"] == pytest.approx(1.0)

    def test_entropy_order_has_no_norm(self):
        result = _invoke("norm", "--mu", "0", "--lambda", "0", "--p", "entropy", "--input", "bell0")

        assert result.exit_code == 0, result.stderr
        data = _data(result)
        assert "norm" not in data
        assert data["renyi_entropy"] == pytest.approx(math.log(4.0))

    def test_json_literal_input(self):
        literal = '{"amplitudes": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]}'

        result = _invoke("norm", "--mu", "0.5", "--lambda", "1/3", "--p", "inf", "--input", literal)

        assert result.exit_code == 0, result.stderr
        assert _data(result)["norm"] == pytest.approx(2 / 3)

    def test_malformed_json_reports_position(self):
        """Test a broken literal exits 2 with line and column"""
        # Act
        result = _invoke("norm", "--mu", "0.5", "--lambda", "0.5", "--p", "2", "--input", '{"amplitudes": [')

        # Assert
        assert result.exit_code == 2
        assert result.stdout == ""
        error = _errors(result)[0]
        assert error["code"] == "PARSE_ERROR"
        assert "line 1, column" in error["message"]

    def test_missing_lambda(self):
        result = _invoke("norm", "--mu", "0.5", "--p", "2", "--input", "bell0")

        assert result.exit_code == 2
        assert _errors(result)[0]["code"] == "VALIDATION_ERROR"

    def test_lambda_out_of_range(self):
        result = _invoke("norm", "--mu", "0.5", "--lambda", "2", "--p", "2", "--input", "bell0")

        assert result.exit_code == 2
        assert _errors(result)[0]["field"] == "lambda"


class TestOptimizeCommand:
    """Integration tests for `optimize`"""

    def test_both_methods_agree_below_threshold(self):
        """Test the numeric search reaches the analytic p = 2 value"""
        # Act
        result = _invoke(
            "optimize", "--mu", "1/4", "--lambda", "1/2", "--p", "2", "--method", "both", "--budget", "50", "--seed", "1"
        )

        # Assert
        assert result.exit_code == 0, result.stderr
        data = _data(result)
        assert data["mu_c_exact"] == "3/7"
        assert data["analytic"]["regime"] == "below_threshold"
        assert abs(data["gap"]) <= 1e-6
        assert data["numeric"]["gap"] == data["gap"]

    def test_analytic_above_threshold(self):
        result = _invoke("optimize", "--mu", "0.5", "--lambda", "1/3")

        assert result.exit_code == 0, result.stderr
        data = _data(result)
        assert data["mu_c_exact"] == "8/17"
        assert data["analytic"]["regime"] == "at_or_above"
        assert data["analytic"]["spectrum"] == pytest.approx([2 / 3, 1 / 9, 1 / 9, 1 / 9], abs=1e-12)
        assert data["analytic"]["linear_entropy"] == pytest.approx(1.0)

    def test_analytic_rejects_other_orders(self):
        """Test p = 3 has no analytic optimum and points at the numeric method"""
        result = _invoke("optimize", "--mu", "0.25", "--lambda", "0.5", "--p", "3", "--method", "analytic")

        assert result.exit_code == 2
        assert "numeric" in _errors(result)[0]["message"]

    def test_decimal_lambda_has_exact_threshold_from_text(self):
        result = _invoke("optimize", "--mu", "0.1", "--lambda", "0.5", "--p", "inf")

        assert result.exit_code == 0, result.stderr
        assert _data(result)["mu_c_exact"] == "3/7"

    def test_edge_lambda_has_no_threshold(self):
        """Test lambda = 1 leaves mu_c_exact out of the payload"""
        result = _invoke("optimize", "--mu", "0.5", "--lambda", "1", "--p", "2")

        assert result.exit_code == 0, result.stderr
        assert "mu_c_exact" not in _data(result)


class TestFiguresCommand:
    """Integration tests for `figures`"""

    def test_fig3_panels(self, tmp_path):
        # Arrange
        out = tmp_path / "fig3.csv"

        # Act
        result = _invoke("figures", "fig3", "--out", str(out), "--trials", "20", "--seed", "5")

        # Assert
        assert result.exit_code == 0, result.stderr
        data = _data(result)
        assert data["rows"] == 2 * 6 * (20 + 2)
        assert out.read_text(encoding="utf-8").splitlines()[0] == "mu,lambda,p,s_p,source"

    def test_fig1_grid(self, tmp_path):
        out = tmp_path / "fig1.csv"

        result = _invoke("figures", "fig1", "--out", str(out), "--mu-grid", "0,1/2", "--lambda-grid", "1/3")

        assert result.exit_code == 0, result.stderr
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 3
        assert lines[2].startswith("0.5,0.333333333333,")


class TestVerifyCommand:
    """Integration tests for `verify`"""

    def test_majorization_suite_passes(self):
        result = _invoke("verify", "majorization", "--trials", "5", "--seed", "0")

        assert result.exit_code == 0, result.stderr
        data = _data(result)
        assert data["passed"] is True
        assert data.get("first_failure") is None
        assert "PASSED" in result.stderr

    def test_unknown_suite(self):
        result = _invoke("verify", "everything")

        assert result.exit_code == 2


class TestCheckConjectureCommand:
    """Integration tests for `check-conjecture`"""

    def test_pinned_mu_zero_is_deterministic(self, tmp_path):
        """Test two runs with the same seed write identical files and find nothing"""
        # Arrange
        out = tmp_path / "report.csv"
        args = ("check-conjecture", "--cells", "1", "--mu", "0", "--per-cell", "10", "--no-lattice",
                "--seed", "9", "--out", str(out))

        # Act
        first = _invoke(*args)
        first_bytes = out.read_bytes()
        second = _invoke(*args)

        # Assert
        assert first.exit_code == 0, first.stderr
        assert second.exit_code == 0, second.stderr
        assert out.read_bytes() == first_bytes
        assert first.stdout == second.stdout
        data = _data(first)
        assert data["violations"] == 0
        assert data["violating_rows"] == []
        assert data["rows"] == 6

    def test_jsonl_format(self, tmp_path):
        out = tmp_path / "report.jsonl"

        result = _invoke("check-conjecture", "--cells", "1", "--per-cell", "5", "--no-lattice",
                         "--p-grid", "2,inf", "--format", "jsonl", "--out", str(out))

        assert result.exit_code == 0, result.stderr
        lines = out.read_text(encoding="utf-8").splitlines()
        assert [json.loads(line)["p"] for line in lines] == ["2", "inf"]

    @pytest.mark.slow
    def test_full_default_run(self, tmp_path):
        result = _invoke("check-conjecture", "--out", str(tmp_path / "report.csv"))

        assert result.exit_code == 0, result.stderr
        assert _data(result)["cells"] == 2000


class TestConfigFiles:
    """Integration tests for --config"""

    def test_flags_override_file(self, tmp_path):
        # Arrange
        config = tmp_path / "run.yaml"
        config.write_text(yaml.safe_dump({"norm": {"mu": "1/2", "lambda": "1/3", "p": "2", "input": "bell0"}}))

        # Act
        result = CliRunner().invoke(cli, ["--config", str(config), "--workers", "1", "norm", "--p", "inf"])

        # Assert
        assert result.exit_code == 0, result.stderr
        data = _data(result)
        assert data["p"] == "inf"
        assert data["norm"] == pytest.approx(2 / 3)

    def test_run_seed_reaches_commands(self, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"seed": 11}))

        result = CliRunner().invoke(cli, ["--config", str(config), "optimize", "--mu", "0.2", "--lambda", "0.5"])

        assert result.exit_code == 0, result.stderr
        assert json.loads(result.stdout)["meta"]["seed"] == 11

    def test_malformed_yaml(self, tmp_path):
        config = tmp_path / "bad.yaml"
        config.write_text("norm: [1, 2\n")

        result = CliRunner().invoke(cli, ["--config", str(config), "norm"])

        assert result.exit_code == 2
        assert _errors(result)[0]["code"] == "PARSE_ERROR"

    def test_missing_config_file(self, tmp_path):
        result = CliRunner().invoke(cli, ["--config", str(tmp_path / "missing.yaml"), "norm"])

        assert result.exit_code == 2
        assert _errors(result)[0]["code"] == "IO_ERROR"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
