# tests/unit/schemas/test_run_config.py
import json
from fractions import Fraction
from pathlib import Path

import pytest
import yaml
from pydantic import ValidationError

from app.schemas.analysis import VerificationSuite
from app.schemas.optimum import OptimizeMethod
from app.schemas.run_config import (
    FIG3_PANELS,
    CheckConjectureParams,
    FigureName,
    FiguresParams,
    NormParams,
    OptimizeParams,
    OutputFormat,
    RunConfig,
    VerifyParams,
    load_config_document,
    merge_parameters,
    parse_fraction,
)


class TestParsingHelpers:
    """Unit tests for number parsing and parameter merging"""

    @pytest.mark.parametrize(
        "raw,expected",
        [("1/3", Fraction(1, 3)), ("0.25", Fraction(1, 4)), (" 3/7 ", Fraction(3, 7)), (2, Fraction(2))],
    )
    def test_parse_fraction(self, raw, expected):
        assert parse_fraction(raw) == expected

    @pytest.mark.parametrize("raw", ["one third", "1/0", "", True])
    def test_parse_fraction_rejects(self, raw):
        with pytest.raises(ValueError):
            parse_fraction(raw)

    def test_merge_keeps_file_values_for_unset_flags(self):
        """Test flags override key by key and None flags are ignored"""
        merged = merge_parameters({"mu": "0.25", "p": "3"}, {"mu": "0.5", "p": None, "seed": 4})

        assert merged == {"mu": "0.5", "p": "3", "seed": 4}


class TestConfigDocuments:
    """Unit tests for config files"""

    def test_yaml_document(self, tmp_path):
        # Arrange
        path = tmp_path / "run.yaml"
        path.write_text(yaml.safe_dump({"seed": 7, "optimize": {"mu": "1/4", "lambda": "1/2"}}))

        # Act
        run = RunConfig.from_document(load_config_document(path))

        # Assert
        assert run.seed == 7
        assert run.format == OutputFormat.CSV
        assert run.section("optimize") == {"mu": "1/4", "lambda": "1/2"}
        assert run.section("norm") == {}

    def test_json_document(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"format": "jsonl", "check-conjecture": {"cells": 3}}))

        run = RunConfig.from_document(load_config_document(path))

        assert run.format == OutputFormat.JSONL
        assert run.section("check-conjecture") == {"cells": 3}

    def test_empty_document(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")

        assert load_config_document(path) == {}

    def test_non_mapping_document(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")

        with pytest.raises(ValueError):
            load_config_document(path)

    def test_section_must_be_mapping(self):
        with pytest.raises(ValueError):
            RunConfig.from_document({"optimize": 3})

    def test_negative_seed_rejected(self):
        with pytest.raises(ValidationError):
            RunConfig.from_document({"seed": -1})

    def test_missing_file(self):
        with pytest.raises(OSError):
            load_config_document(Path("does/not/exist.yaml"))


class TestCommandParams:
    """Unit tests for the per-command parameter models"""

    def test_norm_fractions(self):
        """Test fraction strings and the order label"""
        params = NormParams.model_validate({"mu": "1/2", "lambda": "1/3", "p": 2, "input": "bell0"})

        assert params.mu == 0.5
        assert params.lam == pytest.approx(1 / 3)
        assert params.p == "2"
        assert params.beta == "beta0"

    def test_norm_lambda_required_below_one(self):
        with pytest.raises(ValidationError) as exc_info:
            NormParams.model_validate({"mu": "0.5", "p": "2", "input": "bell0"})
        assert "lambda is required" in str(exc_info.value)

    def test_norm_lambda_optional_at_mu_one(self):
        params = NormParams.model_validate({"mu": 1, "p": "inf", "input": "product00"})

        assert params.lam == 1.0
        assert params.p == "inf"

    def test_norm_rejects_bad_order(self):
        with pytest.raises(ValidationError):
            NormParams.model_validate({"mu": 0.5, "lambda": 0.5, "p": "0.5", "input": "bell0"})

    def test_norm_lambda_range(self):
        with pytest.raises(ValidationError):
            NormParams.model_validate({"mu": 0.5, "lambda": "-1/2", "p": "2", "input": "bell0"})

    def test_optimize_defaults_and_budget(self):
        """Test an integer budget sets the random starting states"""
        # Act
        params = OptimizeParams.model_validate({"mu": "1/4", "lambda": "1/2", "budget": 30})

        # Assert
        assert params.p == "2"
        assert params.method == OptimizeMethod.ANALYTIC
        assert params.budget.random_states == 30

    def test_optimize_requires_lambda(self):
        with pytest.raises(ValidationError):
            OptimizeParams.model_validate({"mu": 0.25})

    def test_optimize_rejects_unknown_keys(self):
        with pytest.raises(ValidationError):
            OptimizeParams.model_validate({"mu": 0.25, "lambda": 0.5, "lam2": 1})

    def test_fig3_defaults(self):
        """Test fig3 runs on the two panels with the default order list"""
        params = FiguresParams(figure=FigureName.FIG3)

        assert params.resolved_points() == list(FIG3_PANELS)
        assert params.resolved_grids() == ([], [])
        assert params.resolved_orders() == ["entropy", "1.5", "2", "3", "5", "inf"]
        assert params.output_path().name == "fig3.csv"

    def test_fig1_default_grid(self):
        mu_grid, lam_grid = FiguresParams(figure="fig1").resolved_grids()

        assert len(mu_grid) == len(lam_grid) == 51
        assert mu_grid[0] == 0.0 and mu_grid[-1] == 1.0

    def test_figure_grids_from_strings(self):
        params = FiguresParams.model_validate(
            {"figure": "fig2", "mu_grid": "0, 1/2, 1", "lambda_grid": "1/3", "p_grid": "2,inf"}
        )

        assert params.resolved_grids() == ([0.0, 0.5, 1.0], [pytest.approx(1 / 3)])
        assert params.resolved_orders() == ["2", "inf"]

    def test_verify_params(self):
        params = VerifyParams(suite="tables")

        assert params.suite == VerificationSuite.TABLES
        assert params.trials == 200

    def test_check_conjecture_defaults(self):
        params = CheckConjectureParams(format="jsonl")

        assert params.cells == 2000
        assert params.p_grid == ["1.1", "1.5", "2", "3", "5", "inf"]
        assert params.output_path().name == "conjecture_report.jsonl"

    def test_check_conjecture_empty_grid(self):
        with pytest.raises(ValidationError):
            CheckConjectureParams(p_grid="")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
