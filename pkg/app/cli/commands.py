# app/cli/commands.py
"""
Click command group of the toolkit.

Every command validates its merged parameters (config file section, then
flags) before computing anything, prints a CommandResponse as JSON on
stdout and leaves logs and human-readable tables on stderr.
"""
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
from pydantic import BaseModel

from app.cli.error_handlers import VerificationFailed, handle_command_errors
from app.cli.parsing import parse_beta, parse_state, read_config
from app.core.config import settings
from app.core.exceptions import UnsupportedMethodError
from app.core.logging_config import get_logger, setup_logging
from app.repositories.csv_repository import CsvRowRepository
from app.repositories.jsonl_repository import JsonlRowRepository
from app.schemas.analysis import ClaimSummary, PerturbationReport, SuiteResult, VerificationSuite
from app.schemas.channel import ChannelParams
from app.schemas.optimum import Optimum, OptimizeMethod, ReportRow, SweepMode, SweepSpec
from app.schemas.purity import PurityOrder, PurityOrderKind
from app.schemas.response import DataResponse, ErrorDetail
from app.schemas.run_config import (
    CheckConjectureParams,
    FiguresParams,
    NormParams,
    OptimizeParams,
    OutputFormat,
    RunConfig,
    VerifyParams,
    merge_parameters,
    parse_fraction,
)
from app.services.optimization_service import get_optimization_service
from app.services.purity_service import get_purity_service
from app.services.state_service import get_state_service
from app.services.sweep_service import get_sweep_service, row_model_for
from app.services.verification_service import get_verification_service

logger = get_logger(__name__)

SIGNIFICANT_DIGITS = 12


def sig(value: Optional[float]) -> Optional[float]:
    """Round to 12 significant digits for printing"""
    if value is None:
        return None
    return float(format(value, f".{SIGNIFICANT_DIGITS}g"))


class CliState(BaseModel):
    """Objects shared by the subcommands through the click context"""

    run: RunConfig
    workers: int

    def parameters(self, command: str, flags: Dict[str, Any]) -> Dict[str, Any]:
        """Config-file section of `command` overridden by the given flags"""
        base: Dict[str, Any] = {}
        if "seed" in self.run.model_fields_set:
            base["seed"] = self.run.seed
        return merge_parameters(merge_parameters(base, self.run.section(command)), flags)


def _state(ctx: click.Context) -> CliState:
    return ctx.find_object(CliState)


def _print(data: Any, command: str, seed: Optional[int] = None) -> None:
    click.echo(DataResponse.success(data=data, command=command, seed=seed).to_json())


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="JSON or YAML run configuration")
@click.option("--log-level", default=None, help="Logging level, default from LOG_LEVEL")
@click.option("--json-logs/--plain-logs", default=None, help="Structured JSON or plain text logs")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Worker processes for sweeps and scans")
@click.version_option(settings.VERSION, prog_name="corrchan")
@click.pass_context
@handle_command_errors("corrchan")
def cli(ctx: click.Context, config_path: Optional[Path], log_level: Optional[str],
        json_logs: Optional[bool], workers: Optional[int]) -> None:
    """Output purity of correlated two-qubit depolarizing channels."""
    setup_logging(
        app_name="corrchan",
        log_level=log_level or settings.LOG_LEVEL,
        json_format=settings.JSON_LOGS if json_logs is None else json_logs,
        log_to_file=settings.LOG_TO_FILE,
        command=ctx.invoked_subcommand,
    )
    run = RunConfig.from_document(read_config(config_path)) if config_path else RunConfig()
    ctx.obj = CliState(run=run, workers=workers or run.workers or settings.WORKERS)


# === norm ===


@cli.command()
@click.option("--mu", default=None, help="Correlation probability, decimal or a/b")
@click.option("--lambda", "lam", default=None, help="Depolarizing parameter, decimal or a/b")
@click.option("--p", default=None, help="Order: real > 1, inf or entropy")
@click.option("--input", "input_state", default=None, help="bell0..bell3, singlet, product00, product-1 or JSON")
@click.option("--beta", default=None, help="beta0, singlet, bell1, bell3 or a JSON unitary")
@click.pass_context
@handle_command_errors("norm")
def norm(ctx: click.Context, mu, lam, p, input_state, beta) -> None:
    """p-norm, Renyi entropy and spectrum of one channel output."""
    flags = {"mu": mu, "lambda": lam, "p": p, "input": input_state, "beta": beta}
    params = NormParams.model_validate(_state(ctx).parameters("norm", flags))

    states = get_state_service()
    purity = get_purity_service()
    psi = parse_state(params.input, states)
    channel = ChannelParams(mu=params.mu, lam=params.lam, beta=parse_beta(params.beta, states))
    spectrum = purity.output_spectrum(channel, psi)
    order = PurityOrder.parse(params.p)

    values = spectrum.as_array()
    data = {
        "mu": sig(params.mu),
        "lambda": sig(params.lam),
        "p": order.label,
        "input": params.input,
        "beta": params.beta,
    }
    # the entropy order has no norm
    if order.kind != PurityOrderKind.ENTROPY:
        data["norm"] = sig(float(purity.norm_of_values(values, order)))
    data["renyi_entropy"] = sig(float(purity.entropy_of_values(values, order)))
    data["spectrum"] = [sig(v) for v in spectrum.values]
    _print(data, "norm")


# === optimize ===


def _exact_threshold(raw: Any) -> Optional[str]:
    """mu_c as an exact fraction when lambda was given as text or an integer"""
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        return None
    lam = parse_fraction(raw)
    if not 0 < lam < 1:
        return None
    return str(get_optimization_service().mu_critical(lam))


def _analytic_optimum(params: OptimizeParams, order: PurityOrder, strict: bool) -> Optimum:
    """
    Proven optimum for p = 2, the same family for p = inf and the entropy.

    Raises:
        UnsupportedMethodError: If strict and the order has no analytic optimum
    """
    optimizer = get_optimization_service()
    if order.is_finite and order.p == 2.0:
        return optimizer.two_norm_optimum(params.mu, params.lam)
    if order.is_finite and strict:
        raise UnsupportedMethodError(
            f"no analytic optimum for p = {order.label}; analytic covers p = 2, inf and the "
            f"entropy via the conjectured family; use --method numeric"
        )
    return optimizer.conjectured_optimum(params.mu, params.lam, order)


@cli.command()
@click.option("--mu", default=None)
@click.option("--lambda", "lam", default=None)
@click.option("--p", default=None, help="Order: real > 1, inf or entropy")
@click.option("--method", type=click.Choice([m.value for m in OptimizeMethod]), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--budget", default=None, help="Random starting states of the numeric search")
@click.pass_context
@handle_command_errors("optimize")
def optimize(ctx: click.Context, mu, lam, p, method, seed, budget) -> None:
    """Optimal output purity, analytic and/or numeric."""
    flags = {"mu": mu, "lambda": lam, "p": p, "method": method, "seed": seed, "budget": budget}
    merged = _state(ctx).parameters("optimize", flags)
    params = OptimizeParams.model_validate(merged)
    order = PurityOrder.parse(params.p)
    optimizer = get_optimization_service()

    data: Dict[str, Any] = {}
    mu_c_exact = _exact_threshold(merged.get("lambda"))
    if mu_c_exact is not None:
        data["mu_c_exact"] = mu_c_exact
    if params.method == OptimizeMethod.ANALYTIC:
        analytic = _analytic_optimum(params, order, strict=True)
        data["analytic"] = optimizer.report(analytic).model_dump(mode="json", by_alias=True)
    elif params.method == OptimizeMethod.NUMERIC:
        numeric = optimizer.numeric_optimize(params.mu, params.lam, order, params.budget, seed=params.seed)
        data["numeric"] = optimizer.report(numeric).model_dump(mode="json", by_alias=True)
    else:
        analytic = _analytic_optimum(params, order, strict=False)
        numeric = optimizer.numeric_optimize(params.mu, params.lam, order, params.budget, seed=params.seed)
        purity = optimizer.purity
        gap = float(
            purity.purity_score(numeric.spectrum.as_array(), order)
            - purity.purity_score(analytic.spectrum.as_array(), order)
        )
        data["analytic"] = optimizer.report(analytic).model_dump(mode="json", by_alias=True)
        data["numeric"] = optimizer.report(numeric, gap=gap).model_dump(mode="json", by_alias=True)
        data["gap"] = gap
    _print(data, "optimize", params.seed)


# === figures ===


@cli.command()
@click.argument("figure", type=click.Choice([SweepMode.FIG1.value, SweepMode.FIG2.value, SweepMode.FIG3.value]))
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None, help="CSV file to write")
@click.option("--mu-grid", default=None, help="Comma-separated mu values")
@click.option("--lambda-grid", "lam_grid", default=None, help="Comma-separated lambda values")
@click.option("--point", "points", multiple=True, help="fig3 panel as mu,lambda; repeatable")
@click.option("--p-grid", default=None, help="Comma-separated orders")
@click.option("--trials", type=int, default=None, help="Random inputs per fig3 panel")
@click.option("--seed", type=int, default=None)
@click.pass_context
@handle_command_errors("figures")
def figures(ctx: click.Context, figure, out, mu_grid, lam_grid, points, p_grid, trials, seed) -> None:
    """Data behind the figures, as CSV."""
    flags = {
        "figure": figure,
        "out": out,
        "mu_grid": mu_grid,
        "lambda_grid": lam_grid,
        "points": [tuple(point.split(",")) for point in points] or None,
        "p_grid": p_grid,
        "trials": trials,
        "seed": seed,
    }
    state = _state(ctx)
    params = FiguresParams.model_validate(state.parameters("figures", flags))
    mu_values, lam_values = params.resolved_grids()
    spec = SweepSpec(
        mode=SweepMode(params.figure.value),
        mu_grid=mu_values,
        lam_grid=lam_values,
        points=params.resolved_points(),
        p_grid=[PurityOrder.parse(p) for p in params.resolved_orders()],
        trials=params.trials,
        lattice=False,
        seed=params.seed,
    )
    path = params.output_path()
    with CsvRowRepository(row_model_for(spec.mode), path) as repository:
        result = get_sweep_service().sweep(spec, repository, workers=state.workers)
    if result.io_errors:
        raise OSError(f"{result.io_errors} row batches failed to write to {path}")
    _print(result.model_dump(mode="json"), "figures", params.seed)


# === verify ===


def _human_table(result: SuiteResult) -> str:
    lines = [f"suite {result.suite} (seed {result.seed}, trials {result.trials})"]
    for check in result.checks:
        status = "INFO" if check.informational else ("PASS" if check.passed else "FAIL")
        lines.append(f"  {status:<4}  {check.name:<40}  {check.detail}")
    lines.append("PASSED" if result.passed else "FAILED")
    return "\n".join(lines)


def _write_perturbation(out: Path, reports: List[PerturbationReport], summaries: List[ClaimSummary]) -> None:
    with JsonlRowRepository(PerturbationReport, out / "perturbation.jsonl") as repository:
        repository.append(reports)
    with CsvRowRepository(ClaimSummary, out / "perturbation_summary.csv") as repository:
        repository.append(summaries)


@cli.command()
@click.argument("suite", type=click.Choice([s.value for s in VerificationSuite]))
@click.option("--seed", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Directory for the perturbation scan files")
@click.pass_context
@handle_command_errors("verify")
def verify(ctx: click.Context, suite, seed, trials, out) -> None:
    """Run a verification suite; exit 1 on the first failing check."""
    state = _state(ctx)
    params = VerifyParams.model_validate(
        state.parameters("verify", {"suite": suite, "seed": seed, "trials": trials, "out": out})
    )
    service = get_verification_service()
    if params.suite == VerificationSuite.PERTURBATION:
        result, reports, summaries = service.perturbation_suite(params.seed, params.trials, state.workers)
        if params.out is not None:
            _write_perturbation(params.out, reports, summaries)
    else:
        result = service.run(params.suite, params.seed, params.trials, workers=state.workers)

    click.echo(_human_table(result), err=True)
    failure = result.first_failure
    _print(
        {
            "suite": result.suite,
            "passed": result.passed,
            "checks": [check.model_dump(mode="json") for check in result.checks],
            "first_failure": failure.model_dump(mode="json") if failure else None,
        },
        "verify",
        params.seed,
    )
    if failure is not None:
        raise VerificationFailed(
            DataResponse.error(
                errors=[ErrorDetail(code="VERIFICATION_FAILED", message=failure.detail, field=failure.name)],
                command="verify",
                seed=params.seed,
            )
        )


# === check-conjecture ===


@cli.command("check-conjecture")
@click.option("--cells", type=int, default=None, help="Random (mu, lambda) cells")
@click.option("--per-cell", type=int, default=None, help="Random inputs per cell")
@click.option("--p-grid", default=None, help="Comma-separated orders")
@click.option("--seed", type=int, default=None)
@click.option("--mu", default=None, help="Pin mu in every cell")
@click.option("--lambda", "lam", default=None, help="Pin lambda in every cell")
@click.option("--lattice/--no-lattice", default=None, help="Add the reduced-lattice search")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]), default=None)
@click.pass_context
@handle_command_errors("check-conjecture")
def check_conjecture(ctx: click.Context, cells, per_cell, p_grid, seed, mu, lam, lattice, out, output_format) -> None:
    """Random inputs and lattice search against the conjectured optimum."""
    state = _state(ctx)
    flags = {
        "cells": cells,
        "per_cell": per_cell,
        "p_grid": p_grid,
        "seed": seed,
        "mu": mu,
        "lambda": lam,
        "lattice": lattice,
        "out": out,
        "format": output_format or (state.run.format.value if "format" in state.run.model_fields_set else None),
    }
    params = CheckConjectureParams.model_validate(state.parameters("check-conjecture", flags))
    spec = SweepSpec(
        mode=SweepMode.REPORT,
        cells=params.cells,
        mu_grid=[params.mu] if params.mu is not None else [],
        lam_grid=[params.lam] if params.lam is not None else [],
        p_grid=[PurityOrder.parse(p) for p in params.p_grid],
        trials=params.per_cell,
        lattice=params.lattice,
        seed=params.seed,
    )
    path = params.output_path()
    repository_class = JsonlRowRepository if params.format == OutputFormat.JSONL else CsvRowRepository
    with repository_class(ReportRow, path) as repository:
        result = get_sweep_service().sweep(spec, repository, workers=state.workers)
    if result.io_errors:
        raise OSError(f"{result.io_errors} row batches failed to write to {path}")

    violating = [row for row in repository.read_all() if row.violation_flag]
    _print(
        {
            **result.model_dump(mode="json"),
            "violating_rows": [row.model_dump(mode="json", by_alias=True) for row in violating],
        },
        "check-conjecture",
        params.seed,
    )
